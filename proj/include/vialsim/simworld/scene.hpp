#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "vialsim/core/config.hpp"
#include "vialsim/core/image.hpp"
#include "vialsim/core/rng.hpp"
#include "vialsim/core/types.hpp"

namespace vialsim::simworld {

enum class ContactState { None, RackTop, Table, Inserted };
enum class Fingertip { Rubber, Tactile };
enum class Finger { Left, Right };

std::string to_string(ContactState s);

struct RackPose {
  double x = 0.0;
  double y = 0.0;
  double yaw = 0.0;
};

/// Table clutter seen by the camera.
struct Distractor {
  enum class Kind { Disk, Ring, Bar };
  Kind kind = Kind::Disk;
  Vec2 center;
  double radius = 0.0;  // disk/ring outer radius, bar half-length
  double width = 0.0;   // ring thickness, bar half-width
  double angle = 0.0;
  double intensity = 0.0;
};

/// In-gripper state of the held vial. `offset` is the lateral position of the
/// contact patch relative to the fingertip centre and is what the tactile
/// sensors observe; `sway` is the extra lateral displacement of the vial
/// bottom caused by tilt inside the grasp, which they do not observe.
struct HeldVial {
  Vec2 offset;
  Vec2 sway;
};

struct ForceSample {
  double fx = 0.0;
  double fy = 0.0;
  double fz = 0.0;

  Vec3 vec() const { return {fx, fy, fz}; }
};

struct PlacementResult {
  enum class Kind { Inserted, RestingOnRack, DroppedOnTable, StillHeld };
  Kind kind = Kind::StillHeld;
  int row = -1;
  int col = -1;

  bool inserted() const { return kind == Kind::Inserted; }
};

std::string to_string(PlacementResult::Kind k);

struct SceneState {
  RackSpec rack;
  VialSpec vial;
  RackPose rack_pose;
  std::vector<std::uint8_t> occupancy;  // rows x cols, row-major
  std::vector<Distractor> distractors;

  Pose3 grip;                // actual gripper tip (GRIP)
  Vec3 reference;            // commanded gripper tip position
  Vec3 reference_velocity;
  Vec3 reference_accel;
  std::optional<HeldVial> held;
  bool gripper_closed = false;
  Fingertip fingertip = Fingertip::Rubber;

  ContactState contact = ContactState::None;
  double contact_force = 0.0;  // normal reaction on the vial (N)
  double release_timer = 0.0;  // > 0 while the gripper is opening

  std::optional<PlacementResult> dropped;  // set when the vial slipped out of the grasp

  HeldVial pending_grasp;  // in-gripper state the next grasp will produce
  Vec2 camera_bias;        // true camera xy minus believed camera xy
  double sim_clock = 0.0;

  bool occupied(int row, int col) const {
    return occupancy[static_cast<std::size_t>(row) * rack.cols + col] != 0;
  }
  void set_occupied(int row, int col, bool v) {
    occupancy[static_cast<std::size_t>(row) * rack.cols + col] = v ? 1 : 0;
  }
  int vacant_count() const;
};

/// Slot centre in the robot base frame.
Vec2 slot_center(const SceneState& scene, int row, int col);

/// Rack-frame coordinates of a base-frame point.
Vec2 to_rack_frame(const SceneState& scene, Vec2 p);

bool inside_footprint(const SceneState& scene, Vec2 p, double margin = 0.0);

struct NearestSlot {
  int row = 0;
  int col = 0;
  double distance = 0.0;
};
NearestSlot nearest_slot(const SceneState& scene, Vec2 p);

/// Lateral position of the held vial's axis at its bottom.
Vec2 vial_axis(const SceneState& scene);

}  // namespace vialsim::simworld
