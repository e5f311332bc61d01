#pragma once

#include <array>
#include <variant>

#include "vialsim/core/config.hpp"
#include "vialsim/core/rng.hpp"
#include "vialsim/simworld/scene.hpp"

namespace vialsim::simworld {

/// Drive the gripper toward a pose with a trapezoidal speed profile.
struct MoveTo {
  Vec3 target;
  double speed = 0.0;
};

/// Drive the gripper down at a constant speed (ramped by the acceleration limit).
struct Descend {
  double speed = 0.0;
};

/// Stay put (decelerating if moving).
struct Hold {};

using MotionCommand = std::variant<MoveTo, Descend, Hold>;

/// Advances the scene by dt seconds and returns the wrist force reading.
/// Throws InvalidArgument for dt <= 0 and std::logic_error for motion
/// commands issued while a release is in progress.
ForceSample tick(SceneState& scene, const MotionCommand& command, double dt, const WorkspaceConfig& config,
                 RngStream& rng);

/// Noise-free static force at the current pose: payload weight plus a small
/// pose-dependent term.
Vec3 static_force(const SceneState& scene, const WorkspaceConfig& config);

/// Opens the gripper and reports where the vial ended up. Throws
/// std::logic_error when no vial is held.
PlacementResult release_and_evaluate(SceneState& scene, const WorkspaceConfig& config);

/// Starts a fresh trial: random rack pose, occupancy, clutter, grasp offset and
/// camera calibration bias. The gripper starts open at the home pose.
/// Throws InvalidArgument if the rack cannot be kept in the home camera view.
SceneState reset_trial(const WorkspaceConfig& config, RngStream& rng, Fingertip fingertip = Fingertip::Rubber);

/// Closes the gripper on the vial at the collection point, producing the
/// pending in-gripper state. Throws std::logic_error if already holding.
void grasp(SceneState& scene);

/// Gripper pose (tip) for the collection point.
Vec3 source_grip_position(const WorkspaceConfig& config);

double friction(const SceneState& scene, const WorkspaceConfig& config);

/// Renders one tactile frame. With the gripper open, or nothing held, the
/// frame carries only the sensor background and noise.
TactileFrame sample_tactile(const SceneState& scene, Finger finger, const WorkspaceConfig& config, RngStream& rng);

/// Affine map the simulated sensor uses from normalized image coordinates
/// to physical in-gripper offset: offset = gain * (u/W, v/H) + bias.
struct SensorMap {
  std::array<double, 4> gain{};  // row-major 2x2
  Vec2 bias;
};
SensorMap true_sensor_map(Finger finger, const WorkspaceConfig& config);

/// Pixel at which the contact blob of a vial held at `offset` appears under zero load.
Vec2 tactile_blob_pixel(Finger finger, Vec2 offset, const WorkspaceConfig& config);

}  // namespace vialsim::simworld
