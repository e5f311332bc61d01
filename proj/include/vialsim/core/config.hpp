#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "vialsim/core/types.hpp"

namespace vialsim {

enum class ForceAxis { Vector, Z };
enum class TactileFusion { Average, Max };

struct CameraConfig {
  CameraIntrinsics intrinsics;
  Pose3 home{0.0, 0.0, 0.35, 0.0};  // camera pose at the start of every trial
  double mount_dz = 0.10;            // camera height above the gripper tip
  double mount_tilt_x = 0.0;         // fixed mount tilt (rad)
  double mount_tilt_y = 0.0;
  double pixel_noise = 3.0;          // gray levels
  double refine_factor = 0.5;        // camera-to-rack distance kept when lowering
};

struct WorkspaceBounds {
  double x_min = -0.06;
  double x_max = 0.06;
  double y_min = -0.04;
  double y_max = 0.04;
  double yaw_range = 0.35;  // rack yaw drawn from [-yaw_range, yaw_range]
  double occupancy = 0.4;   // probability that a slot is occupied
  int distractors = 12;     // clutter objects on the table
  double source_x = 0.25;   // vial collection point
  double source_y = 0.0;
};

struct NoiseConfig {
  double visual_bias = 0.0012;  // sigma_b (m), per-trial camera-gripper calibration error
  double detection = 0.0020;    // sigma_d (rad), per-shot camera pointing jitter
  double force = 0.3;           // sigma_f (N)
  double tactile = 2.0;         // sigma_t (gray levels)
  double grasp = 0.0004;        // sigma of the in-gripper offset at grasp (m)
  double tilt = 0.00035;        // sway of the vial bottom per unit of (mu_rubber/mu - 1) (m)
};

struct ContactConfig {
  double stiffness = 2000.0;     // N/m of commanded penetration
  double slip_gain = 2.0e-4;     // m/(N s) at mu = 1
  double rim_ratio = 0.5;        // lateral rim reaction per unit normal force
  double twist_fraction = 0.4;   // share of slip that twists the vial rather than translating it
  double payload_mass = 1.2;     // kg carried by the wrist sensor
  double pose_bias_gain = 1.5;   // N/m, pose-dependent part of the static force
};

struct GripperConfig {
  double mu_rubber = 1.0;
  double mu_tactile = 0.4;
  double half_width = 0.006;  // in-gripper offset at which the vial is lost
};

struct ForceConfig {
  double rate = 125.0;        // Hz
  double buffer_seconds = 1.0;
  double threshold = 0.2;     // fractional deviation
  double floor = 0.5;         // N, lower bound on the baseline magnitude
  ForceAxis axis = ForceAxis::Vector;
};

struct TactileConfig {
  double rate = 60.0;
  int width = 160;
  int height = 120;
  double px_per_m = 10000.0;
  double blob_diameter = 30.0;  // px
  double blob_intensity = 60.0;
  double shear_gain = 0.8;      // px per N of contact load
  double threshold = 0.35;      // t
  double min_area = 25.0;       // px^2
  double stop_px = 8.0;
  int references = 5;
  TactileFusion fusion = TactileFusion::Average;
};

struct SearchConfig {
  double spacing = 0.0025;     // S
  double lift_clearance = 0.010;
};

struct MotionConfig {
  double speed = 0.15;          // m/s, lateral and transfer moves
  double descent_speed = 0.010;
  double accel = 0.5;           // m/s^2
  double approach_gap = 0.006;  // vial bottom height above the rack top before descent
  double visual_floor = 0.005;  // open-loop descent ends this far below the rack top
};

struct TimingConfig {
  double imaging = 2.0;
  double grasp = 1.0;
  double release = 1.0;
  double baseline = 1.0;
};

struct PerceptionConfig {
  double theta_rack = 0.5;
  double theta_occ = 0.5;
  double tie_eps = 1e-6;
  double vote_fraction = 0.4;
  double edge_threshold = 40.0;   // Sobel magnitude
  double radius_low = 0.75;       // radius search range relative to the expected slot radius
  double radius_high = 1.2;
  double crop_margin = 1.10;
  int crop_size = 32;
};

struct TrainingConfig {
  double learning_rate = 0.01;
  double momentum = 0.9;
  int epochs = 20;
  int batch = 32;
  int scenes = 240;               // scenes rendered for the training set
  double refined_fraction = 0.3;  // share of scenes imaged from the lowered camera
};

struct ControlConfig {
  bool release_on_exhausted = true;
};

struct WorkspaceConfig {
  CameraConfig camera;
  RackSpec rack;
  VialSpec vial;
  WorkspaceBounds workspace;
  NoiseConfig noise;
  ContactConfig contact;
  GripperConfig gripper;
  ForceConfig force;
  TactileConfig tactile;
  SearchConfig search;
  MotionConfig motion;
  TimingConfig timing;
  PerceptionConfig perception;
  TrainingConfig training;
  ControlConfig control;
  std::uint64_t seed = 42;
};

/// Parses a flat `section.key = value` document. Omitted keys keep their
/// defaults. Blank lines and `#` comments are ignored.
WorkspaceConfig load_config(std::string_view text);
WorkspaceConfig load_config_file(const std::string& path);

/// Applies `key=value` overrides on top of an existing config and revalidates.
void apply_overrides(WorkspaceConfig& config, const std::vector<std::string>& overrides);

/// Throws ConfigError naming the first offending key.
void validate(const WorkspaceConfig& config);

/// Emits every documented key, one per line, in schema order.
std::string serialize(const WorkspaceConfig& config);

/// Documented keys in schema order.
std::vector<std::string> config_keys();

bool operator==(const WorkspaceConfig& a, const WorkspaceConfig& b);

}  // namespace vialsim
