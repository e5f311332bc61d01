#pragma once

#include <cstdint>
#include <optional>

#include "vialsim/core/config.hpp"
#include "vialsim/core/image.hpp"
#include "vialsim/core/rng.hpp"
#include "vialsim/core/types.hpp"
#include "vialsim/simworld/scene.hpp"

namespace vialsim::simworld {

/// Pinhole camera looking down -z. Image +u maps to world +x and +v to
/// world +y; small tilts rotate the viewing direction about x and y.
struct CameraModel {
  Pose3 pose;
  CameraIntrinsics intrinsics;
  double tilt_x = 0.0;
  double tilt_y = 0.0;

  /// Base-frame direction of the ray through pixel (u, v).
  Vec3 ray(double u, double v) const;
  /// Intersection of the pixel ray with the horizontal plane z = plane_z.
  std::optional<Vec3> intersect(double u, double v, double plane_z) const;
  /// Pixel at which a base-frame point appears.
  std::optional<Vec2> project(const Vec3& p) const;
};

struct RenderOptions {
  double tilt_x = 0.0;  // pointing error of this shot (rad)
  double tilt_y = 0.0;
  double pixel_noise = 0.0;
  std::uint64_t noise_seed = 0;
  int supersample = 2;
};

/// The camera that actually takes a shot commanded at `cam_pose`, including
/// the scene's calibration bias and the shot's pointing error.
CameraModel true_camera(const SceneState& scene, const Pose3& cam_pose, const CameraIntrinsics& intrinsics,
                        const RenderOptions& options);

/// Renders the top-down camera view of the workspace. Deterministic in
/// (scene, cam_pose, intrinsics, options). Throws InvalidArgument when the
/// camera is not above the rack.
Image render_topdown(const SceneState& scene, const Pose3& cam_pose, const CameraIntrinsics& intrinsics,
                     const RenderOptions& options = {});

/// One camera exposure as the controllers see it: the image plus the camera
/// that really took it (hidden from perception, used for ground truth).
struct Shot {
  Image image;
  Pose3 commanded;
  CameraModel truth;
};

/// Takes a picture from the commanded camera pose: applies the scene's
/// calibration bias, the fixed mount tilt, a fresh pointing jitter and pixel
/// noise drawn from `rng`.
Shot capture(const SceneState& scene, const Pose3& cam_pose, const WorkspaceConfig& config, RngStream& rng);

/// Ideal straight-down projection of a base-frame point, the forward model
/// that pixel-to-world inverts.
Vec2 project_point(const Vec3& p, const Pose3& cam, const CameraIntrinsics& intrinsics);

}  // namespace vialsim::simworld
