#pragma once

#include "vialsim/core/types.hpp"

namespace vialsim::perception {

/// Back-projects pixel (u, v) onto the rack-top plane z = r_z for a camera
/// looking straight down from `cam`. Throws InvalidArgument when cam.z <= r_z.
Vec3 pixel_to_world(double u, double v, const CameraIntrinsics& intrinsics, const Pose3& cam, double r_z);

}  // namespace vialsim::perception
