#include "vialsim/perception/projection.hpp"

namespace vialsim::perception {

Vec3 pixel_to_world(double u, double v, const CameraIntrinsics& k, const Pose3& cam, double r_z) {
  if (!(cam.z > r_z)) throw InvalidArgument("pixel_to_world: camera must be above the rack top");
  const double depth = cam.z - r_z;
  return {cam.x + (u - k.cx) * depth / k.fx, cam.y + (v - k.cy) * depth / k.fy, r_z};
}

}  // namespace vialsim::perception
