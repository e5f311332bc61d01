#include "vialsim/simworld/render.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "vialsim/core/rng.hpp"

namespace vialsim::simworld {
namespace {

// Gray levels of the synthetic scene.
constexpr double kRackSurface = 160.0;
constexpr double kRackEdge = 132.0;
constexpr double kRimShadow = 35.0;
constexpr double kSlotFloor = 215.0;
constexpr double kCapBase = 118.0;
constexpr double kCapRing = 185.0;
constexpr double kCapCentre = 88.0;
constexpr double kTableBase = 82.0;

Vec3 rotate(const Vec3& d, double tx, double ty) {
  // Rx(tx) then Ry(ty).
  const double cx = std::cos(tx), sx = std::sin(tx);
  const double cy = std::cos(ty), sy = std::sin(ty);
  const Vec3 a{d.x, cx * d.y - sx * d.z, sx * d.y + cx * d.z};
  return {cy * a.x + sy * a.z, a.y, -sy * a.x + cy * a.z};
}

Vec3 rotate_inverse(const Vec3& d, double tx, double ty) {
  const double cx = std::cos(tx), sx = std::sin(tx);
  const double cy = std::cos(ty), sy = std::sin(ty);
  const Vec3 a{cy * d.x - sy * d.z, d.y, sy * d.x + cy * d.z};
  return {a.x, cx * a.y + sx * a.z, -sx * a.y + cx * a.z};
}

struct RackShader {
  const SceneState& scene;
  double cos_yaw;
  double sin_yaw;

  explicit RackShader(const SceneState& s)
      : scene(s), cos_yaw(std::cos(s.rack_pose.yaw)), sin_yaw(std::sin(s.rack_pose.yaw)) {}

  // Returns a negative value when p lies outside the footprint.
  double shade(double px, double py) const {
    const auto& r = scene.rack;
    const double dx = px - scene.rack_pose.x;
    const double dy = py - scene.rack_pose.y;
    const double qx = cos_yaw * dx + sin_yaw * dy;
    const double qy = -sin_yaw * dx + cos_yaw * dy;
    const double hw = 0.5 * r.footprint_w;
    const double hh = 0.5 * r.footprint_h;
    if (std::abs(qx) > hw || std::abs(qy) > hh) return -1.0;
    if (std::abs(qx) > hw - 0.0015 || std::abs(qy) > hh - 0.0015) return kRackEdge;

    const int col = std::clamp(static_cast<int>(std::lround(qx / r.pitch + 0.5 * (r.cols - 1))), 0, r.cols - 1);
    const int row = std::clamp(static_cast<int>(std::lround(qy / r.pitch + 0.5 * (r.rows - 1))), 0, r.rows - 1);
    const double lx = (col - 0.5 * (r.cols - 1)) * r.pitch;
    const double ly = (row - 0.5 * (r.rows - 1)) * r.pitch;
    const double d = std::hypot(qx - lx, qy - ly);
    if (d >= r.slot_radius) {
      return kRackSurface + 4.0 * std::sin(qx * 410.0) * std::sin(qy * 370.0);
    }
    if (scene.occupied(row, col)) {
      const double vr = scene.vial.radius;
      if (d >= vr) return kRimShadow;
      const double rel = d / vr;
      if (rel < 0.22) return kCapCentre;
      if (rel > 0.5 && rel < 0.68) return kCapRing;
      return kCapBase;
    }
    return d >= 0.8 * r.slot_radius ? kRimShadow : kSlotFloor;
  }
};

struct TableShader {
  struct Item {
    const Distractor* d;
    double c, s;
  };
  std::vector<Item> items;

  explicit TableShader(const SceneState& scene) {
    for (const auto& d : scene.distractors) items.push_back({&d, std::cos(d.angle), std::sin(d.angle)});
  }

  double shade(double x, double y) const {
    double value = kTableBase + 8.0 * std::sin(x * 25.0 + 1.3) * std::cos(y * 31.0);
    for (const auto& it : items) {
      const Distractor& d = *it.d;
      const double dx = x - d.center.x;
      const double dy = y - d.center.y;
      switch (d.kind) {
        case Distractor::Kind::Disk:
          if (dx * dx + dy * dy < d.radius * d.radius) value = d.intensity;
          break;
        case Distractor::Kind::Ring: {
          const double r2 = dx * dx + dy * dy;
          const double inner = d.radius - d.width;
          if (r2 < d.radius * d.radius && r2 >= inner * inner) value = d.intensity;
          break;
        }
        case Distractor::Kind::Bar: {
          const double lx = it.c * dx + it.s * dy;
          const double ly = -it.s * dx + it.c * dy;
          if (std::abs(lx) <= d.radius && std::abs(ly) <= d.width) value = d.intensity;
          break;
        }
      }
    }
    return value;
  }
};

}  // namespace

Vec3 CameraModel::ray(double u, double v) const {
  const Vec3 nominal{(u - intrinsics.cx) / intrinsics.fx, (v - intrinsics.cy) / intrinsics.fy, -1.0};
  return rotate(nominal, tilt_x, tilt_y);
}

std::optional<Vec3> CameraModel::intersect(double u, double v, double plane_z) const {
  const Vec3 d = ray(u, v);
  if (d.z >= 0.0) return std::nullopt;
  const double t = (plane_z - pose.z) / d.z;
  if (t <= 0.0) return std::nullopt;
  return Vec3{pose.x + t * d.x, pose.y + t * d.y, plane_z};
}

std::optional<Vec2> CameraModel::project(const Vec3& p) const {
  const Vec3 d = rotate_inverse(p - Vec3{pose.x, pose.y, pose.z}, tilt_x, tilt_y);
  if (d.z >= 0.0) return std::nullopt;
  const double a = d.x / -d.z;
  const double b = d.y / -d.z;
  return Vec2{intrinsics.cx + intrinsics.fx * a, intrinsics.cy + intrinsics.fy * b};
}

CameraModel true_camera(const SceneState& scene, const Pose3& cam_pose, const CameraIntrinsics& intrinsics,
                        const RenderOptions& options) {
  CameraModel cam;
  cam.pose = cam_pose;
  cam.pose.x += scene.camera_bias.x;
  cam.pose.y += scene.camera_bias.y;
  cam.intrinsics = intrinsics;
  cam.tilt_x = options.tilt_x;
  cam.tilt_y = options.tilt_y;
  return cam;
}

Image render_topdown(const SceneState& scene, const Pose3& cam_pose, const CameraIntrinsics& intrinsics,
                     const RenderOptions& options) {
  if (cam_pose.z <= scene.rack.height) {
    throw InvalidArgument("render_topdown: camera must be above the rack top");
  }
  const CameraModel cam = true_camera(scene, cam_pose, intrinsics, options);
  const RackShader rack(scene);
  const TableShader table(scene);
  const int ss = std::max(1, options.supersample);
  const double inv = 1.0 / (ss * ss);
  const double rz = scene.rack.height;

  Image img(intrinsics.width, intrinsics.height);
  // rays are affine in (u, v)
  const Vec3 origin_dir = cam.ray(0.0, 0.0);
  const Vec3 du = cam.ray(1.0, 0.0) - origin_dir;
  const Vec3 dv = cam.ray(0.0, 1.0) - origin_dir;
  PixelNoise noise(options.noise_seed, options.pixel_noise);
  for (int v = 0; v < intrinsics.height; ++v) {
    for (int u = 0; u < intrinsics.width; ++u) {
      double acc = 0.0;
      for (int sy = 0; sy < ss; ++sy) {
        for (int sx = 0; sx < ss; ++sx) {
          const double su = u + (sx + 0.5) / ss - 0.5;
          const double sv = v + (sy + 0.5) / ss - 0.5;
          const Vec3 d = origin_dir + du * su + dv * sv;
          const double t_top = (rz - cam.pose.z) / d.z;
          const double shade = rack.shade(cam.pose.x + t_top * d.x, cam.pose.y + t_top * d.y);
          if (shade >= 0.0) {
            acc += shade;
          } else {
            const double t0 = -cam.pose.z / d.z;
            acc += table.shade(cam.pose.x + t0 * d.x, cam.pose.y + t0 * d.y);
          }
        }
      }
      double value = acc * inv;
      if (options.pixel_noise > 0.0) value += noise();
      img.at(u, v) = to_gray(value);
    }
  }
  return img;
}

Shot capture(const SceneState& scene, const Pose3& cam_pose, const WorkspaceConfig& config, RngStream& rng) {
  RenderOptions options;
  options.tilt_x = config.camera.mount_tilt_x + rng.normal(0.0, config.noise.detection);
  options.tilt_y = config.camera.mount_tilt_y + rng.normal(0.0, config.noise.detection);
  options.pixel_noise = config.camera.pixel_noise;
  options.noise_seed = rng.next_u64();
  Shot shot;
  shot.commanded = cam_pose;
  shot.truth = true_camera(scene, cam_pose, config.camera.intrinsics, options);
  shot.image = render_topdown(scene, cam_pose, config.camera.intrinsics, options);
  return shot;
}

Vec2 project_point(const Vec3& p, const Pose3& cam, const CameraIntrinsics& k) {
  const double depth = cam.z - p.z;
  return {k.cx + k.fx * (p.x - cam.x) / depth, k.cy + k.fy * (p.y - cam.y) / depth};
}

}  // namespace vialsim::simworld
