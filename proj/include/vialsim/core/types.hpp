#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace vialsim {

/// Raised for configuration documents that cannot be parsed or fail validation.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when an operation's precondition is violated by its inputs.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2& operator+=(const Vec2& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  bool operator==(const Vec2&) const = default;

  double norm() const { return std::hypot(x, y); }
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  bool operator==(const Vec3&) const = default;

  double norm() const { return std::sqrt(x * x + y * y + z * z); }
};

struct CameraIntrinsics {
  double fx = 450.0;
  double fy = 450.0;
  double cx = 240.0;
  double cy = 180.0;
  int width = 480;
  int height = 360;

  bool operator==(const CameraIntrinsics&) const = default;
};

/// Position in the robot base frame (m) plus rotation about +z (rad).
struct Pose3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double yaw = 0.0;

  Vec2 xy() const { return {x, y}; }
  bool operator==(const Pose3&) const = default;
};

struct RackSpec {
  int rows = 4;
  int cols = 6;
  double pitch = 0.020;
  double slot_radius = 0.0085;
  double height = 0.030;  // r_z, rack top above the table
  double slot_depth = 0.010;
  double footprint_w = 0.130;
  double footprint_h = 0.090;

  bool operator==(const RackSpec&) const = default;
};

struct VialSpec {
  double radius = 0.007;
  double height = 0.040;
  double grip_height = 0.012;  // V_h, vial bottom to grip point

  bool operator==(const VialSpec&) const = default;
};

inline double clearance(const RackSpec& rack, const VialSpec& vial) {
  return rack.slot_radius - vial.radius;
}

}  // namespace vialsim
