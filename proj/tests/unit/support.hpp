#pragma once

// Scripted scenes shared by the unit suites.

#include <algorithm>

#include "vialsim/core/config.hpp"
#include "vialsim/simworld/physics.hpp"

namespace testing {

using namespace vialsim;
using namespace vialsim::simworld;

inline constexpr double kDt = 1.0 / 125.0;

inline WorkspaceConfig quiet_config() {
  WorkspaceConfig c;
  c.noise.visual_bias = 0.0;
  c.noise.detection = 0.0;
  c.noise.force = 0.0;
  c.noise.tactile = 0.0;
  c.noise.grasp = 0.0;
  c.noise.tilt = 0.0;
  c.camera.pixel_noise = 0.0;
  return c;
}

/// Unrotated rack at the origin, every slot vacant, no clutter, vial held at `offset`.
inline SceneState held_scene(const WorkspaceConfig& c, Vec2 offset = {}, Fingertip tip = Fingertip::Rubber) {
  RngStream rng(1);
  SceneState s = reset_trial(c, rng, tip);
  s.rack_pose = {};
  std::fill(s.occupancy.begin(), s.occupancy.end(), 0);
  s.distractors.clear();
  s.camera_bias = {};
  s.pending_grasp = {offset, {}};
  grasp(s);
  return s;
}

/// Teleports the gripper so the vial axis sits over `axis` with its bottom `gap` above the rack top.
inline void hover(SceneState& s, Vec2 axis, double gap = 0.002) {
  const Vec2 o = s.held ? s.held->offset + s.held->sway : Vec2{};
  const double z = s.rack.height + s.vial.grip_height + gap;
  s.grip = {axis.x - o.x, axis.y - o.y, z, 0.0};
  s.reference = {s.grip.x, s.grip.y, z};
  s.reference_velocity = {};
  s.reference_accel = {};
  s.contact = ContactState::None;
  s.contact_force = 0.0;
}

/// Descends for `ticks` ticks at the configured descent speed.
inline void descend(SceneState& s, const WorkspaceConfig& c, RngStream& rng, int ticks) {
  for (int i = 0; i < ticks && s.held; ++i) tick(s, Descend{c.motion.descent_speed}, kDt, c, rng);
}

}  // namespace testing
