#include "vialsim/simworld/physics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace vialsim::simworld {
namespace {

constexpr double kGravity = 9.81;
constexpr double kVialMass = 0.015;
constexpr double kSnap = 1e-7;

void advance_reference(SceneState& s, const MotionCommand& command, double dt, double accel) {
  Vec3 desired{};
  const MoveTo* move = std::get_if<MoveTo>(&command);
  if (move != nullptr) {
    const Vec3 d = move->target - s.reference;
    const double dist = d.norm();
    if (dist > kSnap) {
      const double speed = std::min({move->speed, std::sqrt(2.0 * accel * dist), dist / dt});
      desired = d * (speed / dist);
    }
  } else if (const auto* descend = std::get_if<Descend>(&command)) {
    desired = {0.0, 0.0, -descend->speed};
  }

  Vec3 dv = desired - s.reference_velocity;
  const double dv_norm = dv.norm();
  const double limit = accel * dt;
  if (dv_norm > limit) dv = dv * (limit / dv_norm);
  s.reference_velocity = s.reference_velocity + dv;
  s.reference_accel = dv * (1.0 / dt);
  s.reference = s.reference + s.reference_velocity * dt;

  if (move != nullptr && (move->target - s.reference).norm() < kSnap &&
      s.reference_velocity.norm() <= limit) {
    s.reference = move->target;
    s.reference_velocity = {};
  }
}

// Resolves the gripper against whatever the held vial rests on.
void resolve_contact(SceneState& s) {
  s.grip.x = s.reference.x;
  s.grip.y = s.reference.y;
  if (!s.held) {
    s.grip.z = s.reference.z;
    s.contact = ContactState::None;
    s.contact_force = 0.0;
    return;
  }

  const double vh = s.vial.grip_height;
  const double rz = s.rack.height;
  const double bottom_prev = s.grip.z - vh;
  const double bottom_des = s.reference.z - vh;
  const Vec2 axis = vial_axis(s);

  double surface = 0.0;
  ContactState kind = ContactState::Table;
  if (inside_footprint(s, axis, s.vial.radius)) {
    const NearestSlot ns = nearest_slot(s, axis);
    const bool in_slot = s.contact == ContactState::Inserted;
    // resting on the top counts as above it; grip.z - vh can round a hair below rz
    const bool above = s.contact == ContactState::RackTop || bottom_prev >= rz;
    const bool enters = above && !s.occupied(ns.row, ns.col) && ns.distance <= clearance(s.rack, s.vial);
    if (in_slot || enters) {
      surface = rz - s.rack.slot_depth;
      kind = ContactState::Inserted;
    } else if (above) {
      surface = rz;
      kind = ContactState::RackTop;
    }
  }

  const double bottom = std::max(bottom_des, surface);
  s.grip.z = bottom + vh;
  if (bottom > bottom_des) {
    s.contact = kind;
    s.contact_force = 0.0;  // set by the caller from the penetration
  } else {
    s.contact = (kind == ContactState::Inserted && bottom < rz) ? ContactState::Inserted : ContactState::None;
    s.contact_force = 0.0;
  }
}

void apply_slip(SceneState& s, const WorkspaceConfig& config, double dt) {
  if (!s.held || s.contact != ContactState::RackTop || s.contact_force <= 0.0) return;
  const Vec2 axis = vial_axis(s);
  const NearestSlot ns = nearest_slot(s, axis);
  if (s.occupied(ns.row, ns.col)) return;
  if (ns.distance <= clearance(s.rack, s.vial) || ns.distance >= s.rack.slot_radius + s.vial.radius) return;

  const Vec2 centre = slot_center(s, ns.row, ns.col);
  const Vec2 away = (axis - centre) * (1.0 / ns.distance);
  const double lateral = config.contact.rim_ratio * s.contact_force;
  const double step = config.contact.slip_gain / friction(s, config) * lateral * dt;
  const double tf = config.contact.twist_fraction;
  s.held->offset += away * (step * (1.0 - tf));
  s.held->sway += away * (step * tf);

  if (s.held->offset.norm() > config.gripper.half_width) {
    const Vec2 lost_at = vial_axis(s);
    s.held.reset();
    s.dropped = PlacementResult{inside_footprint(s, lost_at, s.vial.radius) ? PlacementResult::Kind::RestingOnRack
                                                                           : PlacementResult::Kind::DroppedOnTable};
    s.contact = ContactState::None;
    s.contact_force = 0.0;
  }
}

}  // namespace

double friction(const SceneState& scene, const WorkspaceConfig& config) {
  return scene.fingertip == Fingertip::Tactile ? config.gripper.mu_tactile : config.gripper.mu_rubber;
}

Vec3 static_force(const SceneState& scene, const WorkspaceConfig& config) {
  const double mass = config.contact.payload_mass + (scene.held ? kVialMass : 0.0);
  const double g = config.contact.pose_bias_gain;
  return {g * scene.grip.y, -g * scene.grip.x, -mass * kGravity + g * (scene.grip.z - 0.1)};
}

ForceSample tick(SceneState& scene, const MotionCommand& command, double dt, const WorkspaceConfig& config,
                 RngStream& rng) {
  if (!(dt > 0.0)) throw InvalidArgument("tick: dt must be > 0");
  if (scene.release_timer > 0.0 && !std::holds_alternative<Hold>(command)) {
    throw std::logic_error("tick: motion commanded while a release is in progress");
  }

  advance_reference(scene, command, dt, config.motion.accel);
  resolve_contact(scene);
  const double penetration = (scene.grip.z - scene.reference.z);
  if (scene.contact != ContactState::None && penetration > 0.0) {
    scene.contact_force = config.contact.stiffness * penetration;
  }
  apply_slip(scene, config, dt);

  const Vec3 bias = static_force(scene, config);
  const double mass = config.contact.payload_mass + (scene.held ? kVialMass : 0.0);
  const bool blocked = scene.contact_force > 0.0;
  const Vec3 inertial = blocked ? Vec3{} : scene.reference_accel * (-mass);
  const double sf = config.noise.force;
  ForceSample sample;
  sample.fx = bias.x + inertial.x + rng.normal(0.0, sf);
  sample.fy = bias.y + inertial.y + rng.normal(0.0, sf);
  sample.fz = bias.z + inertial.z + scene.contact_force + rng.normal(0.0, sf);

  scene.sim_clock += dt;
  scene.release_timer = std::max(0.0, scene.release_timer - dt);
  return sample;
}

PlacementResult release_and_evaluate(SceneState& scene, const WorkspaceConfig& config) {
  if (!scene.held) throw std::logic_error("release_and_evaluate: no vial held");
  const Vec2 axis = vial_axis(scene);
  PlacementResult result;
  if (scene.contact == ContactState::Inserted) {
    const NearestSlot ns = nearest_slot(scene, axis);
    result = {PlacementResult::Kind::Inserted, ns.row, ns.col};
    scene.set_occupied(ns.row, ns.col, true);
  } else if (scene.contact == ContactState::RackTop || inside_footprint(scene, axis, scene.vial.radius)) {
    result.kind = PlacementResult::Kind::RestingOnRack;
  } else {
    result.kind = PlacementResult::Kind::DroppedOnTable;
  }
  scene.held.reset();
  scene.gripper_closed = false;
  scene.contact = ContactState::None;
  scene.contact_force = 0.0;
  scene.release_timer = config.timing.release;
  return result;
}

Vec3 source_grip_position(const WorkspaceConfig& config) {
  return {config.workspace.source_x, config.workspace.source_y, config.vial.grip_height};
}

SceneState reset_trial(const WorkspaceConfig& config, RngStream& rng, Fingertip fingertip) {
  const auto& cam = config.camera;
  const auto& ws = config.workspace;
  const auto& k = cam.intrinsics;
  const double depth = cam.home.z - config.rack.height;
  const double fov_x = std::min(k.cx, k.width - k.cx) / k.fx * depth;
  const double fov_y = std::min(k.cy, k.height - k.cy) / k.fy * depth;
  const double half_diag = 0.5 * std::hypot(config.rack.footprint_w, config.rack.footprint_h);
  const double reach_x = std::max(ws.x_max - cam.home.x, cam.home.x - ws.x_min) + half_diag;
  const double reach_y = std::max(ws.y_max - cam.home.y, cam.home.y - ws.y_min) + half_diag;
  if (reach_x > fov_x || reach_y > fov_y) {
    throw InvalidArgument("reset_trial: workspace too small for rack (rack can leave the camera view)");
  }

  SceneState s;
  s.rack = config.rack;
  s.vial = config.vial;
  s.fingertip = fingertip;
  s.rack_pose.x = rng.uniform(ws.x_min, ws.x_max);
  s.rack_pose.y = rng.uniform(ws.y_min, ws.y_max);
  s.rack_pose.yaw = rng.uniform(-ws.yaw_range, ws.yaw_range);

  const int slots = config.rack.rows * config.rack.cols;
  s.occupancy.assign(static_cast<std::size_t>(slots), 0);
  for (auto& o : s.occupancy) o = rng.bernoulli(ws.occupancy) ? 1 : 0;
  if (ws.occupancy < 1.0 && s.vacant_count() == 0) {
    s.occupancy[static_cast<std::size_t>(rng.uniform_int(0, slots - 1))] = 0;
  }

  const double table_fov_x = std::min(k.cx, k.width - k.cx) / k.fx * cam.home.z;
  const double table_fov_y = std::min(k.cy, k.height - k.cy) / k.fy * cam.home.z;
  for (int i = 0; i < ws.distractors; ++i) {
    Distractor d;
    d.kind = static_cast<Distractor::Kind>(rng.uniform_int(0, 2));
    switch (d.kind) {
      case Distractor::Kind::Disk:
        d.radius = rng.uniform(0.004, 0.014);
        break;
      case Distractor::Kind::Ring:
        d.radius = rng.uniform(0.005, 0.014);
        d.width = rng.uniform(0.0015, 0.003);
        break;
      case Distractor::Kind::Bar:
        d.radius = rng.uniform(0.01, 0.04);
        d.width = rng.uniform(0.002, 0.006);
        d.angle = rng.uniform(0.0, std::numbers::pi);
        break;
    }
    d.intensity = rng.uniform(30.0, 230.0);
    bool placed = false;
    for (int attempt = 0; attempt < 30 && !placed; ++attempt) {
      d.center = {cam.home.x + rng.uniform(-table_fov_x, table_fov_x),
                  cam.home.y + rng.uniform(-table_fov_y, table_fov_y)};
      const double gap = Vec2{d.center.x - s.rack_pose.x, d.center.y - s.rack_pose.y}.norm();
      placed = gap > half_diag + d.radius + 0.003;
    }
    if (placed) s.distractors.push_back(d);
  }

  const double sg = config.noise.grasp;
  s.pending_grasp.offset = {rng.normal(0.0, sg), rng.normal(0.0, sg)};
  const Vec2 tilt{rng.normal(0.0, config.noise.tilt), rng.normal(0.0, config.noise.tilt)};
  const double mu = fingertip == Fingertip::Tactile ? config.gripper.mu_tactile : config.gripper.mu_rubber;
  const double looseness = std::max(0.0, config.gripper.mu_rubber / mu - 1.0);
  s.pending_grasp.sway = tilt * looseness;
  s.camera_bias = {rng.normal(0.0, config.noise.visual_bias), rng.normal(0.0, config.noise.visual_bias)};

  s.grip = {cam.home.x, cam.home.y, cam.home.z - cam.mount_dz, 0.0};
  s.reference = {s.grip.x, s.grip.y, s.grip.z};
  return s;
}

void grasp(SceneState& scene) {
  if (scene.held) throw std::logic_error("grasp: a vial is already held");
  scene.held = scene.pending_grasp;
  scene.gripper_closed = true;
  scene.dropped.reset();
}

SensorMap true_sensor_map(Finger finger, const WorkspaceConfig& config) {
  const auto& t = config.tactile;
  const double sx = t.width / t.px_per_m;
  const double sy = t.height / t.px_per_m;
  SensorMap m;
  if (finger == Finger::Left) {
    m.gain = {sx, 0.0, 0.0, sy};
    m.bias = {-0.5 * sx, -0.5 * sy};
  } else {
    m.gain = {-sx, 0.0, 0.0, sy};
    m.bias = {0.5 * sx, -0.5 * sy};
  }
  return m;
}

Vec2 tactile_blob_pixel(Finger finger, Vec2 offset, const WorkspaceConfig& config) {
  const SensorMap m = true_sensor_map(finger, config);
  const double nu = (offset.x - m.bias.x) / m.gain[0];
  const double nv = (offset.y - m.bias.y) / m.gain[3];
  return {nu * config.tactile.width, nv * config.tactile.height};
}

TactileFrame sample_tactile(const SceneState& scene, Finger finger, const WorkspaceConfig& config, RngStream& rng) {
  const auto& t = config.tactile;
  const double phase = finger == Finger::Left ? 0.0 : 1.1;
  const bool contact = scene.held && scene.gripper_closed;
  Vec2 centre;
  double r2 = -1.0;
  if (contact) {
    centre = tactile_blob_pixel(finger, scene.held->offset, config);
    centre.y += t.shear_gain * scene.contact_force;
    const double r = 0.5 * t.blob_diameter;
    r2 = r * r;
  }

  TactileFrame frame(t.width, t.height);
  const bool noisy = config.noise.tactile > 0.0;
  PixelNoise noise(noisy ? rng.next_u64() : 0, config.noise.tactile);
  for (int y = 0; y < t.height; ++y) {
    const double row_term = 12.0 * std::sin(0.09 * y + phase);
    for (int x = 0; x < t.width; ++x) {
      double value = 95.0 + 25.0 * x / t.width + row_term;
      if (contact) {
        const double dx = x - centre.x;
        const double dy = y - centre.y;
        if (dx * dx + dy * dy <= r2) value += t.blob_intensity;
      }
      if (noisy) value += noise();
      frame.at(x, y) = to_gray(value);
    }
  }
  return frame;
}

}  // namespace vialsim::simworld
