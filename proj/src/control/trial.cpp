#include "vialsim/control/trial.hpp"

#include <array>
#include <cmath>
#include <deque>
#include <functional>
#include <memory>

#include "vialsim/force/monitor.hpp"
#include "vialsim/perception/hough.hpp"
#include "vialsim/perception/projection.hpp"
#include "vialsim/tactile/tracker.hpp"

namespace vialsim::control {

using simworld::SceneState;
using perception::ScoredCandidate;

std::string to_string(Modality m) {
  switch (m) {
    case Modality::Visual: return "visual";
    case Modality::Force: return "force";
    case Modality::Tactile: return "tactile";
  }
  return "unknown";
}

Modality parse_modality(const std::string& name) {
  if (name == "visual") return Modality::Visual;
  if (name == "force") return Modality::Force;
  if (name == "tactile") return Modality::Tactile;
  throw InvalidArgument("unknown modality '" + name + "' (expected visual, force or tactile)");
}

std::string to_string(AttemptResult r) {
  switch (r) {
    case AttemptResult::Inserted: return "inserted";
    case AttemptResult::RackTopContact: return "rack_top_contact";
    case AttemptResult::SafetyStop: return "safety_stop";
    case AttemptResult::OutOfBounds: return "out_of_bounds";
    case AttemptResult::LostContact: return "lost_contact";
  }
  return "unknown";
}

namespace {

AttemptResult parse_result(const std::string& s) {
  for (auto r : {AttemptResult::Inserted, AttemptResult::RackTopContact, AttemptResult::SafetyStop,
                 AttemptResult::OutOfBounds, AttemptResult::LostContact}) {
    if (to_string(r) == s) return r;
  }
  throw InvalidArgument("unknown attempt result '" + s + "'");
}

}  // namespace

nlohmann::json to_json(const TrialRecord& r) {
  nlohmann::json outcomes = nlohmann::json::array();
  for (const auto& o : r.outcomes) {
    outcomes.push_back({{"x", o.position.x}, {"y", o.position.y}, {"result", to_string(o.result)}});
  }
  return {{"modality", to_string(r.modality)},
          {"seed", r.seed},
          {"trial_index", r.trial_index},
          {"batch", r.batch},
          {"attempts", r.attempts},
          {"success", r.success},
          {"runtime_s", r.runtime_s},
          {"failure", r.failure},
          {"placement", r.placement},
          {"outcomes", outcomes},
          {"final_offset", {r.final_offset.x, r.final_offset.y}}};
}

TrialRecord record_from_json(const nlohmann::json& j) {
  TrialRecord r;
  r.modality = parse_modality(j.at("modality").get<std::string>());
  r.seed = j.at("seed").get<std::uint64_t>();
  r.trial_index = j.at("trial_index").get<std::uint64_t>();
  r.batch = j.at("batch").get<int>();
  r.attempts = j.at("attempts").get<int>();
  r.success = j.at("success").get<bool>();
  r.runtime_s = j.at("runtime_s").get<double>();
  r.failure = j.value("failure", "");
  r.placement = j.value("placement", "");
  for (const auto& o : j.at("outcomes")) {
    r.outcomes.push_back({{o.at("x").get<double>(), o.at("y").get<double>()},
                          parse_result(o.at("result").get<std::string>())});
  }
  const auto& off = j.at("final_offset");
  r.final_offset = {off.at(0).get<double>(), off.at(1).get<double>()};
  return r;
}

simworld::Fingertip fingertip_for(Modality modality) {
  return modality == Modality::Tactile ? simworld::Fingertip::Tactile : simworld::Fingertip::Rubber;
}

namespace {

// Thrown by Rig::step when the held vial slips out of the fingers.
struct VialLost {};

// Steps the simulated arm at the force sensor rate.
class Rig {
 public:
  Rig(SceneState& scene, const WorkspaceConfig& config, RngStream& rng)
      : scene(scene), config(config), rng(rng), dt(1.0 / config.force.rate) {}

  SceneState& scene;
  const WorkspaceConfig& config;
  RngStream& rng;
  const double dt;

  simworld::ForceSample step(const simworld::MotionCommand& cmd) {
    const bool had = scene.held.has_value();
    const auto sample = simworld::tick(scene, cmd, dt, config, rng);
    if (had && !scene.held) throw VialLost{};
    return sample;
  }

  std::vector<simworld::ForceSample> wait(double seconds) {
    const auto n = static_cast<int>(std::ceil(seconds / dt - 1e-9));
    std::vector<simworld::ForceSample> out;
    out.reserve(static_cast<std::size_t>(std::max(n, 0)));
    for (int k = 0; k < n; ++k) out.push_back(step(simworld::Hold{}));
    return out;
  }

  void move_to(const Vec3& target, double speed) {
    const double dist = (target - scene.reference).norm();
    const int limit = static_cast<int>(10.0 * (dist / speed + 2.0 * speed / config.motion.accel) / dt) + 2000;
    for (int k = 0; k < limit; ++k) {
      if (scene.reference == target && scene.reference_velocity == Vec3{}) return;
      step(simworld::MoveTo{target, speed});
    }
    throw std::logic_error("move_to: target not reached");
  }

  // Vertical then horizontal, so nothing is dragged across the rack.
  void lift_and_move(const Vec2& xy, double z) {
    if (scene.reference.z < z) move_to({scene.reference.x, scene.reference.y, z}, config.motion.speed);
    move_to({xy.x, xy.y, z}, config.motion.speed);
  }

  void settle() {
    for (int k = 0; k < 10000 && !(scene.reference_velocity == Vec3{}); ++k) step(simworld::Hold{});
  }

  double home_grip_z() const { return config.camera.home.z - config.camera.mount_dz; }
  double hover_z() const { return config.rack.height + config.vial.grip_height + config.search.lift_clearance; }
  double approach_z() const { return config.rack.height + config.vial.grip_height + config.motion.approach_gap; }
};

struct Detection {
  simworld::Shot shot;
  std::vector<perception::Candidate> candidates;
  std::vector<ScoredCandidate> scored;
  std::optional<ScoredCandidate> target;
  Vec2 world;
};

perception::SelectParams select_params(const WorkspaceConfig& c) {
  return {c.perception.theta_rack, c.perception.theta_occ, c.perception.tie_eps};
}

Detection image_and_select(Rig& rig, const TrialContext& ctx, const Pose3& cam_pose, perception::SelectMode mode) {
  const auto& c = ctx.config;
  rig.lift_and_move({cam_pose.x, cam_pose.y}, cam_pose.z - c.camera.mount_dz);
  Detection d;
  d.shot = simworld::capture(rig.scene, cam_pose, c, rig.rng);
  rig.wait(c.timing.imaging);
  const double depth = cam_pose.z - c.rack.height;
  d.candidates = perception::detect_circles(d.shot.image, perception::hough_params_for(c, depth));
  d.scored = ctx.scorer.score(d.shot, d.candidates, rig.scene);
  const auto& k = c.camera.intrinsics;
  d.target = perception::select_target(d.scored, mode, {k.cx, k.cy}, select_params(c), rig.rng);
  if (d.target) {
    const Vec3 w = perception::pixel_to_world(d.target->candidate.u, d.target->candidate.v, k, cam_pose, c.rack.height);
    d.world = {w.x, w.y};
  }
  return d;
}

void collect_vial(Rig& rig, const std::function<void()>& before_grasp = {}) {
  const auto& c = rig.config;
  const Vec3 source = simworld::source_grip_position(c);
  rig.lift_and_move({source.x, source.y}, rig.home_grip_z());
  rig.move_to(source, c.motion.speed);
  if (before_grasp) before_grasp();
  rig.wait(c.timing.grasp);
  simworld::grasp(rig.scene);
  rig.move_to({source.x, source.y, rig.home_grip_z()}, c.motion.speed);
}

simworld::PlacementResult release(Rig& rig) {
  rig.settle();
  auto placement = simworld::release_and_evaluate(rig.scene, rig.config);
  rig.wait(rig.config.timing.release);
  return placement;
}

AttemptResult result_of(const simworld::PlacementResult& p) {
  switch (p.kind) {
    case simworld::PlacementResult::Kind::Inserted: return AttemptResult::Inserted;
    case simworld::PlacementResult::Kind::RestingOnRack: return AttemptResult::RackTopContact;
    case simworld::PlacementResult::Kind::DroppedOnTable: return AttemptResult::OutOfBounds;
    case simworld::PlacementResult::Kind::StillHeld: return AttemptResult::RackTopContact;
  }
  return AttemptResult::RackTopContact;
}

TrialRecord begin(Modality m) {
  TrialRecord r;
  r.modality = m;
  return r;
}

void finish(TrialRecord& r, const SceneState& scene, const std::string& failure, const std::string& placement) {
  r.failure = failure;
  r.success = failure.empty();
  r.placement = placement;
  r.runtime_s = scene.sim_clock;
  r.final_offset = scene.held ? scene.held->offset : Vec2{};
}

void record_loss(TrialRecord& rec, const SceneState& scene, Vec2 at) {
  if (rec.outcomes.size() < static_cast<std::size_t>(rec.attempts)) {
    rec.outcomes.push_back({at, AttemptResult::LostContact});
  }
  const auto kind = scene.dropped ? scene.dropped->kind : simworld::PlacementResult::Kind::DroppedOnTable;
  finish(rec, scene, "lost_contact", simworld::to_string(kind));
}

// Stop logic that differs between the closed-loop modalities.
class Monitor {
 public:
  enum class Verdict { Continue, Stop, LostContact };
  virtual ~Monitor() = default;
  /// Called hovering above the nominal position; returns the gripper xy to descend at.
  virtual Vec2 prepare(Rig& rig, Vec2 nominal) = 0;
  /// Called stationary at the approach height, right before the descent.
  virtual void arm(Rig& rig) = 0;
  virtual Verdict on_tick(Rig& rig, const simworld::ForceSample& sample) = 0;
};

class ForceMonitor : public Monitor {
 public:
  explicit ForceMonitor(const WorkspaceConfig& c)
      : capacity_(force::buffer_capacity(c.force.rate, c.force.buffer_seconds)),
        params_{c.force.threshold, c.force.floor, c.force.axis} {}

  Vec2 prepare(Rig&, Vec2 nominal) override { return nominal; }

  void arm(Rig& rig) override {
    const double seconds = std::max(rig.config.timing.baseline, rig.config.force.buffer_seconds);
    auto samples = rig.wait(seconds);
    while (samples.size() < capacity_) samples.push_back(rig.step(simworld::Hold{}));
    auto init = force::init_baseline(samples, capacity_);
    buffer_ = std::make_unique<force::ForceBuffer>(std::move(init.buffer));
    baseline_ = init.baseline;
  }

  Verdict on_tick(Rig&, const simworld::ForceSample& sample) override {
    return force::update_and_check(*buffer_, sample, baseline_, params_) == force::ForceDecision::Stop
               ? Verdict::Stop
               : Verdict::Continue;
  }

 private:
  std::size_t capacity_;
  force::CheckParams params_;
  std::unique_ptr<force::ForceBuffer> buffer_;
  force::ForceBaseline baseline_;
};

class TactileMonitor : public Monitor {
 public:
  TactileMonitor(const WorkspaceConfig& c, const tactile::TactileCalibration& cal)
      : config_(c), calibration_(cal), params_{c.tactile.threshold, c.tactile.min_area} {}

  // Open-gripper references, captured before the grasp.
  void capture_references(Rig& rig) {
    for (int k = 0; k < config_.tactile.references; ++k) {
      for (std::size_t f = 0; f < 2; ++f) {
        references_[f].frames.push_back(simworld::sample_tactile(rig.scene, finger(f), config_, rig.rng));
      }
      rig.wait(1.0 / config_.tactile.rate);
    }
  }

  Vec2 prepare(Rig& rig, Vec2 nominal) override {
    neutral_ = tactile::capture_neutral(frames(rig), references_, params_);
    const auto offset = tactile::estimate_offset(neutral_, calibration_);
    return offset ? nominal - *offset : nominal;
  }

  void arm(Rig& rig) override { next_frame_ = rig.scene.sim_clock; }

  Verdict on_tick(Rig& rig, const simworld::ForceSample&) override {
    if (!neutral_.valid()) return Verdict::LostContact;
    if (rig.scene.sim_clock + 1e-12 < next_frame_) return Verdict::Continue;
    next_frame_ += 1.0 / config_.tactile.rate;
    const auto dev = tactile::track_deviation(neutral_, frames(rig), references_, calibration_, params_,
                                              config_.tactile.stop_px, config_.tactile.fusion);
    switch (dev.decision) {
      case tactile::TactileDecision::Stop: return Verdict::Stop;
      case tactile::TactileDecision::LostContact: return Verdict::LostContact;
      case tactile::TactileDecision::Continue: break;
    }
    return Verdict::Continue;
  }

 private:
  static simworld::Finger finger(std::size_t f) { return f == 0 ? simworld::Finger::Left : simworld::Finger::Right; }

  tactile::FramePair frames(Rig& rig) {
    return {simworld::sample_tactile(rig.scene, simworld::Finger::Left, config_, rig.rng),
            simworld::sample_tactile(rig.scene, simworld::Finger::Right, config_, rig.rng)};
  }

  const WorkspaceConfig& config_;
  const tactile::TactileCalibration& calibration_;
  tactile::PipelineParams params_;
  tactile::ReferencePair references_;
  tactile::NeutralState neutral_;
  double next_frame_ = 0.0;
};

std::vector<perception::Candidate> in_rack(const Detection& d, const WorkspaceConfig& c) {
  std::vector<perception::Candidate> out;
  for (const auto& s : d.scored) {
    if (s.p_in_rack >= c.perception.theta_rack) out.push_back(s.candidate);
  }
  return out;
}

// Descend-monitor-search loop shared by the force and tactile controllers.
void attempt_loop(Rig& rig, TrialRecord& rec, Monitor& monitor, Vec2 target, const SearchBounds& bounds,
                  Vec2& current) {
  const auto& c = rig.config;
  auto& scene = rig.scene;
  std::deque<Vec2> queue{target};
  std::optional<SearchState> search;

  while (true) {
    if (queue.empty()) {
      if (!search) {
        search = SearchState{};
        search->target = target;
        search->r_w = bounds.r_w;
        search->r_h = bounds.r_h;
        search->spacing = c.search.spacing;
      }
      const auto step = next_trial_positions(*search);
      if (step.exhausted) {
        if (c.control.release_on_exhausted) {
          rig.lift_and_move({scene.reference.x, scene.reference.y}, rig.hover_z());
          rig.move_to({scene.reference.x, scene.reference.y, rig.approach_z()}, c.motion.speed);
          const auto placement = release(rig);
          finish(rec, scene, placement.inserted() ? "" : "exhausted", simworld::to_string(placement.kind));
        } else {
          finish(rec, scene, "exhausted", "still_held");
        }
        return;
      }
      queue.insert(queue.end(), step.positions.begin(), step.positions.end());
    }
    const Vec2 nominal = queue.front();
    queue.pop_front();
    current = nominal;

    rig.lift_and_move(nominal, rig.hover_z());
    const Vec2 grip_xy = monitor.prepare(rig, nominal);
    rig.lift_and_move(grip_xy, rig.hover_z());
    rig.move_to({grip_xy.x, grip_xy.y, rig.approach_z()}, c.motion.speed);
    monitor.arm(rig);
    ++rec.attempts;

    const int max_ticks = static_cast<int>(2.0 * rig.approach_z() / c.motion.descent_speed / rig.dt) + 1000;
    bool decided = false;
    for (int k = 0; k < max_ticks && !decided; ++k) {
      const auto sample = rig.step(simworld::Descend{c.motion.descent_speed});
      if (force::safety_stop(scene.grip.z, c.rack.height)) {
        rig.settle();
        rec.outcomes.push_back({nominal, AttemptResult::SafetyStop});
        finish(rec, scene, "safety_stop", "still_held");
        return;
      }
      switch (monitor.on_tick(rig, sample)) {
        case Monitor::Verdict::Continue: break;
        case Monitor::Verdict::LostContact:
          rig.settle();
          rec.outcomes.push_back({nominal, AttemptResult::LostContact});
          finish(rec, scene, "lost_contact", scene.held ? "still_held" : "dropped_on_table");
          return;
        case Monitor::Verdict::Stop: {
          rig.settle();
          if (force::vial_placed(scene.grip.z, c.rack.height, c.vial.grip_height) ==
              force::Placement::InsertedBelowRackTop) {
            const auto placement = release(rig);
            rec.outcomes.push_back({nominal, result_of(placement)});
            finish(rec, scene, placement.inserted() ? "" : "released_off_slot", simworld::to_string(placement.kind));
            return;
          }
          rec.outcomes.push_back({nominal, AttemptResult::RackTopContact});
          decided = true;
          break;
        }
      }
    }
    if (!decided) {
      rig.settle();
      rec.outcomes.push_back({nominal, AttemptResult::SafetyStop});
      finish(rec, scene, "safety_stop", "still_held");
      return;
    }
  }
}

Pose3 refined_camera(const WorkspaceConfig& c, Vec2 xy) {
  const double rz = c.rack.height;
  return {xy.x, xy.y, rz + c.camera.refine_factor * (c.camera.home.z - rz), 0.0};
}

TrialRecord closed_loop(Modality m, SceneState& scene, const TrialContext& ctx, RngStream& rng, Monitor& monitor,
                        TactileMonitor* tactile_refs) {
  Rig rig(scene, ctx.config, rng);
  TrialRecord rec = begin(m);
  const auto d = image_and_select(rig, ctx, ctx.config.camera.home, perception::SelectMode::BestVacant);
  if (!d.target) {
    finish(rec, scene, "no_valid_slot", "none");
    return rec;
  }
  const auto bounds = compute_search_bounds(in_rack(d, ctx.config), d.target->candidate, ctx.config.camera.intrinsics,
                                            ctx.config.camera.home, ctx.config.rack.height, ctx.config.rack.pitch);
  if (tactile_refs != nullptr) {
    collect_vial(rig, [&] { tactile_refs->capture_references(rig); });
  } else {
    collect_vial(rig);
  }
  Vec2 current = d.world;
  try {
    attempt_loop(rig, rec, monitor, d.world, bounds, current);
  } catch (const VialLost&) {
    record_loss(rec, scene, current);
  }
  return rec;
}

}  // namespace

TrialRecord run_visual_trial(SceneState& scene, const TrialContext& ctx, RngStream& rng) {
  const auto& c = ctx.config;
  Rig rig(scene, c, rng);
  TrialRecord rec = begin(Modality::Visual);

  const auto first = image_and_select(rig, ctx, c.camera.home, perception::SelectMode::BestVacant);
  if (!first.target) {
    finish(rec, scene, "no_valid_slot", "none");
    return rec;
  }
  collect_vial(rig);

  const Pose3 low = refined_camera(c, first.world);
  const auto second = image_and_select(rig, ctx, low, perception::SelectMode::NearestCenter);
  if (!second.target) {
    finish(rec, scene, "no_valid_slot", "still_held");
    return rec;
  }

  const Vec2 p = second.world;
  rig.lift_and_move(p, rig.hover_z());
  rig.move_to({p.x, p.y, rig.approach_z()}, c.motion.speed);
  ++rec.attempts;
  const double floor_z = c.rack.height - c.motion.visual_floor + c.vial.grip_height;
  simworld::PlacementResult placement;
  try {
    rig.move_to({p.x, p.y, floor_z}, c.motion.descent_speed);
    placement = release(rig);
  } catch (const VialLost&) {
    record_loss(rec, scene, p);
    return rec;
  }
  rec.outcomes.push_back({p, result_of(placement)});
  finish(rec, scene, placement.inserted() ? "" : simworld::to_string(placement.kind),
         simworld::to_string(placement.kind));
  return rec;
}

TrialRecord run_force_trial(SceneState& scene, const TrialContext& ctx, RngStream& rng) {
  ForceMonitor monitor(ctx.config);
  return closed_loop(Modality::Force, scene, ctx, rng, monitor, nullptr);
}

TrialRecord run_tactile_trial(SceneState& scene, const TrialContext& ctx, RngStream& rng) {
  if (ctx.calibration == nullptr) throw InvalidArgument("run_tactile_trial: tactile calibration required");
  TactileMonitor monitor(ctx.config, *ctx.calibration);
  return closed_loop(Modality::Tactile, scene, ctx, rng, monitor, &monitor);
}

TrialRecord run_trial(Modality modality, SceneState& scene, const TrialContext& ctx, RngStream& rng) {
  switch (modality) {
    case Modality::Visual: return run_visual_trial(scene, ctx, rng);
    case Modality::Force: return run_force_trial(scene, ctx, rng);
    case Modality::Tactile: return run_tactile_trial(scene, ctx, rng);
  }
  throw InvalidArgument("run_trial: unknown modality");
}

tactile::TactileCalibration calibrate_tactile_sim(const WorkspaceConfig& config, RngStream& rng) {
  SceneState scene = simworld::reset_trial(config, rng, simworld::Fingertip::Tactile);
  scene.held.reset();
  scene.gripper_closed = false;
  const tactile::PipelineParams params{config.tactile.threshold, config.tactile.min_area};

  tactile::ReferencePair refs;
  for (int k = 0; k < config.tactile.references; ++k) {
    refs[0].frames.push_back(simworld::sample_tactile(scene, simworld::Finger::Left, config, rng));
    refs[1].frames.push_back(simworld::sample_tactile(scene, simworld::Finger::Right, config, rng));
  }

  // Known offsets on a grid that keeps the blob fully on the sensor.
  const double reach = 0.5 * std::min(config.tactile.width, config.tactile.height) / config.tactile.px_per_m -
                       config.tactile.blob_diameter / config.tactile.px_per_m;
  std::array<std::vector<tactile::CalibrationSample>, 2> samples;
  for (int iy = -3; iy <= 3; ++iy) {
    for (int ix = -3; ix <= 3; ++ix) {
      const Vec2 offset{reach * ix / 3.0, reach * iy / 3.0};
      scene.held = simworld::HeldVial{offset, {}};
      scene.gripper_closed = true;
      scene.contact_force = 0.0;
      for (std::size_t f = 0; f < 2; ++f) {
        const auto frame = simworld::sample_tactile(scene, f == 0 ? simworld::Finger::Left : simworld::Finger::Right,
                                                    config, rng);
        const auto region = tactile::largest_contact(frame, refs[f], params);
        if (!region) continue;
        samples[f].push_back({{region->centroid.x / frame.width, region->centroid.y / frame.height}, offset});
      }
    }
  }
  tactile::TactileCalibration cal;
  for (std::size_t f = 0; f < 2; ++f) cal.fingers[f] = tactile::calibrate_mapping(samples[f]);
  return cal;
}

}  // namespace vialsim::control
