#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vialsim/control/scorer.hpp"
#include "vialsim/control/search.hpp"
#include "vialsim/core/config.hpp"
#include "vialsim/core/rng.hpp"
#include "vialsim/simworld/physics.hpp"
#include "vialsim/tactile/calibration.hpp"

namespace vialsim::control {

enum class Modality { Visual, Force, Tactile };

std::string to_string(Modality m);
/// Accepts "visual", "force", "tactile". Throws InvalidArgument otherwise.
Modality parse_modality(const std::string& name);

enum class AttemptResult { Inserted, RackTopContact, SafetyStop, OutOfBounds, LostContact };

std::string to_string(AttemptResult r);

struct AttemptOutcome {
  Vec2 position;  // commanded vial position (t_x, t_y)
  AttemptResult result = AttemptResult::RackTopContact;
};

struct TrialRecord {
  Modality modality = Modality::Visual;
  std::uint64_t seed = 0;
  std::uint64_t trial_index = 0;
  int batch = 0;
  int attempts = 0;
  bool success = false;
  double runtime_s = 0.0;            // sim clock from reset to the end of the trial
  std::string failure;               // empty on success
  std::string placement;             // final PlacementResult kind
  std::vector<AttemptOutcome> outcomes;
  Vec2 final_offset;                 // in-gripper offset at the end (observed part)
};

nlohmann::json to_json(const TrialRecord& r);
TrialRecord record_from_json(const nlohmann::json& j);

struct TrialContext {
  const WorkspaceConfig& config;
  const SlotScorer& scorer;
  const tactile::TactileCalibration* calibration = nullptr;  // required by the tactile controller
};

/// Open-loop placement after a lowered re-imaging step. Exactly one attempt.
TrialRecord run_visual_trial(simworld::SceneState& scene, const TrialContext& ctx, RngStream& rng);

/// Force-monitored descent with search recovery.
TrialRecord run_force_trial(simworld::SceneState& scene, const TrialContext& ctx, RngStream& rng);

/// Tactile-monitored descent with grasp-offset correction and search recovery.
/// Throws InvalidArgument without a calibration.
TrialRecord run_tactile_trial(simworld::SceneState& scene, const TrialContext& ctx, RngStream& rng);

TrialRecord run_trial(Modality modality, simworld::SceneState& scene, const TrialContext& ctx, RngStream& rng);

/// Fingertip material a modality is run with.
simworld::Fingertip fingertip_for(Modality modality);

/// Runs the tactile calibration procedure in the simulator: captures open
/// references, then holds the vial at a grid of known offsets on each finger
/// and fits the image-to-physical map.
tactile::TactileCalibration calibrate_tactile_sim(const WorkspaceConfig& config, RngStream& rng);

}  // namespace vialsim::control
