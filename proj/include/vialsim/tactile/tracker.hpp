#pragma once

#include <array>
#include <optional>

#include "vialsim/core/config.hpp"
#include "vialsim/tactile/calibration.hpp"
#include "vialsim/tactile/pipeline.hpp"

namespace vialsim::tactile {

struct PipelineParams {
  double threshold = 0.35;
  double min_area = 25.0;
};

using FramePair = std::array<TactileFrame, 2>;
using ReferencePair = std::array<ReferenceSet, 2>;

/// Largest surviving contact region of one frame, if any.
std::optional<ContactRegion> largest_contact(const TactileFrame& frame, const ReferenceSet& references,
                                             const PipelineParams& params);

/// Contact centroid per finger while the vial is held and unloaded.
struct NeutralState {
  std::array<std::optional<Vec2>, 2> centroid;
  int width = 0;
  int height = 0;

  bool valid() const { return centroid[0].has_value() || centroid[1].has_value(); }
};

NeutralState capture_neutral(const FramePair& frames, const ReferencePair& references, const PipelineParams& params);

/// In-gripper offset of the vial (m) implied by the neutral centroids, averaged
/// over fingers in contact. nullopt when neither finger sees the vial.
std::optional<Vec2> estimate_offset(const NeutralState& neutral, const TactileCalibration& calibration);

enum class TactileDecision { Continue, Stop, LostContact };

struct Deviation {
  std::array<std::optional<Vec2>, 2> px;  // per finger, current minus neutral
  double magnitude_px = 0.0;              // fused over fingers in contact
  Vec2 metres;                            // mean physical displacement
  TactileDecision decision = TactileDecision::Continue;
};

/// Compares the current contact centroids with the neutral state. Stop when
/// the fused displacement exceeds stop_px; LostContact when no finger that
/// had a neutral contact still shows one.
Deviation track_deviation(const NeutralState& neutral, const FramePair& frames, const ReferencePair& references,
                          const TactileCalibration& calibration, const PipelineParams& params, double stop_px,
                          TactileFusion fusion = TactileFusion::Average);

}  // namespace vialsim::tactile
