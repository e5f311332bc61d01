#pragma once

#include <vector>

#include "vialsim/perception/cnn.hpp"
#include "vialsim/perception/select.hpp"
#include "vialsim/simworld/render.hpp"

namespace vialsim::control {

/// Assigns rack/occupancy probabilities to the candidates of one shot.
class SlotScorer {
 public:
  virtual ~SlotScorer() = default;
  virtual std::vector<perception::ScoredCandidate> score(const simworld::Shot& shot,
                                                         const std::vector<perception::Candidate>& candidates,
                                                         const simworld::SceneState& scene) const = 0;
};

/// The production path: crops scored by the trained network.
class CnnScorer : public SlotScorer {
 public:
  CnnScorer(perception::CnnWeights weights, double crop_margin, int crop_size);

  std::vector<perception::ScoredCandidate> score(const simworld::Shot& shot,
                                                 const std::vector<perception::Candidate>& candidates,
                                                 const simworld::SceneState& scene) const override;

 private:
  perception::CnnWeights weights_;
  double margin_;
  int size_;
};

/// Oracle that labels candidates from the simulator's geometry. Lets the
/// controllers be exercised without a trained network.
class GroundTruthScorer : public SlotScorer {
 public:
  std::vector<perception::ScoredCandidate> score(const simworld::Shot& shot,
                                                 const std::vector<perception::Candidate>& candidates,
                                                 const simworld::SceneState& scene) const override;
};

}  // namespace vialsim::control
