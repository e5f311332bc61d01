#include "vialsim/control/scorer.hpp"

#include "vialsim/perception/dataset.hpp"

namespace vialsim::control {

CnnScorer::CnnScorer(perception::CnnWeights weights, double crop_margin, int crop_size)
    : weights_(std::move(weights)), margin_(crop_margin), size_(crop_size) {}

std::vector<perception::ScoredCandidate> CnnScorer::score(const simworld::Shot& shot,
                                                          const std::vector<perception::Candidate>& candidates,
                                                          const simworld::SceneState&) const {
  std::vector<perception::ScoredCandidate> out;
  out.reserve(candidates.size());
  for (const auto& c : candidates) {
    const auto p = perception::cnn_forward(perception::extract_crop(shot.image, c, margin_, size_), weights_);
    out.push_back({c, p.p_in_rack, p.p_occupied});
  }
  return out;
}

std::vector<perception::ScoredCandidate> GroundTruthScorer::score(
    const simworld::Shot& shot, const std::vector<perception::Candidate>& candidates,
    const simworld::SceneState& scene) const {
  std::vector<perception::ScoredCandidate> out;
  out.reserve(candidates.size());
  for (const auto& c : candidates) {
    switch (perception::ground_truth_label(c, scene, shot.truth)) {
      case perception::CropLabel::NotInRack: out.push_back({c, 0.0, 0.0}); break;
      case perception::CropLabel::InRackOccupied: out.push_back({c, 1.0, 1.0}); break;
      case perception::CropLabel::InRackVacant: out.push_back({c, 1.0, 0.0}); break;
    }
  }
  return out;
}

}  // namespace vialsim::control
