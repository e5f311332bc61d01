#pragma once

#include <optional>
#include <vector>

#include "vialsim/core/rng.hpp"
#include "vialsim/core/types.hpp"
#include "vialsim/perception/hough.hpp"

namespace vialsim::perception {

struct ScoredCandidate {
  Candidate candidate;
  double p_in_rack = 0.0;
  double p_occupied = 0.0;

  double vacancy_score() const { return p_in_rack * (1.0 - p_occupied); }
};

enum class SelectMode { BestVacant, NearestCenter };

struct SelectParams {
  double theta_rack = 0.5;
  double theta_occ = 0.5;
  double tie_eps = 1e-6;
};

/// Keeps candidates with p_in_rack >= theta_rack and p_occupied <= theta_occ.
std::vector<ScoredCandidate> accepted(const std::vector<ScoredCandidate>& scored, const SelectParams& params);

/// Picks the insertion target among accepted candidates. Ties in BestVacant
/// mode are broken uniformly from `rng`. Returns nullopt when nothing passes
/// the filters.
std::optional<ScoredCandidate> select_target(const std::vector<ScoredCandidate>& scored, SelectMode mode,
                                             Vec2 image_center, const SelectParams& params, RngStream& rng);

}  // namespace vialsim::perception
