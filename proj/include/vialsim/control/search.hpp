#pragma once

#include <set>
#include <utility>
#include <vector>

#include "vialsim/core/types.hpp"
#include "vialsim/perception/hough.hpp"

namespace vialsim::control {

using Cell = std::pair<int, int>;  // (e_x, e_y)

struct SearchState {
  Vec2 target;          // (r_x, r_y)
  double r_w = 0.0;
  double r_h = 0.0;
  int expansion = 1;    // E
  double spacing = 0.0; // S
  std::set<Cell> visited{{0, 0}};  // the centred first attempt already covers (0, 0)
};

struct SearchStep {
  bool exhausted = false;
  std::vector<Cell> cells;
  std::vector<Vec2> positions;
};

/// Emits every unvisited lattice cell in [-E, E]^2 inside the bounds, ring by
/// ring and clockwise from (+E, 0), marking them visited. When nothing is
/// left at the current E the envelope grows; once S*E is past both half
/// bounds the search is exhausted.
SearchStep next_trial_positions(SearchState& state);

/// True when S*|e| stays within the half bounds on both axes.
bool within_bounds(const SearchState& state, const Cell& cell);

struct SearchBounds {
  double r_w = 0.0;
  double r_h = 0.0;
  int neighbours = 0;
};

/// Bounding box of the gaps to the target's nearest detected neighbours
/// (up to 8, within two pitches, occupancy ignored), measured on the
/// rack-top plane. Axes without a neighbour fall back to `pitch`.
SearchBounds compute_search_bounds(const std::vector<perception::Candidate>& candidates,
                                   const perception::Candidate& target, const CameraIntrinsics& intrinsics,
                                   const Pose3& cam, double r_z, double pitch);

}  // namespace vialsim::control
