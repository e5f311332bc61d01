#include "vialsim/perception/select.hpp"

#include <cmath>
#include <limits>

namespace vialsim::perception {

std::vector<ScoredCandidate> accepted(const std::vector<ScoredCandidate>& scored, const SelectParams& params) {
  std::vector<ScoredCandidate> out;
  for (const auto& s : scored) {
    if (s.p_in_rack >= params.theta_rack && s.p_occupied <= params.theta_occ) out.push_back(s);
  }
  return out;
}

std::optional<ScoredCandidate> select_target(const std::vector<ScoredCandidate>& scored, SelectMode mode,
                                             Vec2 image_center, const SelectParams& params, RngStream& rng) {
  const auto pool = accepted(scored, params);
  if (pool.empty()) return std::nullopt;

  if (mode == SelectMode::NearestCenter) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pool.size(); ++i) {
      const double d = std::hypot(pool[i].candidate.u - image_center.x, pool[i].candidate.v - image_center.y);
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    return pool[best];
  }

  double top = -1.0;
  for (const auto& s : pool) top = std::max(top, s.vacancy_score());
  std::vector<std::size_t> tied;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (pool[i].vacancy_score() >= top - params.tie_eps) tied.push_back(i);
  }
  if (tied.size() == 1) return pool[tied.front()];
  return pool[tied[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(tied.size()) - 1))]];
}

}  // namespace vialsim::perception
