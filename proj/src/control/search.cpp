#include "vialsim/control/search.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "vialsim/perception/projection.hpp"

namespace vialsim::control {
namespace {

constexpr double kSlack = 1e-9;  // absorbs rounding in S * e

// Clockwise angle from +x (y up), in [0, 2pi).
double clockwise_angle(const Cell& c) {
  const double a = -std::atan2(static_cast<double>(c.second), static_cast<double>(c.first));
  return a < 0.0 ? a + 2.0 * std::numbers::pi : a;
}

}  // namespace

bool within_bounds(const SearchState& s, const Cell& c) {
  return std::abs(s.spacing * c.first) <= 0.5 * s.r_w + kSlack && std::abs(s.spacing * c.second) <= 0.5 * s.r_h + kSlack;
}

SearchStep next_trial_positions(SearchState& s) {
  if (!(s.spacing > 0.0) || !(s.r_w > 0.0) || !(s.r_h > 0.0) || s.expansion < 1) {
    throw InvalidArgument("next_trial_positions: spacing, bounds and expansion must be positive");
  }
  SearchStep step;
  while (true) {
    const int e = s.expansion;
    for (int ey = -e; ey <= e; ++ey) {
      for (int ex = -e; ex <= e; ++ex) {
        const Cell c{ex, ey};
        if (!s.visited.count(c) && within_bounds(s, c)) step.cells.push_back(c);
      }
    }
    if (!step.cells.empty()) break;
    if (s.spacing * e > 0.5 * s.r_w + kSlack && s.spacing * e > 0.5 * s.r_h + kSlack) {
      step.exhausted = true;
      return step;
    }
    ++s.expansion;
  }

  std::sort(step.cells.begin(), step.cells.end(), [](const Cell& a, const Cell& b) {
    const int ra = std::max(std::abs(a.first), std::abs(a.second));
    const int rb = std::max(std::abs(b.first), std::abs(b.second));
    if (ra != rb) return ra < rb;
    return clockwise_angle(a) < clockwise_angle(b);
  });
  for (const Cell& c : step.cells) {
    s.visited.insert(c);
    step.positions.push_back({s.target.x + s.spacing * c.first, s.target.y + s.spacing * c.second});
  }
  return step;
}

SearchBounds compute_search_bounds(const std::vector<perception::Candidate>& candidates,
                                   const perception::Candidate& target, const CameraIntrinsics& intrinsics,
                                   const Pose3& cam, double r_z, double pitch) {
  const Vec3 t = perception::pixel_to_world(target.u, target.v, intrinsics, cam, r_z);
  struct Near {
    Vec2 d;
    double dist;
  };
  std::vector<Near> all;
  for (const auto& c : candidates) {
    const Vec3 w = perception::pixel_to_world(c.u, c.v, intrinsics, cam, r_z);
    const Vec2 d{w.x - t.x, w.y - t.y};
    const double dist = d.norm();
    if (dist < 0.5 * pitch || dist > 2.0 * pitch) continue;  // the target itself, or not adjacent
    all.push_back({d, dist});
  }
  std::stable_sort(all.begin(), all.end(), [](const Near& a, const Near& b) { return a.dist < b.dist; });
  std::vector<Near> near;
  for (const auto& a : all) {
    const bool duplicate =
        std::any_of(near.begin(), near.end(), [&](const Near& n) { return (n.d - a.d).norm() < 0.5 * pitch; });
    if (!duplicate) near.push_back(a);
    if (near.size() == 8) break;
  }

  SearchBounds b{pitch, pitch, static_cast<int>(near.size())};
  double gap_x = 0.0, gap_y = 0.0;
  for (const auto& n : near) {
    const double ax = std::abs(n.d.x), ay = std::abs(n.d.y);
    if (ax > ay && (gap_x == 0.0 || ax < gap_x)) gap_x = ax;
    if (ay > ax && (gap_y == 0.0 || ay < gap_y)) gap_y = ay;
  }
  if (gap_x > 0.0) b.r_w = gap_x;
  if (gap_y > 0.0) b.r_h = gap_y;
  return b;
}

}  // namespace vialsim::control
