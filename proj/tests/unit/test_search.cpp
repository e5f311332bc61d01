#include <doctest.h>

#include <cmath>
#include <set>

#include "vialsim/control/search.hpp"
#include "vialsim/simworld/render.hpp"

using namespace vialsim;
using namespace vialsim::control;

namespace {

constexpr double kS = 0.0025;

// Largest |e| whose offset S*e stays within half a bound.
int reach(double bound) { return static_cast<int>(std::floor(0.5 * bound / kS + 1e-9)); }

// Direct enumeration of the unvisited in-bounds cells of [-E, E]^2.
std::set<Cell> lattice(int e, double r_w, double r_h, const std::set<Cell>& visited) {
  std::set<Cell> out;
  for (int x = -e; x <= e; ++x)
    for (int y = -e; y <= e; ++y)
      if (std::abs(x) <= reach(r_w) && std::abs(y) <= reach(r_h) && !visited.count({x, y})) out.insert({x, y});
  return out;
}

SearchState fresh(double r_w, double r_h, Vec2 target = {}) {
  SearchState s;
  s.target = target;
  s.r_w = r_w;
  s.r_h = r_h;
  s.spacing = kS;
  return s;
}

perception::Candidate at(double x, double y) {
  const Vec2 px = simworld::project_point({x, y, 0.03}, {0.0, 0.0, 0.35, 0.0}, CameraIntrinsics{});
  return {px.x, px.y, 20.0, 100.0};
}

}  // namespace

TEST_SUITE("control") {

TEST_CASE("first envelope is the eight neighbours, clockwise from +x") {
  auto s = fresh(0.02, 0.02, {0.1, -0.05});
  const auto step = next_trial_positions(s);
  REQUIRE_FALSE(step.exhausted);
  const std::vector<Cell> expected{{1, 0}, {1, -1}, {0, -1}, {-1, -1}, {-1, 0}, {-1, 1}, {0, 1}, {1, 1}};
  CHECK(step.cells == expected);
  REQUIRE(step.positions.size() == 8);
  for (std::size_t i = 0; i < 8; ++i) {
    CHECK(step.positions[i].x == doctest::Approx(0.1 + kS * expected[i].first));
    CHECK(step.positions[i].y == doctest::Approx(-0.05 + kS * expected[i].second));
  }
  CHECK(s.expansion == 1);
  CHECK(s.visited.size() == 9);
}

TEST_CASE("second envelope is the sixteen perimeter cells") {
  auto s = fresh(0.02, 0.02);
  next_trial_positions(s);
  const auto step = next_trial_positions(s);
  CHECK(s.expansion == 2);
  CHECK(step.cells.size() == 16);
  for (const auto& c : step.cells) CHECK(std::max(std::abs(c.first), std::abs(c.second)) == 2);
  CHECK(step.cells.front() == Cell{2, 0});
  CHECK(step.cells[1] == Cell{2, -1});
}

TEST_CASE("10 mm bounds stay within 5 mm and exhaust once E = 2 is used up") {
  auto s = fresh(0.010, 0.010);
  int calls = 0;
  while (true) {
    const auto step = next_trial_positions(s);
    if (step.exhausted) break;
    ++calls;
    for (const auto& p : step.positions) {
      CHECK(std::abs(p.x) <= 0.005 + 1e-12);
      CHECK(std::abs(p.y) <= 0.005 + 1e-12);
    }
  }
  CHECK(calls == 2);
  CHECK(s.expansion == 3);  // S*2 = 5 mm is not beyond the bound, so E steps once more
  CHECK(s.visited.size() == 25);
}

TEST_CASE("emission matches lattice enumeration for every bound pair") {
  const double bounds[] = {0.0025, 0.006, 0.010, 0.015, 0.020};  // reach 0..4 cells
  for (double r_w : bounds)
    for (double r_h : bounds) {
      CAPTURE(r_w);
      CAPTURE(r_h);
      auto s = fresh(r_w, r_h);
      std::set<Cell> visited{{0, 0}};
      std::set<Cell> emitted;
      int e = 1;
      int guard = 0;
      while (true) {
        REQUIRE(++guard < 100);
        // oracle: grow E until something is left or the envelope is past both bounds
        std::set<Cell> want;
        bool done = false;
        while (true) {
          want = lattice(e, r_w, r_h, visited);
          if (!want.empty()) break;
          if (kS * e > 0.5 * r_w + 1e-9 && kS * e > 0.5 * r_h + 1e-9) {
            done = true;
            break;
          }
          ++e;
        }
        const auto step = next_trial_positions(s);
        REQUIRE(step.exhausted == done);
        if (done) break;
        CHECK(s.expansion == e);
        const std::set<Cell> got(step.cells.begin(), step.cells.end());
        CHECK(got.size() == step.cells.size());  // no repeats within a step
        CHECK(got == want);
        for (const auto& c : step.cells) {
          CHECK(within_bounds(s, c));
          CHECK(emitted.insert(c).second);  // never emitted twice
        }
        visited.insert(got.begin(), got.end());
      }
      CHECK(e <= 5);
      // every in-bounds cell except the centre was tried exactly once
      CHECK(emitted.size() + 1 == static_cast<std::size_t>((2 * reach(r_w) + 1) * (2 * reach(r_h) + 1)));
      CHECK(next_trial_positions(s).exhausted);
    }
}

TEST_CASE("any slot within clearance of an in-bounds cell is reached") {
  const double clearance = 0.0015;
  const double r = 0.020;
  int reachable = 0, total = 0;
  for (double dx = -0.010; dx <= 0.010 + 1e-12; dx += 0.00025)
    for (double dy = -0.010; dy <= 0.010 + 1e-12; dy += 0.00025) {
      ++total;
      const Vec2 slot{dx, dy};
      bool coverable = false;
      for (int x = -reach(r); x <= reach(r); ++x)
        for (int y = -reach(r); y <= reach(r); ++y)
          coverable = coverable || std::hypot(kS * x - dx, kS * y - dy) <= clearance;
      auto s = fresh(r, r);
      bool hit = std::hypot(dx, dy) <= clearance;  // the centred first attempt
      int attempts = 1;
      while (!hit) {
        const auto step = next_trial_positions(s);
        if (step.exhausted) break;
        for (const auto& p : step.positions) {
          ++attempts;
          if ((p - slot).norm() <= clearance) {
            hit = true;
            break;
          }
        }
      }
      CHECK(hit == coverable);
      CHECK(attempts <= 81);
      reachable += hit;
    }
  // S = 2.5 mm leaves the lattice diagonals 1.77 mm from the nearest cell, beyond the 1.5 mm clearance
  CHECK(reachable < total);
  CHECK(reachable > total * 8 / 10);
}

TEST_CASE("invalid search state") {
  auto s = fresh(0.0, 0.01);
  CHECK_THROWS_AS(next_trial_positions(s), InvalidArgument);
  auto t = fresh(0.01, 0.01);
  t.spacing = 0.0;
  CHECK_THROWS_AS(next_trial_positions(t), InvalidArgument);
}

TEST_CASE("search bounds from neighbouring detections") {
  const CameraIntrinsics k;
  const Pose3 cam{0.0, 0.0, 0.35, 0.0};
  const double rz = 0.03, pitch = 0.02;

  SUBCASE("full 3x3 neighbourhood on the pitch grid") {
    std::vector<perception::Candidate> c;
    for (int i = -2; i <= 2; ++i)
      for (int j = -2; j <= 2; ++j) c.push_back(at(0.01 + pitch * i, -0.005 + pitch * j));
    const auto b = compute_search_bounds(c, at(0.01, -0.005), k, cam, rz, pitch);
    CHECK(b.neighbours == 8);
    CHECK(b.r_w == doctest::Approx(0.020).epsilon(1e-9));
    CHECK(b.r_h == doctest::Approx(0.020).epsilon(1e-9));
  }
  SUBCASE("isolated detection falls back to the pitch") {
    const auto b = compute_search_bounds({at(0, 0), at(0.1, 0.1)}, at(0, 0), k, cam, rz, pitch);
    CHECK(b.neighbours == 0);
    CHECK(b.r_w == pitch);
    CHECK(b.r_h == pitch);
  }
  SUBCASE("left and right neighbours only") {
    const auto b = compute_search_bounds({at(-0.018, 0.0), at(0, 0), at(0.019, 0.0)}, at(0, 0), k, cam, rz, pitch);
    CHECK(b.neighbours == 2);
    CHECK(b.r_w == doctest::Approx(0.018).epsilon(1e-9));
    CHECK(b.r_h == pitch);
  }
  SUBCASE("duplicate detections of one slot count once") {
    const auto b = compute_search_bounds({at(0, 0), at(0.02, 0.0), at(0.0201, 0.0001), at(0.0, 0.021)}, at(0, 0), k,
                                         cam, rz, pitch);
    CHECK(b.neighbours == 2);
    CHECK(b.r_h == doctest::Approx(0.021).epsilon(1e-9));
  }
}

}  // TEST_SUITE
