#include <doctest.h>

#include <cmath>
#include <sstream>

#include "support.hpp"
#include "vialsim/force/monitor.hpp"

using namespace testing;
using namespace vialsim::force;

namespace {

std::vector<ForceSample> constant(int n, ForceSample s) { return std::vector<ForceSample>(n, s); }

// Fills the whole buffer with `s` and returns the last decision.
ForceDecision settle(Initialized& init, ForceSample s, const CheckParams& p) {
  ForceDecision d = ForceDecision::Continue;
  for (std::size_t k = 0; k < init.buffer.capacity(); ++k) d = update_and_check(init.buffer, s, init.baseline, p);
  return d;
}

}  // namespace

TEST_SUITE("force") {

TEST_CASE("capacity follows the sensor rate") {
  CHECK(buffer_capacity(125.0) == 125);
  CHECK(buffer_capacity(125.0, 0.5) == 63);
  CHECK(buffer_capacity(1.0, 0.1) == 1);
  CHECK_THROWS_AS(buffer_capacity(0.0), InvalidArgument);
  CHECK_THROWS_AS(ForceBuffer(0), InvalidArgument);
}

TEST_CASE("baseline from stationary samples") {
  SUBCASE("constant") {
    const auto init = init_baseline(constant(125, {0, 0, -10}), 125);
    CHECK(init.baseline.mean == Vec3{0, 0, -10});
    CHECK(init.baseline.magnitude == 10.0);
    CHECK(init.buffer.full());
  }
  SUBCASE("noisy within the standard error") {
    RngStream rng(71);
    const double sigma = 0.3;
    std::vector<ForceSample> s;
    for (int k = 0; k < 125; ++k) s.push_back({rng.normal(0, sigma), rng.normal(0, sigma), -10 + rng.normal(0, sigma)});
    const auto init = init_baseline(s, 125);
    const double bound = 4.0 * sigma / std::sqrt(125.0);
    CHECK(std::abs(init.baseline.mean.x) < bound);
    CHECK(std::abs(init.baseline.mean.y) < bound);
    CHECK(std::abs(init.baseline.mean.z + 10.0) < bound);
  }
  SUBCASE("uses the most recent samples") {
    auto s = constant(50, {0, 0, -99});
    const auto tail = constant(125, {1, 2, -10});
    s.insert(s.end(), tail.begin(), tail.end());
    CHECK(init_baseline(s, 125).baseline.mean == Vec3{1, 2, -10});
  }
  SUBCASE("too few samples") { CHECK_THROWS_AS(init_baseline(constant(124, {}), 125), InvalidArgument); }
}

TEST_CASE("stop rule is a strict 20 percent") {
  const CheckParams p;
  REQUIRE(p.threshold == 0.2);
  auto run = [&](double fz) {
    auto init = init_baseline(constant(125, {0, 0, -10}), 125);
    return settle(init, {0, 0, fz}, p);
  };
  CHECK(run(-12.5) == ForceDecision::Stop);      // 2.5 > 2.0
  CHECK(run(-11.5) == ForceDecision::Continue);  // 1.5 < 2.0
  CHECK(run(-12.0) == ForceDecision::Continue);  // exactly 2.0
  CHECK(run(-8.0) == ForceDecision::Continue);
  CHECK(run(-7.9) == ForceDecision::Stop);
}

TEST_CASE("deviation axis") {
  auto init = init_baseline(constant(125, {0, 0, -10}), 125);
  for (int k = 0; k < 125; ++k) init.buffer.push({3, 0, -10});
  CHECK(deviation(init.buffer, init.baseline, ForceAxis::Vector) == doctest::Approx(3.0));
  CHECK(deviation(init.buffer, init.baseline, ForceAxis::Z) == 0.0);

  CheckParams z;
  z.axis = ForceAxis::Z;
  CHECK(update_and_check(init.buffer, {3, 0, -10}, init.baseline, z) == ForceDecision::Continue);
  CHECK(update_and_check(init.buffer, {3, 0, -10}, init.baseline, CheckParams{}) == ForceDecision::Stop);
}

TEST_CASE("floor guards a near-zero baseline") {
  CheckParams p;
  auto init = init_baseline(constant(10, {0, 0, 0.01}), 10);
  // limit is 0.2 * 0.5 N, not 0.2 * 0.01 N
  CHECK(settle(init, {0, 0, 0.09}, p) == ForceDecision::Continue);
  CHECK(settle(init, {0, 0, 0.12}, p) == ForceDecision::Stop);
}

TEST_CASE("buffer mean stays exact") {
  RngStream rng(72);
  ForceBuffer b(125);
  std::vector<ForceSample> all;
  for (int k = 0; k < 5000; ++k) {
    const ForceSample s{rng.normal(3, 40), rng.normal(-1, 40), rng.normal(-12, 40)};
    b.push(s);
    all.push_back(s);
    CHECK(b.size() == std::min<std::size_t>(all.size(), 125));
  }
  double z = 0.0;
  for (std::size_t k = all.size() - 125; k < all.size(); ++k) z += all[k].fz;
  CHECK(std::abs(b.mean().z - z / 125.0) <= 1e-12 * std::abs(z / 125.0));
}

TEST_CASE("a quiet run never stops") {
  auto c = quiet_config();
  auto s = held_scene(c);
  RngStream rng(73);
  std::vector<ForceSample> rest;
  for (int k = 0; k < 125; ++k) rest.push_back(tick(s, Hold{}, kDt, c, rng));
  auto init = init_baseline(rest, 125);
  const CheckParams p;
  bool stopped = false;
  for (int k = 0; k < 1000000 && !stopped; ++k) {
    stopped = update_and_check(init.buffer, tick(s, Hold{}, kDt, c, rng), init.baseline, p) == ForceDecision::Stop;
  }
  CHECK_FALSE(stopped);
}

TEST_CASE("a step of twice the threshold stops within one buffer") {
  for (double fraction : {0.4, 0.5, 1.0}) {
    auto init = init_baseline(constant(125, {0, 0, -10}), 125);
    const CheckParams p;
    const double step = fraction * 10.0;
    int latency = -1;
    for (int k = 0; k < 125; ++k) {
      if (update_and_check(init.buffer, {0, 0, -10 - step}, init.baseline, p) == ForceDecision::Stop) {
        latency = k + 1;
        break;
      }
    }
    CAPTURE(fraction);
    CHECK(latency > 0);
    CHECK(latency <= 125);
  }
}

TEST_CASE("vial placed test") {
  CHECK(vial_placed(0.08, 0.05, 0.04) == Placement::InsertedBelowRackTop);
  CHECK(vial_placed(0.09, 0.05, 0.04) == Placement::ImpactedRackTop);
  CHECK(vial_placed(0.12, 0.05, 0.04) == Placement::ImpactedRackTop);
}

TEST_CASE("safety stop") {
  CHECK(safety_stop(0.02, 0.05));
  CHECK_FALSE(safety_stop(0.025, 0.05));
  CHECK_FALSE(safety_stop(0.10, 0.05));
}

TEST_CASE("force trace") {
  std::ostringstream out;
  ForceTrace trace(out);
  trace.record(0.008, {0.1, -0.2, -11.5}, 0.25, ForceDecision::Continue);
  trace.record(0.016, {0.1, -0.2, -14.0}, 2.75, ForceDecision::Stop);
  CHECK(out.str() ==
        "t,fx,fy,fz,mean_dev,decision\n"
        "0.008000,0.100000,-0.200000,-11.500000,0.250000,continue\n"
        "0.016000,0.100000,-0.200000,-14.000000,2.750000,stop\n");
}

}  // TEST_SUITE
