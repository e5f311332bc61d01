#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "support.hpp"
#include "vialsim/bench/experiment.hpp"
#include "vialsim/bench/report.hpp"

using namespace testing;
using namespace vialsim::bench;
using vialsim::control::Modality;
using vialsim::control::TrialRecord;

namespace {

TrialRecord rec(Modality m, bool ok, int attempts, double t, int batch = 0) {
  TrialRecord r;
  r.modality = m;
  r.success = ok;
  r.attempts = attempts;
  r.runtime_s = t;
  r.batch = batch;
  r.failure = ok ? "" : "exhausted";
  r.placement = ok ? "inserted" : "resting_on_rack";
  return r;
}

std::vector<TrialRecord> random_records(RngStream& rng, int n) {
  std::vector<TrialRecord> out;
  const Modality ms[] = {Modality::Visual, Modality::Force, Modality::Tactile};
  for (int i = 0; i < n; ++i) {
    const Modality m = ms[rng.uniform_int(0, 2)];
    const int attempts = m == Modality::Visual ? 1 : static_cast<int>(rng.uniform_int(1, 12));
    out.push_back(rec(m, rng.uniform(0.0, 1.0) < 0.7, attempts, rng.uniform(10.0, 90.0), static_cast<int>(rng.uniform_int(0, 2))));
  }
  return out;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_SUITE("bench") {

TEST_CASE("metrics of three hand-checked trials") {
  const auto m = compute_metrics({rec(Modality::Force, true, 1, 30.0), rec(Modality::Force, true, 3, 50.0),
                                  rec(Modality::Force, false, 2, 40.0)});
  CHECK(m.trials == 3);
  CHECK(m.success_rate() == doctest::Approx(2.0 / 3.0));
  CHECK(*m.avg_attempts_before_success() == 3.0);
  CHECK(*m.avg_time_before_success() == 40.0);
  CHECK(m.first_time_rate() == doctest::Approx(1.0 / 3.0));
  CHECK(m.histogram.at(1) == 1);
  CHECK(m.histogram.at(3) == 1);
  CHECK(m.histogram.count(2) == 0);
  CHECK(*m.attempts_mean() == 2.0);
  CHECK(*m.attempts_std() == doctest::Approx(std::sqrt(2.0)));  // sample std of {1, 3}
  const auto cum = m.cumulative(3);
  CHECK(cum == std::vector<double>{1.0 / 3.0, 1.0 / 3.0, 2.0 / 3.0});
}

TEST_CASE("degenerate record sets") {
  SUBCASE("all failures") {
    const auto m = compute_metrics({rec(Modality::Force, false, 5, 60.0), rec(Modality::Force, false, 9, 80.0)});
    CHECK(m.success_rate() == 0.0);
    CHECK(m.first_time_rate() == 0.0);
    CHECK_FALSE(m.avg_attempts_before_success());
    CHECK_FALSE(m.avg_time_before_success());
    CHECK_FALSE(m.attempts_mean());
    CHECK_FALSE(m.runtime_std());
    CHECK(m.max_attempts == 9);
  }
  SUBCASE("all single-attempt successes") {
    std::vector<TrialRecord> r(7, rec(Modality::Visual, true, 1, 25.0));
    const auto m = compute_metrics(r);
    CHECK(*m.avg_attempts_before_success() == 1.0);
    CHECK(m.first_time_rate() == 1.0);
    CHECK(*m.attempts_std() == 0.0);
  }
  SUBCASE("a single success has no spread") {
    const auto m = compute_metrics({rec(Modality::Force, true, 2, 30.0)});
    CHECK(*m.attempts_mean() == 2.0);
    CHECK_FALSE(m.attempts_std());
  }
  SUBCASE("empty input") { CHECK_THROWS_AS(compute_metrics({}), InvalidArgument); }
}

TEST_CASE("metric invariants on random record sets") {
  RngStream rng(80);
  for (int round = 0; round < 50; ++round) {
    auto records = random_records(rng, static_cast<int>(rng.uniform_int(1, 60)));
    const auto m = compute_metrics(records);
    CHECK(m.success_rate() >= 0.0);
    CHECK(m.success_rate() <= 1.0);
    CHECK(m.first_time_rate() <= m.success_rate());

    int hist = 0;
    for (const auto& [n, count] : m.histogram) hist += count;
    CHECK(hist == m.successes);

    const auto cum = m.cumulative(m.max_attempts);
    CHECK(std::is_sorted(cum.begin(), cum.end()));
    CHECK(cum.front() == doctest::Approx(m.first_time_rate()));
    CHECK(cum.back() == doctest::Approx(m.success_rate()));

    // order of records does not matter
    std::vector<TrialRecord> shuffled = records;
    std::reverse(shuffled.begin(), shuffled.end());
    std::rotate(shuffled.begin(), shuffled.begin() + shuffled.size() / 3, shuffled.end());
    const auto p = compute_metrics(shuffled);
    CHECK(p.successes == m.successes);
    CHECK(p.histogram == m.histogram);
    CHECK(p.total_attempts == m.total_attempts);
    if (m.successes > 0) {
      CHECK(*p.avg_time_before_success() == doctest::Approx(*m.avg_time_before_success()).epsilon(1e-12));
    }

    // merging halves gives the whole, either way round
    const std::size_t cut = static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(records.size())));
    Metrics a, b;
    for (std::size_t i = 0; i < records.size(); ++i) (i < cut ? a : b).add(records[i]);
    Metrics ab = a, ba = b;
    ab.merge(b);
    ba.merge(a);
    for (const Metrics* x : {&ab, &ba}) {
      CHECK(x->trials == m.trials);
      CHECK(x->first_time == m.first_time);
      CHECK(x->histogram == m.histogram);
      CHECK(x->max_attempts == m.max_attempts);
      CHECK(x->success_time == doctest::Approx(m.success_time).epsilon(1e-12));
    }
  }
}

TEST_CASE("summaries group by modality and batch") {
  RngStream rng(81);
  const auto records = random_records(rng, 90);
  const auto s = summarize(records);
  REQUIRE(s.size() == 3);
  CHECK(s[0].modality == Modality::Visual);
  CHECK(s[1].modality == Modality::Force);
  CHECK(s[2].modality == Modality::Tactile);
  int total = 0;
  for (const auto& m : s) {
    total += m.total.trials;
    int in_batches = 0;
    for (const auto& b : m.batches) in_batches += b.trials;
    CHECK(in_batches == m.total.trials);
    CHECK(m.success_rate_std().has_value());
  }
  CHECK(total == 90);

  const auto only = summarize({rec(Modality::Tactile, true, 1, 10.0)});
  REQUIRE(only.size() == 1);
  CHECK_FALSE(only[0].success_rate_std());
}

TEST_CASE("batch split") {
  for (int i = 0; i < 600; ++i) CHECK(batch_of(i, 600, 3) == i / 200);
  CHECK(batch_of(0, 10, 3) == 0);
  CHECK(batch_of(9, 10, 3) == 2);
  for (int trials : {1, 7, 10, 599}) {
    for (int batches = 1; batches <= std::min(trials, 5); ++batches) {
      std::vector<int> sizes(batches, 0);
      for (int i = 0; i < trials; ++i) ++sizes.at(batch_of(i, trials, batches));
      const auto [lo, hi] = std::minmax_element(sizes.begin(), sizes.end());
      CHECK(*hi - *lo <= 1);
    }
  }
}

TEST_CASE("manifest validation") {
  ExperimentManifest m;
  CHECK_NOTHROW(validate(m));
  auto bad = m;
  bad.trials = 0;
  CHECK_THROWS_AS(validate(bad), InvalidArgument);
  bad = m;
  bad.batches = 0;
  CHECK_THROWS_AS(validate(bad), InvalidArgument);
  bad = m;
  bad.modalities.clear();
  CHECK_THROWS_AS(validate(bad), InvalidArgument);
  bad = m;
  bad.trials = 2;
  CHECK_THROWS_AS(validate(bad), InvalidArgument);
  bad = m;
  bad.jobs = 0;
  CHECK_THROWS_AS(validate(bad), InvalidArgument);
}

TEST_CASE("report files") {
  const std::vector<TrialRecord> records{rec(Modality::Visual, true, 1, 20.0, 0), rec(Modality::Visual, false, 1, 21.0, 1),
                                         rec(Modality::Force, false, 4, 70.0, 0), rec(Modality::Force, false, 2, 50.0, 1)};
  const auto s = summarize(records);

  SUBCASE("summary has one row per modality and empty undefined cells") {
    const auto csv = summary_csv(s);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
    CHECK(csv.find("\nforce,2,0,,,,,,,0.0000,0.0000,0.0000,0.0000\n") != std::string::npos);
    CHECK(csv.find("\nvisual,2,1,1.0000,,2.0000,20.0000,,20.0000,50.0000,70.7107,50.0000,70.7107\n") !=
          std::string::npos);
  }
  SUBCASE("histogram and cumulative span the largest attempt count") {
    CHECK(histogram_csv(s) ==
          "modality,attempt_n,success_count\n"
          "visual,1,1\nvisual,2,0\nvisual,3,0\nvisual,4,0\n"
          "force,1,0\nforce,2,0\nforce,3,0\nforce,4,0\n");
    CHECK(cumulative_csv(s) ==
          "modality,attempt_n,cumulative_probability\n"
          "visual,1,0.500000\nvisual,2,0.500000\nvisual,3,0.500000\nvisual,4,0.500000\n"
          "force,1,0.000000\nforce,2,0.000000\nforce,3,0.000000\nforce,4,0.000000\n");
  }
  SUBCASE("records round trip through jsonl") {
    const auto text = records_jsonl(records);
    const auto back = parse_records_jsonl(text);
    REQUIRE(back.size() == records.size());
    CHECK(records_jsonl(back) == text);
    CHECK_THROWS(parse_records_jsonl("{not json}\n"));
  }
  SUBCASE("written to disk and re-aggregated") {
    const auto dir = std::filesystem::temp_directory_path() / "vialsim_report_test";
    std::filesystem::remove_all(dir);
    emit_report(s, records, dir.string());
    for (const char* f : {"summary.csv", "histogram.csv", "cumulative.csv", "records.jsonl"})
      CHECK(std::filesystem::exists(dir / f));
    const auto again = summarize(read_records((dir / "records.jsonl").string()));
    CHECK(summary_csv(again) == slurp(dir / "summary.csv"));
    CHECK(cumulative_csv(again) == slurp(dir / "cumulative.csv"));
    std::filesystem::remove_all(dir);
  }
  SUBCASE("unwritable destination") {
    const auto file = std::filesystem::temp_directory_path() / "vialsim_not_a_dir";
    std::ofstream(file) << "x";
    CHECK_THROWS_AS(emit_report(s, records, (file / "sub").string()), std::runtime_error);
    std::filesystem::remove(file);
  }
}

TEST_CASE("experiments") {
  const vialsim::control::GroundTruthScorer gt;

  SUBCASE("perfect information makes visual placement certain") {
    ExperimentManifest m;
    m.modalities = {Modality::Visual};
    m.trials = 12;
    m.config = quiet_config();
    const auto ex = run_experiment(m, gt, nullptr);
    REQUIRE(ex.summaries.size() == 1);
    CHECK(ex.summaries[0].total.success_rate() == 1.0);
    CHECK(ex.summaries[0].total.histogram == std::map<int, int>{{1, 12}});
  }
  SUBCASE("results do not depend on the worker count") {
    ExperimentManifest m;
    m.modalities = {Modality::Force, Modality::Visual};
    m.trials = 9;
    auto one = run_experiment(m, gt, nullptr);
    m.jobs = 3;
    auto three = run_experiment(m, gt, nullptr);
    CHECK(records_jsonl(one.records) == records_jsonl(three.records));
    CHECK(summary_csv(one.summaries) == summary_csv(three.summaries));
    CHECK(one.records.front().modality == Modality::Force);
    CHECK(one.records[4].trial_index == 4);
  }
  SUBCASE("tactile needs a calibration") {
    ExperimentManifest m;
    m.modalities = {Modality::Tactile};
    m.trials = 3;
    CHECK_THROWS_AS(run_experiment(m, gt, nullptr), InvalidArgument);
  }
}

}  // TEST_SUITE
