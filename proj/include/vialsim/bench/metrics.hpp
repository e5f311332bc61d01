#pragma once

#include <map>
#include <optional>
#include <vector>

#include "vialsim/control/trial.hpp"

namespace vialsim::bench {

/// Sufficient statistics of a set of trials. Count fields merge exactly;
/// the floating sums merge up to rounding.
struct Metrics {
  int trials = 0;
  int successes = 0;
  int first_time = 0;
  long total_attempts = 0;       // over all trials, successful or not
  int max_attempts = 0;          // over all trials
  std::map<int, int> histogram;  // attempt count -> successful trials
  // moments over successful trials
  double success_attempts = 0.0;
  double success_attempts_sq = 0.0;
  double success_time = 0.0;
  double success_time_sq = 0.0;

  void add(const control::TrialRecord& r);
  Metrics& merge(const Metrics& other);

  double success_rate() const;     // 0 for an empty set
  double first_time_rate() const;  // 0 for an empty set
  /// Sum of all placement attempts over successes. Undefined without successes.
  std::optional<double> avg_attempts_before_success() const;
  /// Sum of successful runtimes over successes.
  std::optional<double> avg_time_before_success() const;
  /// Mean and sample standard deviation of successful trials' attempts and runtimes.
  std::optional<double> attempts_mean() const;
  std::optional<double> attempts_std() const;
  std::optional<double> runtime_mean() const;
  std::optional<double> runtime_std() const;
  /// P(success within n attempts) for n = 1..n_max, over all trials.
  std::vector<double> cumulative(int n_max) const;
};

/// Throws InvalidArgument on an empty record list.
Metrics compute_metrics(const std::vector<control::TrialRecord>& records);

struct ModalitySummary {
  control::Modality modality = control::Modality::Visual;
  Metrics total;
  std::vector<Metrics> batches;  // indexed by batch number

  /// Sample standard deviation of a per-batch rate; undefined with fewer than two batches.
  std::optional<double> success_rate_std() const;
  std::optional<double> first_time_rate_std() const;
};

/// Groups records by modality (visual, force, tactile order; absent ones
/// skipped) and by batch.
std::vector<ModalitySummary> summarize(const std::vector<control::TrialRecord>& records);

}  // namespace vialsim::bench
