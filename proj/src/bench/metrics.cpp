#include "vialsim/bench/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace vialsim::bench {

void Metrics::add(const control::TrialRecord& r) {
  ++trials;
  total_attempts += r.attempts;
  max_attempts = std::max(max_attempts, r.attempts);
  if (!r.success) return;
  ++successes;
  if (r.attempts == 1) ++first_time;
  ++histogram[r.attempts];
  success_attempts += r.attempts;
  success_attempts_sq += static_cast<double>(r.attempts) * r.attempts;
  success_time += r.runtime_s;
  success_time_sq += r.runtime_s * r.runtime_s;
}

Metrics& Metrics::merge(const Metrics& o) {
  trials += o.trials;
  successes += o.successes;
  first_time += o.first_time;
  total_attempts += o.total_attempts;
  max_attempts = std::max(max_attempts, o.max_attempts);
  for (const auto& [n, c] : o.histogram) histogram[n] += c;
  success_attempts += o.success_attempts;
  success_attempts_sq += o.success_attempts_sq;
  success_time += o.success_time;
  success_time_sq += o.success_time_sq;
  return *this;
}

double Metrics::success_rate() const { return trials > 0 ? static_cast<double>(successes) / trials : 0.0; }

double Metrics::first_time_rate() const { return trials > 0 ? static_cast<double>(first_time) / trials : 0.0; }

std::optional<double> Metrics::avg_attempts_before_success() const {
  if (successes == 0) return std::nullopt;
  return static_cast<double>(total_attempts) / successes;
}

std::optional<double> Metrics::avg_time_before_success() const {
  if (successes == 0) return std::nullopt;
  return success_time / successes;
}

namespace {

std::optional<double> sample_std(int n, double sum, double sum_sq) {
  if (n < 2) return std::nullopt;
  const double mean = sum / n;
  return std::sqrt(std::max(0.0, (sum_sq - n * mean * mean) / (n - 1)));
}

std::optional<double> rate_std(const std::vector<Metrics>& batches, double (Metrics::*rate)() const) {
  double sum = 0.0, sum_sq = 0.0;
  for (const auto& b : batches) {
    const double v = (b.*rate)();
    sum += v;
    sum_sq += v * v;
  }
  return sample_std(static_cast<int>(batches.size()), sum, sum_sq);
}

}  // namespace

std::optional<double> Metrics::attempts_mean() const {
  if (successes == 0) return std::nullopt;
  return success_attempts / successes;
}

std::optional<double> Metrics::attempts_std() const {
  return sample_std(successes, success_attempts, success_attempts_sq);
}

std::optional<double> Metrics::runtime_mean() const {
  if (successes == 0) return std::nullopt;
  return success_time / successes;
}

std::optional<double> Metrics::runtime_std() const { return sample_std(successes, success_time, success_time_sq); }

std::vector<double> Metrics::cumulative(int n_max) const {
  std::vector<double> out;
  int running = 0;
  auto it = histogram.begin();
  for (int n = 1; n <= n_max; ++n) {
    while (it != histogram.end() && it->first <= n) running += (it++)->second;
    out.push_back(trials > 0 ? static_cast<double>(running) / trials : 0.0);
  }
  return out;
}

Metrics compute_metrics(const std::vector<control::TrialRecord>& records) {
  if (records.empty()) throw InvalidArgument("compute_metrics: no records");
  Metrics m;
  for (const auto& r : records) m.add(r);
  return m;
}

std::optional<double> ModalitySummary::success_rate_std() const { return rate_std(batches, &Metrics::success_rate); }

std::optional<double> ModalitySummary::first_time_rate_std() const {
  return rate_std(batches, &Metrics::first_time_rate);
}

std::vector<ModalitySummary> summarize(const std::vector<control::TrialRecord>& records) {
  std::vector<ModalitySummary> out;
  for (auto m : {control::Modality::Visual, control::Modality::Force, control::Modality::Tactile}) {
    ModalitySummary s;
    s.modality = m;
    for (const auto& r : records) {
      if (r.modality != m) continue;
      if (r.batch < 0) throw InvalidArgument("summarize: negative batch index");
      if (static_cast<std::size_t>(r.batch) >= s.batches.size()) s.batches.resize(r.batch + 1);
      s.batches[r.batch].add(r);
    }
    if (s.batches.empty()) continue;
    for (const auto& b : s.batches) s.total.merge(b);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace vialsim::bench
