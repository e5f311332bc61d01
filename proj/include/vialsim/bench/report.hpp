#pragma once

#include <string>
#include <vector>

#include "vialsim/bench/metrics.hpp"

namespace vialsim::bench {

/// modality,trials,successes,attempts_mean,attempts_std,avg_attempts_before_success,
/// runtime_mean_s,runtime_std_s,avg_time_before_success_s,success_pct,success_pct_std,
/// first_time_pct,first_time_pct_std. Undefined values are empty cells.
std::string summary_csv(const std::vector<ModalitySummary>& summaries);

/// modality,attempt_n,success_count for n = 1..N, N the largest attempt count of any trial.
std::string histogram_csv(const std::vector<ModalitySummary>& summaries);

/// modality,attempt_n,cumulative_probability over the same n range.
std::string cumulative_csv(const std::vector<ModalitySummary>& summaries);

/// One JSON object per line.
std::string records_jsonl(const std::vector<control::TrialRecord>& records);
std::vector<control::TrialRecord> parse_records_jsonl(const std::string& text);
std::vector<control::TrialRecord> read_records(const std::string& path);

/// Writes summary.csv, histogram.csv, cumulative.csv and records.jsonl,
/// creating `out_dir` if needed. Throws std::runtime_error when a file cannot
/// be written.
void emit_report(const std::vector<ModalitySummary>& summaries, const std::vector<control::TrialRecord>& records,
                 const std::string& out_dir);

/// Writes only the three aggregate files (the `report` subcommand).
void emit_aggregates(const std::vector<ModalitySummary>& summaries, const std::string& out_dir);

}  // namespace vialsim::bench
