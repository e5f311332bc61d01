#include "vialsim/bench/report.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace vialsim::bench {

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::string num(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

std::optional<double> pct(const std::optional<double>& v) {
  if (!v) return std::nullopt;
  return 100.0 * *v;
}

int attempt_axis(const std::vector<ModalitySummary>& summaries) {
  int n = 1;
  for (const auto& s : summaries) n = std::max(n, s.total.max_attempts);
  return n;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  out.flush();
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::filesystem::path prepare_dir(const std::string& out_dir) {
  const std::filesystem::path dir(out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw std::runtime_error("cannot create output directory " + out_dir);
  }
  return dir;
}

}  // namespace

std::string summary_csv(const std::vector<ModalitySummary>& summaries) {
  std::string out =
      "modality,trials,successes,attempts_mean,attempts_std,avg_attempts_before_success,runtime_mean_s,"
      "runtime_std_s,avg_time_before_success_s,success_pct,success_pct_std,first_time_pct,first_time_pct_std\n";
  for (const auto& s : summaries) {
    const Metrics& m = s.total;
    out += control::to_string(s.modality) + ',' + std::to_string(m.trials) + ',' + std::to_string(m.successes) +
           ',' + num(m.attempts_mean()) + ',' + num(m.attempts_std()) + ',' + num(m.avg_attempts_before_success()) +
           ',' + num(m.runtime_mean()) + ',' + num(m.runtime_std()) + ',' + num(m.avg_time_before_success()) + ',' +
           num(100.0 * m.success_rate()) + ',' + num(pct(s.success_rate_std())) + ',' +
           num(100.0 * m.first_time_rate()) + ',' + num(pct(s.first_time_rate_std())) + '\n';
  }
  return out;
}

std::string histogram_csv(const std::vector<ModalitySummary>& summaries) {
  std::string out = "modality,attempt_n,success_count\n";
  const int n_max = attempt_axis(summaries);
  for (const auto& s : summaries) {
    for (int n = 1; n <= n_max; ++n) {
      const auto it = s.total.histogram.find(n);
      const int count = it == s.total.histogram.end() ? 0 : it->second;
      out += control::to_string(s.modality) + ',' + std::to_string(n) + ',' + std::to_string(count) + '\n';
    }
  }
  return out;
}

std::string cumulative_csv(const std::vector<ModalitySummary>& summaries) {
  std::string out = "modality,attempt_n,cumulative_probability\n";
  const int n_max = attempt_axis(summaries);
  for (const auto& s : summaries) {
    const auto curve = s.total.cumulative(n_max);
    for (int n = 1; n <= n_max; ++n) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.6f", curve[n - 1]);
      out += control::to_string(s.modality) + ',' + std::to_string(n) + ',' + buf + '\n';
    }
  }
  return out;
}

std::string records_jsonl(const std::vector<control::TrialRecord>& records) {
  std::string out;
  for (const auto& r : records) out += control::to_json(r).dump() + '\n';
  return out;
}

std::vector<control::TrialRecord> parse_records_jsonl(const std::string& text) {
  std::vector<control::TrialRecord> records;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      records.push_back(control::record_from_json(nlohmann::json::parse(line)));
    } catch (const std::exception& e) {
      throw InvalidArgument("records line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return records;
}

std::vector<control::TrialRecord> read_records(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_records_jsonl(ss.str());
}

void emit_aggregates(const std::vector<ModalitySummary>& summaries, const std::string& out_dir) {
  const auto dir = prepare_dir(out_dir);
  write_file(dir / "summary.csv", summary_csv(summaries));
  write_file(dir / "histogram.csv", histogram_csv(summaries));
  write_file(dir / "cumulative.csv", cumulative_csv(summaries));
}

void emit_report(const std::vector<ModalitySummary>& summaries, const std::vector<control::TrialRecord>& records,
                 const std::string& out_dir) {
  emit_aggregates(summaries, out_dir);
  write_file(std::filesystem::path(out_dir) / "records.jsonl", records_jsonl(records));
}

}  // namespace vialsim::bench
