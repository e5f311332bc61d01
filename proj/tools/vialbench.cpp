// vialbench: train, detect, calibrate, run and report.
//
// Exit status: 0 on success, 1 on a usage or configuration error, 2 when a
// command fails at runtime.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vialsim/bench/experiment.hpp"
#include "vialsim/bench/report.hpp"
#include "vialsim/control/scorer.hpp"
#include "vialsim/perception/dataset.hpp"
#include "vialsim/perception/crop.hpp"
#include "vialsim/perception/hough.hpp"

namespace fs = std::filesystem;
using namespace vialsim;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config_path, "Config file (section.key = value)")->check(CLI::ExistingFile);
  cmd->add_option("--seed", c.seed, "Master seed (overrides the config)");
  cmd->add_option("--set", c.overrides, "Config override key=value (repeatable)");
}

WorkspaceConfig load(const Common& c) {
  WorkspaceConfig config = c.config_path.empty() ? WorkspaceConfig{} : load_config_file(c.config_path);
  apply_overrides(config, c.overrides);
  if (c.seed) config.seed = *c.seed;
  validate(config);
  return config;
}

void ensure_parent(const std::string& path) {
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
}

perception::CnnWeights obtain_weights(const WorkspaceConfig& config, const std::string& path, bool may_train) {
  if (fs::exists(path)) return perception::load_weights(path);
  if (!may_train) throw std::runtime_error("weights file " + path + " not found and training is disabled");
  std::fprintf(stderr, "training network (%d scenes, %d epochs) -> %s\n", config.training.scenes,
               config.training.epochs, path.c_str());
  double acc = 0.0;
  auto w = bench::train_network(config, &acc);
  std::fprintf(stderr, "held-out accuracy %.4f\n", acc);
  ensure_parent(path);
  perception::save_weights(path, w);
  return w;
}

tactile::TactileCalibration obtain_calibration(const WorkspaceConfig& config, const std::string& path) {
  if (fs::exists(path)) return tactile::load_calibration(path);
  std::fprintf(stderr, "calibrating tactile sensors -> %s\n", path.c_str());
  auto cal = bench::calibrate(config);
  ensure_parent(path);
  tactile::save_calibration(path, cal);
  return cal;
}

std::string manifest_text(const bench::ExperimentManifest& m) {
  // run options as comments so the file loads back with --config
  std::string out = "# vialbench run manifest\n# modalities:";
  for (auto mod : m.modalities) out += " " + control::to_string(mod);
  out += "\n# trials: " + std::to_string(m.trials) + "\n# batches: " + std::to_string(m.batches) + "\n";
  out += serialize(m.config);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-modal vial insertion simulator and benchmark"};
  app.require_subcommand(1);

  // train
  Common train_common;
  std::string train_weights = "weights.bin";
  std::optional<int> train_scenes, train_epochs;
  std::string dataset_dir;
  auto* train = app.add_subcommand("train", "Render a labelled dataset and train the slot classifier");
  add_common(train, train_common);
  train->add_option("--weights", train_weights, "Output weights file");
  train->add_option("--scenes", train_scenes, "Training scenes to render")->check(CLI::PositiveNumber);
  train->add_option("--epochs", train_epochs, "Training epochs")->check(CLI::PositiveNumber);
  train->add_option("--dump-dataset", dataset_dir, "Also write the training crops as PGM files here");

  // detect
  Common detect_common;
  std::string detect_image, detect_weights;
  std::optional<double> detect_depth;
  auto* detect = app.add_subcommand("detect", "Detect and score slot candidates in a PGM image");
  add_common(detect, detect_common);
  detect->add_option("image", detect_image, "Input PGM")->required()->check(CLI::ExistingFile);
  detect->add_option("--weights", detect_weights, "Weights file; without it candidates are printed unscored");
  detect->add_option("--depth", detect_depth, "Camera height above the rack top (m)");

  // calibrate
  Common cal_common;
  std::string cal_path = "calibration.txt";
  auto* calibrate = app.add_subcommand("calibrate", "Fit the tactile image-to-physical maps in simulation");
  add_common(calibrate, cal_common);
  calibrate->add_option("--calibration", cal_path, "Output calibration file");

  // run
  Common run_common;
  std::vector<std::string> run_modalities;
  int run_trials = 600;
  std::optional<int> run_batches;
  int run_jobs = 1;
  bool run_no_train = false;
  std::string run_out = "results", run_weights, run_cal;
  auto* run = app.add_subcommand("run", "Run a seeded campaign and write the reports");
  add_common(run, run_common);
  run->add_option("--modality", run_modalities, "visual, force, tactile or all (repeatable)");
  run->add_option("--trials", run_trials, "Trials per modality")->check(CLI::PositiveNumber);
  run->add_option("--batches", run_batches, "Batches for the +/- spread (default 3)")->check(CLI::PositiveNumber);
  run->add_option("--jobs", run_jobs, "Worker threads")->check(CLI::PositiveNumber);
  run->add_option("--out", run_out, "Output directory");
  run->add_option("--weights", run_weights, "Weights file (trained and written here if missing)");
  run->add_flag("--no-train", run_no_train, "Fail instead of training when the weights file is missing");
  run->add_option("--calibration", run_cal, "Calibration file (fitted and written here if missing)");

  // report
  std::string report_out = "results", report_records;
  auto* report = app.add_subcommand("report", "Re-aggregate records.jsonl into the CSV reports");
  report->add_option("--out", report_out, "Directory holding records.jsonl; reports are written here");
  report->add_option("--records", report_records, "Records file (default <out>/records.jsonl)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*train) {
      WorkspaceConfig config = load(train_common);
      if (train_scenes) config.training.scenes = *train_scenes;
      if (train_epochs) config.training.epochs = *train_epochs;
      if (!dataset_dir.empty()) {
        perception::dump_dataset(dataset_dir, bench::training_dataset(config));
      }
      double acc = 0.0;
      const auto w = bench::train_network(config, &acc);
      ensure_parent(train_weights);
      perception::save_weights(train_weights, w);
      std::printf("weights %s\nheld_out_accuracy %.4f\n", train_weights.c_str(), acc);
    } else if (*detect) {
      const WorkspaceConfig config = load(detect_common);
      const Image image = read_pgm(detect_image);
      const double depth = detect_depth.value_or(config.camera.home.z - config.rack.height);
      const auto candidates = perception::detect_circles(image, perception::hough_params_for(config, depth));
      std::optional<perception::CnnWeights> weights;
      if (!detect_weights.empty()) weights = perception::load_weights(detect_weights);
      std::printf("u,v,r,votes,p_in_rack,p_occupied\n");
      for (const auto& c : candidates) {
        std::printf("%.3f,%.3f,%.3f,%.1f", c.u, c.v, c.r, c.votes);
        if (weights) {
          const auto crop =
              perception::extract_crop(image, c, config.perception.crop_margin, config.perception.crop_size);
          const auto out = perception::cnn_forward(crop, *weights);
          std::printf(",%.4f,%.4f\n", out.p_in_rack, out.p_occupied);
        } else {
          std::printf(",,\n");
        }
      }
    } else if (*calibrate) {
      const WorkspaceConfig config = load(cal_common);
      const auto cal = bench::calibrate(config);
      ensure_parent(cal_path);
      tactile::save_calibration(cal_path, cal);
      for (int f = 0; f < 2; ++f) {
        const auto& m = cal.fingers[f];
        std::printf("%s gain %.6g %.6g %.6g %.6g bias %.6g %.6g rms %.3g\n", f == 0 ? "left" : "right", m.gain[0],
                    m.gain[1], m.gain[2], m.gain[3], m.bias.x, m.bias.y, m.residual_rms);
      }
    } else if (*run) {
      bench::ExperimentManifest manifest;
      manifest.config = load(run_common);
      manifest.trials = run_trials;
      manifest.batches = run_batches.value_or(std::min(3, run_trials));
      manifest.jobs = run_jobs;
      if (!run_modalities.empty()) {
        manifest.modalities.clear();
        for (const auto& name : run_modalities) {
          if (name == "all") {
            manifest.modalities = {control::Modality::Visual, control::Modality::Force, control::Modality::Tactile};
            break;
          }
          try {
            const auto m = control::parse_modality(name);
            if (std::find(manifest.modalities.begin(), manifest.modalities.end(), m) == manifest.modalities.end()) {
              manifest.modalities.push_back(m);
            }
          } catch (const InvalidArgument& e) {
            throw UsageError(e.what());
          }
        }
      }
      try {
        bench::validate(manifest);
      } catch (const InvalidArgument& e) {
        throw UsageError(e.what());
      }
      fs::create_directories(run_out);
      const std::string weights_path = run_weights.empty() ? (fs::path(run_out) / "weights.bin").string() : run_weights;
      const control::CnnScorer scorer(obtain_weights(manifest.config, weights_path, !run_no_train),
                                      manifest.config.perception.crop_margin, manifest.config.perception.crop_size);
      std::optional<tactile::TactileCalibration> cal;
      if (std::find(manifest.modalities.begin(), manifest.modalities.end(), control::Modality::Tactile) !=
          manifest.modalities.end()) {
        cal = obtain_calibration(manifest.config,
                                 run_cal.empty() ? (fs::path(run_out) / "calibration.txt").string() : run_cal);
      }
      const auto ex = bench::run_experiment(manifest, scorer, cal ? &*cal : nullptr,
                                            [](control::Modality m, int done, int total) {
                                              if (done == total || done % 50 == 0) {
                                                std::fprintf(stderr, "%s %d/%d\n", control::to_string(m).c_str(),
                                                             done, total);
                                              }
                                            });
      bench::emit_report(ex.summaries, ex.records, run_out);
      std::ofstream(fs::path(run_out) / "manifest.txt", std::ios::binary) << manifest_text(manifest);
      std::fputs(bench::summary_csv(ex.summaries).c_str(), stdout);
    } else if (*report) {
      const std::string path = report_records.empty() ? (fs::path(report_out) / "records.jsonl").string()
                                                      : report_records;
      const auto records = bench::read_records(path);
      if (records.empty()) throw std::runtime_error("no records in " + path);
      const auto summaries = bench::summarize(records);
      bench::emit_aggregates(summaries, report_out);
      std::fputs(bench::summary_csv(summaries).c_str(), stdout);
    }
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
