#include "vialsim/bench/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "vialsim/perception/dataset.hpp"

namespace vialsim::bench {

namespace {

// Stream indices well clear of the trial indices.
constexpr std::uint64_t kTrainStream = 0x7472'6169'6e00ULL;
constexpr std::uint64_t kHeldOutStream = 0x7472'6169'6e01ULL;
constexpr std::uint64_t kInitStream = 0x7472'6169'6e02ULL;
constexpr std::uint64_t kCalibrationStream = 0x6361'6c00ULL;

}  // namespace

void validate(const ExperimentManifest& m) {
  if (m.modalities.empty()) throw InvalidArgument("manifest: no modalities");
  if (m.trials < 1) throw InvalidArgument("manifest: trials must be >= 1");
  if (m.batches < 1) throw InvalidArgument("manifest: batches must be >= 1");
  if (m.batches > m.trials) throw InvalidArgument("manifest: more batches than trials");
  if (m.jobs < 1) throw InvalidArgument("manifest: jobs must be >= 1");
  validate(m.config);
}

int batch_of(int trial, int trials, int batches) {
  return static_cast<int>(static_cast<long long>(trial) * batches / trials);
}

Experiment run_experiment(const ExperimentManifest& manifest, const control::SlotScorer& scorer,
                          const tactile::TactileCalibration* calibration, const Progress& progress) {
  validate(manifest);
  const WorkspaceConfig& config = manifest.config;
  const RngStream master(config.seed);
  const control::TrialContext ctx{config, scorer, calibration};

  Experiment ex;
  for (const auto modality : manifest.modalities) {
    if (modality == control::Modality::Tactile && calibration == nullptr) {
      throw InvalidArgument("run_experiment: the tactile modality needs a calibration");
    }
    std::vector<control::TrialRecord> records(manifest.trials);
    std::atomic<int> next{0};
    std::atomic<int> done{0};
    std::mutex mu;
    std::exception_ptr failure;

    auto worker = [&] {
      for (int i = next++; i < manifest.trials; i = next++) {
        try {
          RngStream scene_rng = master.split(static_cast<std::uint64_t>(i));
          auto scene = simworld::reset_trial(config, scene_rng, control::fingertip_for(modality));
          RngStream rng = master.split(static_cast<std::uint64_t>(i)).split(10 + static_cast<int>(modality));
          auto rec = control::run_trial(modality, scene, ctx, rng);
          rec.seed = config.seed;
          rec.trial_index = static_cast<std::uint64_t>(i);
          rec.batch = batch_of(i, manifest.trials, manifest.batches);
          records[i] = std::move(rec);
        } catch (...) {
          std::lock_guard lock(mu);
          if (!failure) failure = std::current_exception();
          next = manifest.trials;
          return;
        }
        const int d = ++done;
        if (progress) {
          std::lock_guard lock(mu);
          progress(modality, d, manifest.trials);
        }
      }
    };

    if (manifest.jobs == 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (int j = 0; j < manifest.jobs; ++j) pool.emplace_back(worker);
      for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
    for (auto& r : records) ex.records.push_back(std::move(r));
  }
  ex.summaries = summarize(ex.records);
  return ex;
}

std::vector<perception::LabeledCrop> training_dataset(const WorkspaceConfig& config) {
  return perception::generate_labeled_dataset(config, config.training.scenes, RngStream(config.seed).split(kTrainStream));
}

perception::CnnWeights train_network(const WorkspaceConfig& config, double* accuracy) {
  const RngStream master(config.seed);
  const auto train = training_dataset(config);
  perception::TrainParams tp;
  tp.learning_rate = config.training.learning_rate;
  tp.momentum = config.training.momentum;
  tp.epochs = config.training.epochs;
  tp.batch = config.training.batch;
  RngStream rng = master.split(kInitStream);
  perception::CnnShape shape;
  shape.input = config.perception.crop_size;
  auto weights = perception::cnn_train(train, tp, rng, shape);
  if (accuracy) {
    const int held_out = std::max(1, config.training.scenes / 4);
    const auto test = perception::generate_labeled_dataset(config, held_out, master.split(kHeldOutStream));
    *accuracy = perception::accuracy(test, weights, config.perception.theta_rack, config.perception.theta_occ);
  }
  return weights;
}

tactile::TactileCalibration calibrate(const WorkspaceConfig& config) {
  RngStream rng = RngStream(config.seed).split(kCalibrationStream);
  return control::calibrate_tactile_sim(config, rng);
}

}  // namespace vialsim::bench
