#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "vialsim/bench/metrics.hpp"
#include "vialsim/control/trial.hpp"
#include "vialsim/core/config.hpp"
#include "vialsim/perception/cnn.hpp"
#include "vialsim/tactile/calibration.hpp"

namespace vialsim::bench {

struct ExperimentManifest {
  std::vector<control::Modality> modalities{control::Modality::Visual, control::Modality::Force,
                                            control::Modality::Tactile};
  int trials = 600;  // per modality, split evenly over the batches
  int batches = 3;
  WorkspaceConfig config;  // config.seed is the master seed
  int jobs = 1;            // worker threads; results do not depend on it
};

/// Throws InvalidArgument naming the offending field.
void validate(const ExperimentManifest& manifest);

/// Batch of trial i when `trials` are split evenly over `batches`.
int batch_of(int trial, int trials, int batches);

struct Experiment {
  std::vector<control::TrialRecord> records;  // modality order of the manifest, then trial index
  std::vector<ModalitySummary> summaries;
};

using Progress = std::function<void(control::Modality, int done, int total)>;

/// Runs every modality on the same sequence of scenes: trial i of each
/// modality starts from the scene drawn by split(i) of the master stream.
/// Tactile trials require `calibration`.
Experiment run_experiment(const ExperimentManifest& manifest, const control::SlotScorer& scorer,
                          const tactile::TactileCalibration* calibration, const Progress& progress = {});

/// The labelled training crops `train_network` fits, seeded from the config.
std::vector<perception::LabeledCrop> training_dataset(const WorkspaceConfig& config);

/// Dataset generation and training exactly as `train` does it, seeded from
/// the config. Fills `accuracy` with the held-out three-way accuracy when given.
perception::CnnWeights train_network(const WorkspaceConfig& config, double* accuracy = nullptr);

/// Calibration exactly as `calibrate` does it, seeded from the config.
tactile::TactileCalibration calibrate(const WorkspaceConfig& config);

}  // namespace vialsim::bench
