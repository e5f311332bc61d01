#pragma once

#include <string>
#include <vector>

#include "vialsim/core/config.hpp"
#include "vialsim/core/rng.hpp"
#include "vialsim/perception/cnn.hpp"
#include "vialsim/simworld/render.hpp"

namespace vialsim::perception {

/// Ground-truth label of a candidate: the nearest true slot centre (projected
/// through the camera that took the shot) within half a pitch means in-rack,
/// with occupancy taken from the scene.
CropLabel ground_truth_label(const Candidate& candidate, const simworld::SceneState& scene,
                             const simworld::CameraModel& truth);

/// Renders `n_scenes` randomized scenes (a share of them from the lowered
/// refinement height), runs circle detection on each and labels every crop
/// from ground truth. Scene i draws only from rng.split(i).
std::vector<LabeledCrop> generate_labeled_dataset(const WorkspaceConfig& config, int n_scenes, const RngStream& rng);

/// Writes crop_<n>.pgm files plus index.csv ("path,label") into `dir`.
void dump_dataset(const std::string& dir, const std::vector<LabeledCrop>& dataset);

}  // namespace vialsim::perception
