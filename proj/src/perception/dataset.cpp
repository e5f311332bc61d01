#include "vialsim/perception/dataset.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "vialsim/perception/hough.hpp"
#include "vialsim/simworld/physics.hpp"

namespace vialsim::perception {

CropLabel ground_truth_label(const Candidate& candidate, const simworld::SceneState& scene,
                             const simworld::CameraModel& truth) {
  const double depth = truth.pose.z - scene.rack.height;
  const double half_pitch_px = 0.5 * truth.intrinsics.fx * scene.rack.pitch / depth;
  double best = std::numeric_limits<double>::infinity();
  int best_row = -1, best_col = -1;
  for (int row = 0; row < scene.rack.rows; ++row) {
    for (int col = 0; col < scene.rack.cols; ++col) {
      const Vec2 c = simworld::slot_center(scene, row, col);
      const auto px = truth.project({c.x, c.y, scene.rack.height});
      if (!px) continue;
      const double d = std::hypot(px->x - candidate.u, px->y - candidate.v);
      if (d < best) {
        best = d;
        best_row = row;
        best_col = col;
      }
    }
  }
  if (best_row < 0 || best > half_pitch_px) return CropLabel::NotInRack;
  return scene.occupied(best_row, best_col) ? CropLabel::InRackOccupied : CropLabel::InRackVacant;
}

std::vector<LabeledCrop> generate_labeled_dataset(const WorkspaceConfig& config, int n_scenes, const RngStream& rng) {
  if (n_scenes < 1) throw InvalidArgument("generate_labeled_dataset: n_scenes must be >= 1");
  const auto& cam = config.camera;
  const double rz = config.rack.height;
  std::vector<LabeledCrop> out;
  for (int i = 0; i < n_scenes; ++i) {
    RngStream srng = rng.split(static_cast<std::uint64_t>(i));
    const auto scene = simworld::reset_trial(config, srng);
    Pose3 pose = cam.home;
    if (srng.bernoulli(config.training.refined_fraction)) {
      // lowered camera over a random slot, as in the refinement shot
      const Vec2 c = simworld::slot_center(scene, srng.uniform_int(0, config.rack.rows - 1),
                                           srng.uniform_int(0, config.rack.cols - 1));
      pose.x = c.x + srng.normal(0.0, 0.002);
      pose.y = c.y + srng.normal(0.0, 0.002);
      pose.z = rz + cam.refine_factor * (cam.home.z - rz);
    }
    const auto shot = simworld::capture(scene, pose, config, srng);
    const auto params = hough_params_for(config, pose.z - rz);
    for (const auto& c : detect_circles(shot.image, params)) {
      LabeledCrop lc;
      lc.crop = extract_crop(shot.image, c, config.perception.crop_margin, config.perception.crop_size);
      lc.label = ground_truth_label(c, scene, shot.truth);
      out.push_back(std::move(lc));
    }
  }
  return out;
}

void dump_dataset(const std::string& dir, const std::vector<LabeledCrop>& dataset) {
  std::filesystem::create_directories(dir);
  std::ofstream index(std::filesystem::path(dir) / "index.csv");
  if (!index) throw std::runtime_error("cannot write dataset index in " + dir);
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto& crop = dataset[i].crop;
    Image img(crop.size, crop.size);
    for (std::size_t k = 0; k < crop.data.size(); ++k) img.pixels[k] = to_gray(crop.data[k] * 255.0);
    char name[32];
    std::snprintf(name, sizeof name, "crop_%06zu.pgm", i);
    write_pgm((std::filesystem::path(dir) / name).string(), img);
    index << name << ',' << to_string(dataset[i].label) << '\n';
  }
}

}  // namespace vialsim::perception
