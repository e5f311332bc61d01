#pragma once

#include <array>
#include <string>
#include <vector>

#include "vialsim/core/types.hpp"

namespace vialsim::tactile {

/// offset = gain * (nu, nv) + bias, with (nu, nv) image coordinates normalised to [0, 1].
struct AffineMap {
  std::array<double, 4> gain{};  // row-major 2x2
  Vec2 bias;
  double residual_rms = 0.0;

  Vec2 apply(Vec2 normalized) const {
    return {gain[0] * normalized.x + gain[1] * normalized.y + bias.x,
            gain[2] * normalized.x + gain[3] * normalized.y + bias.y};
  }
  /// Linear part only, for displacements.
  Vec2 apply_linear(Vec2 d) const { return {gain[0] * d.x + gain[1] * d.y, gain[2] * d.x + gain[3] * d.y}; }
};

struct CalibrationSample {
  Vec2 normalized;
  Vec2 offset;  // m
};

/// Ordinary least squares per output axis. Throws InvalidArgument for fewer
/// than 3 samples or a rank-deficient (collinear) design.
AffineMap calibrate_mapping(const std::vector<CalibrationSample>& samples);

/// Index 0 is the left finger, 1 the right.
struct TactileCalibration {
  std::array<AffineMap, 2> fingers;
};

/// Text format, one line per finger: name, 6 parameters (g00 g01 g10 g11 b0 b1), residual RMS.
std::string encode_calibration(const TactileCalibration& calibration);
TactileCalibration decode_calibration(const std::string& text);
void save_calibration(const std::string& path, const TactileCalibration& calibration);
TactileCalibration load_calibration(const std::string& path);

}  // namespace vialsim::tactile
