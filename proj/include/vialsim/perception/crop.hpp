#pragma once

#include <vector>

#include "vialsim/core/image.hpp"
#include "vialsim/perception/hough.hpp"

namespace vialsim::perception {

/// Square patch resampled around a candidate, values in [0, 1].
struct Crop {
  int size = 0;
  std::vector<float> data;  // row-major size x size
  Candidate source;

  float at(int x, int y) const { return data[static_cast<std::size_t>(y) * size + x]; }
};

/// Samples the square of half-side margin * r centred on the candidate,
/// replicating border pixels where the square leaves the image.
Crop extract_crop(const Image& image, const Candidate& candidate, double margin = 1.10, int size = 32);

}  // namespace vialsim::perception
