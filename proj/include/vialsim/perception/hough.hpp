#pragma once

#include <vector>

#include "vialsim/core/config.hpp"
#include "vialsim/core/image.hpp"

namespace vialsim::perception {

/// Circle hypothesis in pixel coordinates (pixel centres at integer positions).
struct Candidate {
  double u = 0.0;
  double v = 0.0;
  double r = 0.0;
  double votes = 0.0;
};

struct HoughParams {
  int r_min = 0;
  int r_max = 0;
  double edge_threshold = 40.0;  // Sobel magnitude
  double vote_fraction = 0.4;    // of the 2*pi*r votes a full circle collects
  double nms_radius = 0.0;       // 0 -> r_min
};

/// Radius range around the slot radius seen from `depth` metres above the rack top.
HoughParams hough_params_for(const WorkspaceConfig& config, double depth);

/// Gradient-directed circular Hough transform. Deliberately permissive: every
/// local accumulator peak above the vote threshold is reported, strongest first.
/// Throws InvalidArgument for an empty or non-positive radius range.
std::vector<Candidate> detect_circles(const Image& image, const HoughParams& params);

}  // namespace vialsim::perception
