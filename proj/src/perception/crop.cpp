#include "vialsim/perception/crop.hpp"

#include <algorithm>
#include <cmath>

namespace vialsim::perception {

Crop extract_crop(const Image& image, const Candidate& candidate, double margin, int size) {
  if (!(candidate.r > 0.0)) throw InvalidArgument("extract_crop: candidate radius must be > 0");
  if (size <= 0) throw InvalidArgument("extract_crop: crop size must be > 0");
  if (image.empty()) throw InvalidArgument("extract_crop: empty image");

  Crop crop;
  crop.size = size;
  crop.source = candidate;
  crop.data.resize(static_cast<std::size_t>(size) * size);

  const double half = margin * candidate.r;
  const double step = 2.0 * half / size;
  const double max_x = image.width - 1;
  const double max_y = image.height - 1;
  for (int j = 0; j < size; ++j) {
    // clamping the sample position is edge replication
    const double sy = std::clamp(candidate.v - half + (j + 0.5) * step, 0.0, max_y);
    const int y0 = std::min(static_cast<int>(sy), image.height - 1);
    const int y1 = std::min(y0 + 1, image.height - 1);
    const double ay = sy - y0;
    for (int i = 0; i < size; ++i) {
      const double sx = std::clamp(candidate.u - half + (i + 0.5) * step, 0.0, max_x);
      const int x0 = std::min(static_cast<int>(sx), image.width - 1);
      const int x1 = std::min(x0 + 1, image.width - 1);
      const double ax = sx - x0;
      const double top = (1 - ax) * image.at(x0, y0) + ax * image.at(x1, y0);
      const double bottom = (1 - ax) * image.at(x0, y1) + ax * image.at(x1, y1);
      crop.data[static_cast<std::size_t>(j) * size + i] = static_cast<float>(((1 - ay) * top + ay * bottom) / 255.0);
    }
  }
  return crop;
}

}  // namespace vialsim::perception
