#include "vialsim/tactile/pipeline.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace vialsim::tactile {

RealImage difference_image(const TactileFrame& frame, const ReferenceSet& references) {
  if (references.frames.empty()) throw InvalidArgument("difference_image: empty reference set");
  for (const auto& s : references.frames) {
    if (s.width != frame.width || s.height != frame.height) {
      throw InvalidArgument("difference_image: reference and frame dimensions differ");
    }
  }
  RealImage delta(frame.width, frame.height, 0.0);
  const double inv = 1.0 / static_cast<double>(references.frames.size());
  for (const auto& s : references.frames) {
    for (std::size_t k = 0; k < delta.data.size(); ++k) {
      delta.data[k] += std::abs(static_cast<double>(s.pixels[k]) - static_cast<double>(frame.pixels[k]));
    }
  }
  for (double& v : delta.data) v *= inv;
  return delta;
}

BinaryImage binarize(const RealImage& delta, double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw InvalidArgument("binarize: threshold must lie in [0, 1]");
  BinaryImage b(delta.width, delta.height, 0);
  if (delta.data.empty()) return b;
  const auto [lo_it, hi_it] = std::minmax_element(delta.data.begin(), delta.data.end());
  const double lo = *lo_it;
  const double range = *hi_it - lo;
  for (std::size_t k = 0; k < delta.data.size(); ++k) {
    const double norm = range > 0.0 ? (delta.data[k] - lo) / range : 0.0;
    b.data[k] = norm >= t ? 1 : 0;
  }
  return b;
}

namespace {

// Neighbour offsets (drow, dcol) in clockwise order as displayed (rows grow downward).
constexpr std::array<int, 8> kDr = {0, 1, 1, 1, 0, -1, -1, -1};
constexpr std::array<int, 8> kDc = {1, 1, 0, -1, -1, -1, 0, 1};

int direction(int dr, int dc) {
  for (int k = 0; k < 8; ++k) {
    if (kDr[k] == dr && kDc[k] == dc) return k;
  }
  return -1;
}

}  // namespace

std::vector<Polygon> trace_borders(const BinaryImage& b) {
  // Work on a zero-padded copy so every neighbour lookup is in range.
  const int rows = b.height + 2;
  const int cols = b.width + 2;
  std::vector<int> f(static_cast<std::size_t>(rows) * cols, 0);
  for (int y = 0; y < b.height; ++y) {
    for (int x = 0; x < b.width; ++x) f[static_cast<std::size_t>(y + 1) * cols + x + 1] = b.at(x, y) ? 1 : 0;
  }
  auto at = [&](int r, int c) -> int& { return f[static_cast<std::size_t>(r) * cols + c]; };

  std::vector<Polygon> borders;
  int nbd = 1;
  for (int i = 1; i + 1 < rows; ++i) {
    for (int j = 1; j + 1 < cols; ++j) {
      const int v = at(i, j);
      bool outer = false;
      int i2 = i, j2 = j;
      if (v == 1 && at(i, j - 1) == 0) {
        outer = true;
        j2 = j - 1;
      } else if (v >= 1 && at(i, j + 1) == 0) {
        j2 = j + 1;  // hole border: traced so its pixels are marked, not reported
      } else {
        continue;
      }
      ++nbd;

      Polygon poly;
      // 3.1: clockwise from (i2, j2) for the first foreground neighbour
      const int start = direction(i2 - i, j2 - j);
      int found = -1;
      for (int k = 0; k < 8; ++k) {
        const int d = (start + k) % 8;
        if (at(i + kDr[d], j + kDc[d]) != 0) {
          found = d;
          break;
        }
      }
      if (found < 0) {
        at(i, j) = -nbd;
        if (outer) borders.push_back({Vec2{static_cast<double>(j - 1), static_cast<double>(i - 1)}});
        continue;
      }
      const int i1 = i + kDr[found], j1 = j + kDc[found];
      i2 = i1;
      j2 = j1;
      int i3 = i, j3 = j;
      while (true) {
        if (outer) poly.push_back({static_cast<double>(j3 - 1), static_cast<double>(i3 - 1)});
        // 3.3: counterclockwise from the neighbour after (i2, j2)
        const int from = direction(i2 - i3, j2 - j3);
        bool east_zero = false;
        int i4 = i3, j4 = j3;
        for (int k = 1; k <= 8; ++k) {
          const int d = ((from - k) % 8 + 8) % 8;
          const int r = i3 + kDr[d], c = j3 + kDc[d];
          if (at(r, c) != 0) {
            i4 = r;
            j4 = c;
            break;
          }
          if (d == 0) east_zero = true;
        }
        // 3.4
        if (east_zero) {
          at(i3, j3) = -nbd;
        } else if (at(i3, j3) == 1) {
          at(i3, j3) = nbd;
        }
        // 3.5
        if (i4 == i && j4 == j && i3 == i1 && j3 == j1) break;
        i2 = i3;
        j2 = j3;
        i3 = i4;
        j3 = j4;
      }
      if (outer) borders.push_back(std::move(poly));
    }
  }
  return borders;
}

double polygon_area(const Polygon& p) {
  const std::size_t n = p.size();
  if (n < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const Vec2& a = p[k];
    const Vec2& b = p[(k + 1) % n];
    twice += a.x * b.y - b.x * a.y;
  }
  return 0.5 * std::abs(twice);
}

Vec2 vertex_centroid(const Polygon& p) {
  if (p.empty()) throw InvalidArgument("vertex_centroid: empty polygon");
  Vec2 sum;
  for (const auto& v : p) sum += v;
  return sum * (1.0 / static_cast<double>(p.size()));
}

std::vector<ContactRegion> extract_contacts(const BinaryImage& b, double min_area) {
  if (min_area < 0.0) throw InvalidArgument("extract_contacts: min_area must be >= 0");
  std::vector<ContactRegion> out;
  for (auto& poly : trace_borders(b)) {
    const double area = polygon_area(poly);
    if (area < min_area) continue;
    ContactRegion region;
    region.centroid = vertex_centroid(poly);
    region.area = area;
    region.polygon = std::move(poly);
    out.push_back(std::move(region));
  }
  return out;
}

}  // namespace vialsim::tactile
