#include "vialsim/perception/hough.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace vialsim::perception {

HoughParams hough_params_for(const WorkspaceConfig& config, double depth) {
  if (!(depth > 0.0)) throw InvalidArgument("hough_params_for: depth must be > 0");
  const auto& p = config.perception;
  const double r_px = config.camera.intrinsics.fx * config.rack.slot_radius / depth;
  HoughParams h;
  h.r_min = std::max(2, static_cast<int>(std::floor(r_px * p.radius_low)));
  h.r_max = std::max(h.r_min, static_cast<int>(std::ceil(r_px * p.radius_high)));
  h.edge_threshold = p.edge_threshold;
  h.vote_fraction = p.vote_fraction;
  return h;
}

namespace {

struct Peak {
  int x, y, ri;
  double votes;
};

}  // namespace

std::vector<Candidate> detect_circles(const Image& image, const HoughParams& params) {
  if (params.r_min <= 0 || params.r_max < params.r_min) {
    throw InvalidArgument("detect_circles: empty radius range");
  }
  const int w = image.width;
  const int h = image.height;
  if (w < 3 || h < 3) return {};
  const int nr = params.r_max - params.r_min + 1;
  const std::size_t plane = static_cast<std::size_t>(w) * h;
  std::vector<float> acc(plane * nr, 0.0f);

  auto deposit = [&](float* layer, double cx, double cy) {
    const double fx = std::floor(cx);
    const double fy = std::floor(cy);
    const int x0 = static_cast<int>(fx);
    const int y0 = static_cast<int>(fy);
    if (x0 < 0 || y0 < 0 || x0 + 1 >= w || y0 + 1 >= h) return;
    const float ax = static_cast<float>(cx - fx);
    const float ay = static_cast<float>(cy - fy);
    float* p = layer + static_cast<std::size_t>(y0) * w + x0;
    p[0] += (1 - ax) * (1 - ay);
    p[1] += ax * (1 - ay);
    p[w] += (1 - ax) * ay;
    p[w + 1] += ax * ay;
  };

  // Sobel edges, each voting along both gradient directions.
  for (int y = 1; y + 1 < h; ++y) {
    for (int x = 1; x + 1 < w; ++x) {
      const int a = image.at(x - 1, y - 1), b = image.at(x, y - 1), c = image.at(x + 1, y - 1);
      const int d = image.at(x - 1, y), f = image.at(x + 1, y);
      const int g = image.at(x - 1, y + 1), k = image.at(x, y + 1), m = image.at(x + 1, y + 1);
      const double gx = (c + 2 * f + m) - (a + 2 * d + g);
      const double gy = (g + 2 * k + m) - (a + 2 * b + c);
      const double mag = std::hypot(gx, gy);
      if (mag < params.edge_threshold) continue;
      const double dx = gx / mag;
      const double dy = gy / mag;
      for (int ri = 0; ri < nr; ++ri) {
        const double r = params.r_min + ri;
        float* layer = acc.data() + plane * ri;
        deposit(layer, x + r * dx, y + r * dy);
        deposit(layer, x - r * dx, y - r * dy);
      }
    }
  }

  // 3x3 box sums.
  std::vector<float> smooth(plane * nr, 0.0f);
  for (int ri = 0; ri < nr; ++ri) {
    const float* src = acc.data() + plane * ri;
    float* dst = smooth.data() + plane * ri;
    for (int y = 1; y + 1 < h; ++y) {
      for (int x = 1; x + 1 < w; ++x) {
        float s = 0.0f;
        for (int j = -1; j <= 1; ++j) {
          const float* row = src + static_cast<std::size_t>(y + j) * w + x;
          s += row[-1] + row[0] + row[1];
        }
        dst[static_cast<std::size_t>(y) * w + x] = s;
      }
    }
  }

  std::vector<Peak> peaks;
  for (int ri = 0; ri < nr; ++ri) {
    const double threshold = params.vote_fraction * 2.0 * std::numbers::pi * (params.r_min + ri);
    const float* layer = smooth.data() + plane * ri;
    for (int y = 1; y + 1 < h; ++y) {
      for (int x = 1; x + 1 < w; ++x) {
        const std::size_t idx = static_cast<std::size_t>(y) * w + x;
        const float value = layer[idx];
        if (value < threshold) continue;
        bool is_max = true;
        for (int dr = -1; dr <= 1 && is_max; ++dr) {
          if (ri + dr < 0 || ri + dr >= nr) continue;
          const float* other = smooth.data() + plane * (ri + dr);
          for (int j = -1; j <= 1 && is_max; ++j) {
            for (int i = -1; i <= 1; ++i) {
              if (dr == 0 && i == 0 && j == 0) continue;
              if (other[idx + static_cast<std::ptrdiff_t>(j) * w + i] > value) {
                is_max = false;
                break;
              }
            }
          }
        }
        if (is_max) peaks.push_back({x, y, ri, value});
      }
    }
  }

  std::sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) {
    if (a.votes != b.votes) return a.votes > b.votes;
    if (a.y != b.y) return a.y < b.y;
    if (a.x != b.x) return a.x < b.x;
    return a.ri < b.ri;
  });

  const double nms = params.nms_radius > 0.0 ? params.nms_radius : params.r_min;
  std::vector<Candidate> out;
  for (const Peak& p : peaks) {
    const float* raw = acc.data() + plane * p.ri;
    double sw = 0.0, su = 0.0, sv = 0.0;
    for (int j = -1; j <= 1; ++j) {
      for (int i = -1; i <= 1; ++i) {
        const double wgt = raw[static_cast<std::size_t>(p.y + j) * w + p.x + i];
        sw += wgt;
        su += wgt * (p.x + i);
        sv += wgt * (p.y + j);
      }
    }
    Candidate c;
    c.u = sw > 0.0 ? su / sw : p.x;
    c.v = sw > 0.0 ? sv / sw : p.y;
    c.r = params.r_min + p.ri;
    if (p.ri > 0 && p.ri + 1 < nr) {
      const std::size_t idx = static_cast<std::size_t>(p.y) * w + p.x;
      const double lo = smooth[plane * (p.ri - 1) + idx];
      const double hi = smooth[plane * (p.ri + 1) + idx];
      const double denom = lo - 2.0 * p.votes + hi;
      if (denom < 0.0) c.r += std::clamp(0.5 * (lo - hi) / denom, -0.5, 0.5);
    }
    c.votes = p.votes;

    bool suppressed = false;
    for (const Candidate& kept : out) {
      if (std::hypot(kept.u - c.u, kept.v - c.v) < nms) {
        suppressed = true;
        break;
      }
    }
    if (!suppressed) out.push_back(c);
  }
  return out;
}

}  // namespace vialsim::perception
