#include "vialsim/core/rng.hpp"

#include <array>
#include <cmath>

namespace vialsim {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RngStream::RngStream(std::uint64_t seed) : RngStream(splitmix64(seed), 0) {}

RngStream::RngStream(std::uint64_t key, int) : key_(key), engine_() {
  std::seed_seq seq{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32),
                    static_cast<std::uint32_t>(splitmix64(key)),
                    static_cast<std::uint32_t>(splitmix64(key) >> 32)};
  engine_.seed(seq);
}

RngStream RngStream::split(std::uint64_t index) const {
  return RngStream(splitmix64(key_ ^ splitmix64(index + 0x5851f42d4c957f2dULL)), 0);
}

double RngStream::uniform(double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  return d(engine_);
}

double RngStream::normal(double mean, double sigma) {
  if (sigma <= 0.0) return mean;
  std::normal_distribution<double> d(mean, sigma);
  return d(engine_);
}

int RngStream::uniform_int(int lo, int hi) {
  std::uniform_int_distribution<int> d(lo, hi);
  return d(engine_);
}

bool RngStream::bernoulli(double p) {
  if (p <= 0.0) return false;
  if (p >= 1.0) return true;
  std::bernoulli_distribution d(p);
  return d(engine_);
}

PixelNoise::PixelNoise(std::uint64_t seed, double sigma) : state_(splitmix64(seed) | 1ULL), sigma_(sigma) {}

const float* PixelNoise::table() {
  // Midpoint quantiles of the standard normal, so the table is exactly
  // symmetric with zero mean. Inverse CDF by bisection on erfc.
  static const std::array<float, 1 << kBits> t = [] {
    std::array<float, 1 << kBits> out{};
    const int n = 1 << kBits;
    for (int i = 0; i < n / 2; ++i) {
      const double p = (i + 0.5) / n;
      double lo = -10.0, hi = 0.0;
      for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        (0.5 * std::erfc(-mid / std::sqrt(2.0)) < p ? lo : hi) = mid;
      }
      out[i] = static_cast<float>(0.5 * (lo + hi));
      out[n - 1 - i] = -out[i];
    }
    return out;
  }();
  return t.data();
}

}  // namespace vialsim
