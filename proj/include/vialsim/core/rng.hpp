#pragma once

#include <cstdint>
#include <random>

namespace vialsim {

/// Seeded random stream. A stream is identified by its root seed and the
/// chain of split indices that produced it; the same identity always yields
/// the same sequence. Streams are single-owner.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  /// Independent child stream, a pure function of (this stream's identity, index).
  /// Does not advance this stream.
  RngStream split(std::uint64_t index) const;

  std::uint64_t next_u64() { return engine_(); }
  double uniform(double lo, double hi);
  double normal(double mean, double sigma);
  int uniform_int(int lo, int hi);  // inclusive bounds
  bool bernoulli(double p);

  std::uint64_t key() const { return key_; }
  std::mt19937_64& engine() { return engine_; }

 private:
  RngStream(std::uint64_t key, int);

  std::uint64_t key_;
  std::mt19937_64 engine_;
};

/// Free-function form of RngStream::split.
inline RngStream split_rng(const RngStream& master, std::uint64_t trial_index) {
  return master.split(trial_index);
}

std::uint64_t splitmix64(std::uint64_t x);

/// Cheap per-pixel Gaussian noise: a xorshift stream indexing a fixed table of
/// standard normal quantiles. Good enough for sensor noise, far faster than
/// drawing from std::normal_distribution per pixel.
class PixelNoise {
 public:
  PixelNoise(std::uint64_t seed, double sigma);

  double operator()() {
    state_ ^= state_ >> 12;
    state_ ^= state_ << 25;
    state_ ^= state_ >> 27;
    return sigma_ * table()[(state_ * 0x2545f4914f6cdd1dULL) >> (64 - kBits)];
  }

 private:
  static constexpr int kBits = 12;
  static const float* table();

  std::uint64_t state_;
  double sigma_;
};

}  // namespace vialsim
