#pragma once

#include <cstddef>
#include <deque>
#include <ostream>
#include <vector>

#include "vialsim/core/config.hpp"
#include "vialsim/simworld/scene.hpp"

namespace vialsim::force {

using simworld::ForceSample;

/// Fixed-capacity FIFO of wrist force samples.
class ForceBuffer {
 public:
  explicit ForceBuffer(std::size_t capacity);

  void push(const ForceSample& s);  // evicts the oldest sample when full
  bool full() const { return samples_.size() == capacity_; }
  std::size_t size() const { return samples_.size(); }
  std::size_t capacity() const { return capacity_; }
  /// Exact arithmetic mean of the current contents (zero when empty).
  Vec3 mean() const;

 private:
  std::size_t capacity_;
  std::deque<ForceSample> samples_;
};

struct ForceBaseline {
  Vec3 mean;
  double magnitude = 0.0;
};

/// Capacity for a sensor rate and buffer length: round(rate * seconds), at least 1.
std::size_t buffer_capacity(double rate, double seconds = 1.0);

struct Initialized {
  ForceBuffer buffer;
  ForceBaseline baseline;
};

/// Fills a buffer of `capacity` from the last `capacity` stationary samples.
/// Throws InvalidArgument when fewer samples are supplied.
Initialized init_baseline(const std::vector<ForceSample>& stationary, std::size_t capacity);

enum class ForceDecision { Continue, Stop };

struct CheckParams {
  double threshold = 0.2;
  double floor = 0.5;  // N
  ForceAxis axis = ForceAxis::Vector;
};

/// Deviation of the buffer mean from the baseline, per the configured axis.
double deviation(const ForceBuffer& buffer, const ForceBaseline& baseline, ForceAxis axis);

/// Pushes the sample, then Stop iff deviation > threshold * max(|baseline|, floor).
ForceDecision update_and_check(ForceBuffer& buffer, const ForceSample& sample, const ForceBaseline& baseline,
                               const CheckParams& params);

enum class Placement { ImpactedRackTop, InsertedBelowRackTop };

Placement vial_placed(double grip_z, double r_z, double v_h);

bool safety_stop(double grip_z, double r_z);

/// Optional per-tick trace, CSV "t,fx,fy,fz,mean_dev,decision".
class ForceTrace {
 public:
  explicit ForceTrace(std::ostream& out);
  void record(double t, const ForceSample& s, double mean_dev, ForceDecision decision);

 private:
  std::ostream& out_;
};

}  // namespace vialsim::force
