#include "vialsim/force/monitor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace vialsim::force {

ForceBuffer::ForceBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw InvalidArgument("ForceBuffer: capacity must be > 0");
}

void ForceBuffer::push(const ForceSample& s) {
  if (samples_.size() == capacity_) samples_.pop_front();
  samples_.push_back(s);
}

Vec3 ForceBuffer::mean() const {
  if (samples_.empty()) return {};
  // Recomputed from scratch: a running sum would drift over millions of ticks.
  double x = 0.0, y = 0.0, z = 0.0;
  for (const auto& s : samples_) {
    x += s.fx;
    y += s.fy;
    z += s.fz;
  }
  const double n = static_cast<double>(samples_.size());
  return {x / n, y / n, z / n};
}

std::size_t buffer_capacity(double rate, double seconds) {
  if (!(rate > 0.0) || !(seconds > 0.0)) throw InvalidArgument("buffer_capacity: rate and length must be > 0");
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(rate * seconds)));
}

Initialized init_baseline(const std::vector<ForceSample>& stationary, std::size_t capacity) {
  if (stationary.size() < capacity) {
    throw InvalidArgument("init_baseline: need " + std::to_string(capacity) + " stationary samples, got " +
                          std::to_string(stationary.size()));
  }
  ForceBuffer buffer(capacity);
  for (std::size_t k = stationary.size() - capacity; k < stationary.size(); ++k) buffer.push(stationary[k]);
  ForceBaseline baseline;
  baseline.mean = buffer.mean();
  baseline.magnitude = baseline.mean.norm();
  return {std::move(buffer), baseline};
}

double deviation(const ForceBuffer& buffer, const ForceBaseline& baseline, ForceAxis axis) {
  const Vec3 d = buffer.mean() - baseline.mean;
  return axis == ForceAxis::Z ? std::abs(d.z) : d.norm();
}

ForceDecision update_and_check(ForceBuffer& buffer, const ForceSample& sample, const ForceBaseline& baseline,
                               const CheckParams& params) {
  buffer.push(sample);
  const double ref = params.axis == ForceAxis::Z ? std::abs(baseline.mean.z) : baseline.magnitude;
  const double limit = params.threshold * std::max(ref, params.floor);
  return deviation(buffer, baseline, params.axis) > limit ? ForceDecision::Stop : ForceDecision::Continue;
}

Placement vial_placed(double grip_z, double r_z, double v_h) {
  return grip_z >= r_z + v_h ? Placement::ImpactedRackTop : Placement::InsertedBelowRackTop;
}

bool safety_stop(double grip_z, double r_z) { return grip_z < 0.5 * r_z; }

ForceTrace::ForceTrace(std::ostream& out) : out_(out) { out_ << "t,fx,fy,fz,mean_dev,decision\n"; }

void ForceTrace::record(double t, const ForceSample& s, double mean_dev, ForceDecision decision) {
  char line[256];
  std::snprintf(line, sizeof line, "%.6f,%.6f,%.6f,%.6f,%.6f,%s\n", t, s.fx, s.fy, s.fz, mean_dev,
                decision == ForceDecision::Stop ? "stop" : "continue");
  out_ << line;
}

}  // namespace vialsim::force
