#include "vialsim/tactile/tracker.hpp"

#include <algorithm>

namespace vialsim::tactile {

std::optional<ContactRegion> largest_contact(const TactileFrame& frame, const ReferenceSet& references,
                                             const PipelineParams& params) {
  auto regions = extract_contacts(binarize(difference_image(frame, references), params.threshold), params.min_area);
  if (regions.empty()) return std::nullopt;
  auto best = std::max_element(regions.begin(), regions.end(),
                               [](const ContactRegion& a, const ContactRegion& b) { return a.area < b.area; });
  return std::move(*best);
}

NeutralState capture_neutral(const FramePair& frames, const ReferencePair& references, const PipelineParams& params) {
  NeutralState n;
  n.width = frames[0].width;
  n.height = frames[0].height;
  for (std::size_t f = 0; f < 2; ++f) {
    if (auto region = largest_contact(frames[f], references[f], params)) n.centroid[f] = region->centroid;
  }
  return n;
}

std::optional<Vec2> estimate_offset(const NeutralState& neutral, const TactileCalibration& calibration) {
  Vec2 sum;
  int count = 0;
  for (std::size_t f = 0; f < 2; ++f) {
    if (!neutral.centroid[f]) continue;
    const Vec2 norm{neutral.centroid[f]->x / neutral.width, neutral.centroid[f]->y / neutral.height};
    sum += calibration.fingers[f].apply(norm);
    ++count;
  }
  if (count == 0) return std::nullopt;
  return sum * (1.0 / count);
}

Deviation track_deviation(const NeutralState& neutral, const FramePair& frames, const ReferencePair& references,
                          const TactileCalibration& calibration, const PipelineParams& params, double stop_px,
                          TactileFusion fusion) {
  Deviation out;
  double mag_sum = 0.0;
  double mag_max = 0.0;
  int count = 0;
  for (std::size_t f = 0; f < 2; ++f) {
    if (!neutral.centroid[f]) continue;
    const auto region = largest_contact(frames[f], references[f], params);
    if (!region) continue;
    const Vec2 d = region->centroid - *neutral.centroid[f];
    out.px[f] = d;
    const double m = d.norm();
    mag_sum += m;
    mag_max = std::max(mag_max, m);
    out.metres += calibration.fingers[f].apply_linear({d.x / neutral.width, d.y / neutral.height});
    ++count;
  }
  if (count == 0) {
    out.decision = TactileDecision::LostContact;
    return out;
  }
  out.metres = out.metres * (1.0 / count);
  out.magnitude_px = fusion == TactileFusion::Max ? mag_max : mag_sum / count;
  out.decision = out.magnitude_px > stop_px ? TactileDecision::Stop : TactileDecision::Continue;
  return out;
}

}  // namespace vialsim::tactile
