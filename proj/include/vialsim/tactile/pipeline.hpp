#pragma once

#include <vector>

#include "vialsim/core/image.hpp"
#include "vialsim/core/types.hpp"

namespace vialsim::tactile {

using Polygon = std::vector<Vec2>;

/// Frames captured with the gripper open and nothing in contact.
struct ReferenceSet {
  std::vector<TactileFrame> frames;
};

struct ContactRegion {
  Polygon polygon;
  double area = 0.0;
  Vec2 centroid;  // vertex mean
};

/// Per-pixel mean over the references of |s - i|. Throws InvalidArgument on
/// an empty set or mismatched dimensions.
RealImage difference_image(const TactileFrame& frame, const ReferenceSet& references);

/// Min-max normalises and thresholds (>= t). A constant image normalises to zero.
BinaryImage binarize(const RealImage& delta, double t);

/// Outer borders of the 8-connected foreground components, found by Suzuki
/// border following. Vertices are pixel centres (x = column, y = row).
std::vector<Polygon> trace_borders(const BinaryImage& b);

/// Shoelace area, always non-negative.
double polygon_area(const Polygon& p);

Vec2 vertex_centroid(const Polygon& p);

/// Border polygons with area >= min_area, each with its vertex-mean centroid.
std::vector<ContactRegion> extract_contacts(const BinaryImage& b, double min_area);

}  // namespace vialsim::tactile
