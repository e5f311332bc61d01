#include "vialsim/simworld/scene.hpp"

#include <algorithm>
#include <cmath>

namespace vialsim::simworld {

std::string to_string(ContactState s) {
  switch (s) {
    case ContactState::None: return "none";
    case ContactState::RackTop: return "rack_top";
    case ContactState::Table: return "table";
    case ContactState::Inserted: return "inserted";
  }
  return "unknown";
}

std::string to_string(PlacementResult::Kind k) {
  switch (k) {
    case PlacementResult::Kind::Inserted: return "inserted";
    case PlacementResult::Kind::RestingOnRack: return "resting_on_rack";
    case PlacementResult::Kind::DroppedOnTable: return "dropped_on_table";
    case PlacementResult::Kind::StillHeld: return "still_held";
  }
  return "unknown";
}

int SceneState::vacant_count() const {
  return static_cast<int>(std::count(occupancy.begin(), occupancy.end(), 0));
}

Vec2 to_rack_frame(const SceneState& scene, Vec2 p) {
  const double c = std::cos(scene.rack_pose.yaw);
  const double s = std::sin(scene.rack_pose.yaw);
  const double dx = p.x - scene.rack_pose.x;
  const double dy = p.y - scene.rack_pose.y;
  return {c * dx + s * dy, -s * dx + c * dy};
}

Vec2 slot_center(const SceneState& scene, int row, int col) {
  const auto& r = scene.rack;
  const double lx = (col - 0.5 * (r.cols - 1)) * r.pitch;
  const double ly = (row - 0.5 * (r.rows - 1)) * r.pitch;
  const double c = std::cos(scene.rack_pose.yaw);
  const double s = std::sin(scene.rack_pose.yaw);
  return {scene.rack_pose.x + c * lx - s * ly, scene.rack_pose.y + s * lx + c * ly};
}

bool inside_footprint(const SceneState& scene, Vec2 p, double margin) {
  const Vec2 q = to_rack_frame(scene, p);
  return std::abs(q.x) <= 0.5 * scene.rack.footprint_w + margin &&
         std::abs(q.y) <= 0.5 * scene.rack.footprint_h + margin;
}

NearestSlot nearest_slot(const SceneState& scene, Vec2 p) {
  const auto& r = scene.rack;
  const Vec2 q = to_rack_frame(scene, p);
  const int col = std::clamp(static_cast<int>(std::lround(q.x / r.pitch + 0.5 * (r.cols - 1))), 0, r.cols - 1);
  const int row = std::clamp(static_cast<int>(std::lround(q.y / r.pitch + 0.5 * (r.rows - 1))), 0, r.rows - 1);
  const double lx = (col - 0.5 * (r.cols - 1)) * r.pitch;
  const double ly = (row - 0.5 * (r.rows - 1)) * r.pitch;
  return {row, col, std::hypot(q.x - lx, q.y - ly)};
}

Vec2 vial_axis(const SceneState& scene) {
  Vec2 axis = scene.grip.xy();
  if (scene.held) axis += scene.held->offset + scene.held->sway;
  return axis;
}

}  // namespace vialsim::simworld
