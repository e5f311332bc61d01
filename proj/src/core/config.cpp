#include "vialsim/core/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

namespace vialsim {
namespace {

struct Field {
  std::string key;
  std::function<void(WorkspaceConfig&, const std::string&)> set;
  std::function<std::string(const WorkspaceConfig&)> get;
};

std::string trim(std::string_view s) {
  const auto* ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return std::string(s.substr(b, e - b + 1));
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_double(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("invalid number for '" + key + "': '" + text + "'");
  }
}

template <typename Int>
Int parse_int(const std::string& key, const std::string& text) {
  Int v{};
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) {
    throw ConfigError("invalid integer for '" + key + "': '" + text + "'");
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw ConfigError("invalid boolean for '" + key + "': '" + text + "'");
}

template <typename Access>
Field real(std::string key, Access access) {
  return {key,
          [key, access](WorkspaceConfig& c, const std::string& v) { access(c) = parse_double(key, v); },
          [access](const WorkspaceConfig& c) {
            return format_double(access(const_cast<WorkspaceConfig&>(c)));
          }};
}

template <typename Access>
Field integer(std::string key, Access access) {
  return {key,
          [key, access](WorkspaceConfig& c, const std::string& v) {
            auto& ref = access(c);
            ref = parse_int<std::remove_reference_t<decltype(ref)>>(key, v);
          },
          [access](const WorkspaceConfig& c) {
            return std::to_string(access(const_cast<WorkspaceConfig&>(c)));
          }};
}

template <typename Access>
Field boolean(std::string key, Access access) {
  return {key,
          [key, access](WorkspaceConfig& c, const std::string& v) { access(c) = parse_bool(key, v); },
          [access](const WorkspaceConfig& c) {
            return std::string(access(const_cast<WorkspaceConfig&>(c)) ? "true" : "false");
          }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
    f.push_back(real("camera.fx", [](WorkspaceConfig& c) -> double& { return c.camera.intrinsics.fx; }));
    f.push_back(real("camera.fy", [](WorkspaceConfig& c) -> double& { return c.camera.intrinsics.fy; }));
    f.push_back(real("camera.cx", [](WorkspaceConfig& c) -> double& { return c.camera.intrinsics.cx; }));
    f.push_back(real("camera.cy", [](WorkspaceConfig& c) -> double& { return c.camera.intrinsics.cy; }));
    f.push_back(integer("camera.width", [](WorkspaceConfig& c) -> int& { return c.camera.intrinsics.width; }));
    f.push_back(integer("camera.height", [](WorkspaceConfig& c) -> int& { return c.camera.intrinsics.height; }));
    f.push_back(real("camera.home_x", [](WorkspaceConfig& c) -> double& { return c.camera.home.x; }));
    f.push_back(real("camera.home_y", [](WorkspaceConfig& c) -> double& { return c.camera.home.y; }));
    f.push_back(real("camera.home_z", [](WorkspaceConfig& c) -> double& { return c.camera.home.z; }));
    f.push_back(real("camera.mount_dz", [](WorkspaceConfig& c) -> double& { return c.camera.mount_dz; }));
    f.push_back(real("camera.mount_tilt_x", [](WorkspaceConfig& c) -> double& { return c.camera.mount_tilt_x; }));
    f.push_back(real("camera.mount_tilt_y", [](WorkspaceConfig& c) -> double& { return c.camera.mount_tilt_y; }));
    f.push_back(real("camera.pixel_noise", [](WorkspaceConfig& c) -> double& { return c.camera.pixel_noise; }));
    f.push_back(real("camera.refine_factor", [](WorkspaceConfig& c) -> double& { return c.camera.refine_factor; }));

    f.push_back(integer("rack.rows", [](WorkspaceConfig& c) -> int& { return c.rack.rows; }));
    f.push_back(integer("rack.cols", [](WorkspaceConfig& c) -> int& { return c.rack.cols; }));
    f.push_back(real("rack.pitch", [](WorkspaceConfig& c) -> double& { return c.rack.pitch; }));
    f.push_back(real("rack.slot_radius", [](WorkspaceConfig& c) -> double& { return c.rack.slot_radius; }));
    f.push_back(real("rack.height", [](WorkspaceConfig& c) -> double& { return c.rack.height; }));
    f.push_back(real("rack.slot_depth", [](WorkspaceConfig& c) -> double& { return c.rack.slot_depth; }));
    f.push_back(real("rack.footprint_w", [](WorkspaceConfig& c) -> double& { return c.rack.footprint_w; }));
    f.push_back(real("rack.footprint_h", [](WorkspaceConfig& c) -> double& { return c.rack.footprint_h; }));

    f.push_back(real("vial.radius", [](WorkspaceConfig& c) -> double& { return c.vial.radius; }));
    f.push_back(real("vial.height", [](WorkspaceConfig& c) -> double& { return c.vial.height; }));
    f.push_back(real("vial.grip_height", [](WorkspaceConfig& c) -> double& { return c.vial.grip_height; }));

    f.push_back(real("workspace.x_min", [](WorkspaceConfig& c) -> double& { return c.workspace.x_min; }));
    f.push_back(real("workspace.x_max", [](WorkspaceConfig& c) -> double& { return c.workspace.x_max; }));
    f.push_back(real("workspace.y_min", [](WorkspaceConfig& c) -> double& { return c.workspace.y_min; }));
    f.push_back(real("workspace.y_max", [](WorkspaceConfig& c) -> double& { return c.workspace.y_max; }));
    f.push_back(real("workspace.yaw_range", [](WorkspaceConfig& c) -> double& { return c.workspace.yaw_range; }));
    f.push_back(real("workspace.occupancy", [](WorkspaceConfig& c) -> double& { return c.workspace.occupancy; }));
    f.push_back(integer("workspace.distractors", [](WorkspaceConfig& c) -> int& { return c.workspace.distractors; }));
    f.push_back(real("workspace.source_x", [](WorkspaceConfig& c) -> double& { return c.workspace.source_x; }));
    f.push_back(real("workspace.source_y", [](WorkspaceConfig& c) -> double& { return c.workspace.source_y; }));

    f.push_back(real("noise.visual_bias", [](WorkspaceConfig& c) -> double& { return c.noise.visual_bias; }));
    f.push_back(real("noise.detection", [](WorkspaceConfig& c) -> double& { return c.noise.detection; }));
    f.push_back(real("noise.force", [](WorkspaceConfig& c) -> double& { return c.noise.force; }));
    f.push_back(real("noise.tactile", [](WorkspaceConfig& c) -> double& { return c.noise.tactile; }));
    f.push_back(real("noise.grasp", [](WorkspaceConfig& c) -> double& { return c.noise.grasp; }));
    f.push_back(real("noise.tilt", [](WorkspaceConfig& c) -> double& { return c.noise.tilt; }));

    f.push_back(real("contact.stiffness", [](WorkspaceConfig& c) -> double& { return c.contact.stiffness; }));
    f.push_back(real("contact.slip_gain", [](WorkspaceConfig& c) -> double& { return c.contact.slip_gain; }));
    f.push_back(real("contact.rim_ratio", [](WorkspaceConfig& c) -> double& { return c.contact.rim_ratio; }));
    f.push_back(real("contact.twist_fraction", [](WorkspaceConfig& c) -> double& { return c.contact.twist_fraction; }));
    f.push_back(real("contact.payload_mass", [](WorkspaceConfig& c) -> double& { return c.contact.payload_mass; }));
    f.push_back(real("contact.pose_bias_gain", [](WorkspaceConfig& c) -> double& { return c.contact.pose_bias_gain; }));

    f.push_back(real("gripper.mu_rubber", [](WorkspaceConfig& c) -> double& { return c.gripper.mu_rubber; }));
    f.push_back(real("gripper.mu_tactile", [](WorkspaceConfig& c) -> double& { return c.gripper.mu_tactile; }));
    f.push_back(real("gripper.half_width", [](WorkspaceConfig& c) -> double& { return c.gripper.half_width; }));

    f.push_back(real("force.rate", [](WorkspaceConfig& c) -> double& { return c.force.rate; }));
    f.push_back(real("force.buffer_seconds", [](WorkspaceConfig& c) -> double& { return c.force.buffer_seconds; }));
    f.push_back(real("force.threshold", [](WorkspaceConfig& c) -> double& { return c.force.threshold; }));
    f.push_back(real("force.floor", [](WorkspaceConfig& c) -> double& { return c.force.floor; }));
    f.push_back({"force.axis",
                 [](WorkspaceConfig& c, const std::string& v) {
                   if (v == "vector") c.force.axis = ForceAxis::Vector;
                   else if (v == "z") c.force.axis = ForceAxis::Z;
                   else throw ConfigError("invalid value for 'force.axis': '" + v + "' (expected z|vector)");
                 },
                 [](const WorkspaceConfig& c) {
                   return std::string(c.force.axis == ForceAxis::Z ? "z" : "vector");
                 }});

    f.push_back(real("tactile.rate", [](WorkspaceConfig& c) -> double& { return c.tactile.rate; }));
    f.push_back(integer("tactile.width", [](WorkspaceConfig& c) -> int& { return c.tactile.width; }));
    f.push_back(integer("tactile.height", [](WorkspaceConfig& c) -> int& { return c.tactile.height; }));
    f.push_back(real("tactile.px_per_m", [](WorkspaceConfig& c) -> double& { return c.tactile.px_per_m; }));
    f.push_back(real("tactile.blob_diameter", [](WorkspaceConfig& c) -> double& { return c.tactile.blob_diameter; }));
    f.push_back(real("tactile.blob_intensity", [](WorkspaceConfig& c) -> double& { return c.tactile.blob_intensity; }));
    f.push_back(real("tactile.shear_gain", [](WorkspaceConfig& c) -> double& { return c.tactile.shear_gain; }));
    f.push_back(real("tactile.threshold", [](WorkspaceConfig& c) -> double& { return c.tactile.threshold; }));
    f.push_back(real("tactile.min_area", [](WorkspaceConfig& c) -> double& { return c.tactile.min_area; }));
    f.push_back(real("tactile.stop_px", [](WorkspaceConfig& c) -> double& { return c.tactile.stop_px; }));
    f.push_back(integer("tactile.references", [](WorkspaceConfig& c) -> int& { return c.tactile.references; }));
    f.push_back({"tactile.fusion",
                 [](WorkspaceConfig& c, const std::string& v) {
                   if (v == "average") c.tactile.fusion = TactileFusion::Average;
                   else if (v == "max") c.tactile.fusion = TactileFusion::Max;
                   else throw ConfigError("invalid value for 'tactile.fusion': '" + v + "' (expected average|max)");
                 },
                 [](const WorkspaceConfig& c) {
                   return std::string(c.tactile.fusion == TactileFusion::Max ? "max" : "average");
                 }});

    f.push_back(real("search.spacing", [](WorkspaceConfig& c) -> double& { return c.search.spacing; }));
    f.push_back(real("search.lift_clearance", [](WorkspaceConfig& c) -> double& { return c.search.lift_clearance; }));

    f.push_back(real("motion.speed", [](WorkspaceConfig& c) -> double& { return c.motion.speed; }));
    f.push_back(real("motion.descent_speed", [](WorkspaceConfig& c) -> double& { return c.motion.descent_speed; }));
    f.push_back(real("motion.accel", [](WorkspaceConfig& c) -> double& { return c.motion.accel; }));
    f.push_back(real("motion.approach_gap", [](WorkspaceConfig& c) -> double& { return c.motion.approach_gap; }));
    f.push_back(real("motion.visual_floor", [](WorkspaceConfig& c) -> double& { return c.motion.visual_floor; }));

    f.push_back(real("timing.imaging", [](WorkspaceConfig& c) -> double& { return c.timing.imaging; }));
    f.push_back(real("timing.grasp", [](WorkspaceConfig& c) -> double& { return c.timing.grasp; }));
    f.push_back(real("timing.release", [](WorkspaceConfig& c) -> double& { return c.timing.release; }));
    f.push_back(real("timing.baseline", [](WorkspaceConfig& c) -> double& { return c.timing.baseline; }));

    f.push_back(real("perception.theta_rack", [](WorkspaceConfig& c) -> double& { return c.perception.theta_rack; }));
    f.push_back(real("perception.theta_occ", [](WorkspaceConfig& c) -> double& { return c.perception.theta_occ; }));
    f.push_back(real("perception.tie_eps", [](WorkspaceConfig& c) -> double& { return c.perception.tie_eps; }));
    f.push_back(real("perception.vote_fraction", [](WorkspaceConfig& c) -> double& { return c.perception.vote_fraction; }));
    f.push_back(real("perception.edge_threshold", [](WorkspaceConfig& c) -> double& { return c.perception.edge_threshold; }));
    f.push_back(real("perception.radius_low", [](WorkspaceConfig& c) -> double& { return c.perception.radius_low; }));
    f.push_back(real("perception.radius_high", [](WorkspaceConfig& c) -> double& { return c.perception.radius_high; }));
    f.push_back(real("perception.crop_margin", [](WorkspaceConfig& c) -> double& { return c.perception.crop_margin; }));
    f.push_back(integer("perception.crop_size", [](WorkspaceConfig& c) -> int& { return c.perception.crop_size; }));

    f.push_back(real("training.learning_rate", [](WorkspaceConfig& c) -> double& { return c.training.learning_rate; }));
    f.push_back(real("training.momentum", [](WorkspaceConfig& c) -> double& { return c.training.momentum; }));
    f.push_back(integer("training.epochs", [](WorkspaceConfig& c) -> int& { return c.training.epochs; }));
    f.push_back(integer("training.batch", [](WorkspaceConfig& c) -> int& { return c.training.batch; }));
    f.push_back(integer("training.scenes", [](WorkspaceConfig& c) -> int& { return c.training.scenes; }));
    f.push_back(real("training.refined_fraction", [](WorkspaceConfig& c) -> double& { return c.training.refined_fraction; }));

    f.push_back(boolean("control.release_on_exhausted", [](WorkspaceConfig& c) -> bool& { return c.control.release_on_exhausted; }));
    f.push_back(integer("seed", [](WorkspaceConfig& c) -> std::uint64_t& { return c.seed; }));
    return f;
  }();
  return table;
}

const Field* find_field(const std::string& key) {
  for (const auto& f : fields()) {
    if (f.key == key) return &f;
  }
  return nullptr;
}

void require(bool ok, const char* key, const std::string& what) {
  if (!ok) throw ConfigError(std::string("invalid value for '") + key + "': " + what);
}

void apply_line(WorkspaceConfig& config, const std::string& line, const std::string& where) {
  const auto eq = line.find('=');
  if (eq == std::string::npos) {
    throw ConfigError(where + "expected 'key = value', got '" + line + "'");
  }
  const auto key = trim(std::string_view(line).substr(0, eq));
  const auto value = trim(std::string_view(line).substr(eq + 1));
  if (key.empty()) throw ConfigError(where + "missing key before '='");
  if (value.empty()) throw ConfigError(where + "missing value for '" + key + "'");
  const Field* field = find_field(key);
  if (field == nullptr) throw ConfigError(where + "unknown key '" + key + "'");
  try {
    field->set(config, value);
  } catch (const ConfigError& e) {
    throw ConfigError(where + e.what());
  }
}

}  // namespace

WorkspaceConfig load_config(std::string_view text) {
  WorkspaceConfig config;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const auto line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    apply_line(config, line, "line " + std::to_string(line_no) + ": ");
  }
  validate(config);
  return config;
}

WorkspaceConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return load_config(ss.str());
}

void apply_overrides(WorkspaceConfig& config, const std::vector<std::string>& overrides) {
  for (const auto& o : overrides) apply_line(config, trim(o), "override: ");
  validate(config);
}

void validate(const WorkspaceConfig& c) {
  const auto& cam = c.camera;
  const auto& k = cam.intrinsics;
  require(k.fx > 0, "camera.fx", "must be > 0");
  require(k.fy > 0, "camera.fy", "must be > 0");
  require(k.width >= 16, "camera.width", "must be >= 16");
  require(k.height >= 16, "camera.height", "must be >= 16");
  require(k.cx >= 0 && k.cx <= k.width, "camera.cx", "must lie within the image");
  require(k.cy >= 0 && k.cy <= k.height, "camera.cy", "must lie within the image");
  require(cam.home.z > c.rack.height, "camera.home_z", "camera must be above the rack");
  require(cam.mount_dz >= 0, "camera.mount_dz", "must be >= 0");
  require(cam.pixel_noise >= 0, "camera.pixel_noise", "must be >= 0");
  require(cam.refine_factor > 0 && cam.refine_factor <= 1, "camera.refine_factor", "must be in (0, 1]");

  const auto& r = c.rack;
  require(r.rows >= 1, "rack.rows", "must be >= 1");
  require(r.cols >= 1, "rack.cols", "must be >= 1");
  require(r.slot_radius > 0, "rack.slot_radius", "must be > 0");
  require(r.pitch > 2 * r.slot_radius, "rack.pitch", "must exceed 2 * rack.slot_radius");
  require(r.height > 0, "rack.height", "must be > 0");
  require(r.slot_depth > 0 && r.slot_depth <= r.height, "rack.slot_depth", "must be in (0, rack.height]");
  require(r.footprint_w >= (r.cols - 1) * r.pitch + 2 * r.slot_radius, "rack.footprint_w",
          "must contain every slot");
  require(r.footprint_h >= (r.rows - 1) * r.pitch + 2 * r.slot_radius, "rack.footprint_h",
          "must contain every slot");

  const auto& v = c.vial;
  require(v.radius > 0 && v.radius < r.slot_radius, "vial.radius", "must be in (0, rack.slot_radius)");
  require(v.height > 0, "vial.height", "must be > 0");
  require(v.grip_height > 0 && v.grip_height <= v.height, "vial.grip_height", "must be in (0, vial.height]");

  const auto& w = c.workspace;
  require(w.x_min <= w.x_max, "workspace.x_max", "must be >= workspace.x_min");
  require(w.y_min <= w.y_max, "workspace.y_max", "must be >= workspace.y_min");
  require(w.yaw_range >= 0, "workspace.yaw_range", "must be >= 0");
  require(w.occupancy >= 0 && w.occupancy <= 1, "workspace.occupancy", "must be in [0, 1]");
  require(w.distractors >= 0, "workspace.distractors", "must be >= 0");

  const auto& n = c.noise;
  require(n.visual_bias >= 0, "noise.visual_bias", "must be >= 0");
  require(n.detection >= 0, "noise.detection", "must be >= 0");
  require(n.force >= 0, "noise.force", "must be >= 0");
  require(n.tactile >= 0, "noise.tactile", "must be >= 0");
  require(n.grasp >= 0, "noise.grasp", "must be >= 0");
  require(n.tilt >= 0, "noise.tilt", "must be >= 0");

  require(c.contact.stiffness > 0, "contact.stiffness", "must be > 0");
  require(c.contact.slip_gain >= 0, "contact.slip_gain", "must be >= 0");
  require(c.contact.rim_ratio >= 0, "contact.rim_ratio", "must be >= 0");
  require(c.contact.twist_fraction >= 0 && c.contact.twist_fraction <= 1, "contact.twist_fraction",
          "must be in [0, 1]");
  require(c.contact.payload_mass > 0, "contact.payload_mass", "must be > 0");

  require(c.gripper.mu_rubber > 0, "gripper.mu_rubber", "must be > 0");
  require(c.gripper.mu_tactile > 0, "gripper.mu_tactile", "must be > 0");
  require(c.gripper.half_width > 0, "gripper.half_width", "must be > 0");

  require(c.force.rate > 0, "force.rate", "must be > 0");
  require(c.force.buffer_seconds > 0 && c.force.rate * c.force.buffer_seconds >= 1.0, "force.buffer_seconds",
          "buffer must hold at least one sample");
  require(c.force.threshold > 0, "force.threshold", "must be > 0");
  require(c.force.floor > 0, "force.floor", "must be > 0");

  const auto& t = c.tactile;
  require(t.rate > 0, "tactile.rate", "must be > 0");
  require(t.width >= 8, "tactile.width", "must be >= 8");
  require(t.height >= 8, "tactile.height", "must be >= 8");
  require(t.px_per_m > 0, "tactile.px_per_m", "must be > 0");
  require(t.blob_diameter > 0, "tactile.blob_diameter", "must be > 0");
  require(t.threshold >= 0 && t.threshold <= 1, "tactile.threshold", "must be in [0, 1]");
  require(t.min_area >= 0, "tactile.min_area", "must be >= 0");
  require(t.stop_px > 0, "tactile.stop_px", "must be > 0");
  require(t.references >= 1, "tactile.references", "must be >= 1");

  require(c.search.spacing > 0, "search.spacing", "must be > 0");
  require(c.search.lift_clearance >= 0, "search.lift_clearance", "must be >= 0");

  require(c.motion.speed > 0, "motion.speed", "must be > 0");
  require(c.motion.descent_speed > 0, "motion.descent_speed", "must be > 0");
  require(c.motion.accel > 0, "motion.accel", "must be > 0");
  require(c.motion.approach_gap >= 0, "motion.approach_gap", "must be >= 0");
  require(c.motion.visual_floor >= 0 && c.motion.visual_floor < r.slot_depth, "motion.visual_floor",
          "must be in [0, rack.slot_depth)");

  require(c.timing.imaging >= 0, "timing.imaging", "must be >= 0");
  require(c.timing.grasp >= 0, "timing.grasp", "must be >= 0");
  require(c.timing.release >= 0, "timing.release", "must be >= 0");
  require(c.timing.baseline >= 0, "timing.baseline", "must be >= 0");

  const auto& p = c.perception;
  require(p.theta_rack >= 0 && p.theta_rack <= 1, "perception.theta_rack", "must be in [0, 1]");
  require(p.theta_occ >= 0 && p.theta_occ <= 1, "perception.theta_occ", "must be in [0, 1]");
  require(p.tie_eps >= 0, "perception.tie_eps", "must be >= 0");
  require(p.vote_fraction > 0 && p.vote_fraction <= 1, "perception.vote_fraction", "must be in (0, 1]");
  require(p.edge_threshold > 0, "perception.edge_threshold", "must be > 0");
  require(p.radius_low > 0, "perception.radius_low", "must be > 0");
  require(p.radius_high > p.radius_low, "perception.radius_high", "must exceed perception.radius_low");
  require(p.crop_margin > 0, "perception.crop_margin", "must be > 0");
  require(p.crop_size >= 16 && p.crop_size % 16 == 0, "perception.crop_size", "must be a multiple of 16");

  const auto& tr = c.training;
  require(tr.learning_rate > 0, "training.learning_rate", "must be > 0");
  require(tr.momentum >= 0 && tr.momentum < 1, "training.momentum", "must be in [0, 1)");
  require(tr.epochs >= 1, "training.epochs", "must be >= 1");
  require(tr.batch >= 1, "training.batch", "must be >= 1");
  require(tr.scenes >= 1, "training.scenes", "must be >= 1");
  require(tr.refined_fraction >= 0 && tr.refined_fraction <= 1, "training.refined_fraction", "must be in [0, 1]");
}

std::string serialize(const WorkspaceConfig& config) {
  std::string out;
  for (const auto& f : fields()) {
    out += f.key;
    out += " = ";
    out += f.get(config);
    out += '\n';
  }
  return out;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& f : fields()) keys.push_back(f.key);
  return keys;
}

bool operator==(const WorkspaceConfig& a, const WorkspaceConfig& b) {
  return serialize(a) == serialize(b);
}

}  // namespace vialsim
