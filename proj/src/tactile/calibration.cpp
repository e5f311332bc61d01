#include "vialsim/tactile/calibration.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace vialsim::tactile {

AffineMap calibrate_mapping(const std::vector<CalibrationSample>& samples) {
  const auto n = static_cast<Eigen::Index>(samples.size());
  if (n < 3) throw InvalidArgument("calibrate_mapping: need at least 3 samples");
  Eigen::MatrixXd a(n, 3);
  Eigen::MatrixXd y(n, 2);
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto& s = samples[static_cast<std::size_t>(k)];
    a.row(k) << s.normalized.x, s.normalized.y, 1.0;
    y.row(k) << s.offset.x, s.offset.y;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  qr.setThreshold(1e-10);
  if (qr.rank() < 3) throw InvalidArgument("calibrate_mapping: samples are collinear (rank-deficient design)");
  const Eigen::MatrixXd x = qr.solve(y);  // 3x2

  AffineMap m;
  m.gain = {x(0, 0), x(1, 0), x(0, 1), x(1, 1)};
  m.bias = {x(2, 0), x(2, 1)};
  const Eigen::MatrixXd r = a * x - y;
  m.residual_rms = std::sqrt(r.squaredNorm() / static_cast<double>(2 * n));
  return m;
}

std::string encode_calibration(const TactileCalibration& c) {
  std::string out;
  const char* names[2] = {"left", "right"};
  for (int f = 0; f < 2; ++f) {
    const auto& m = c.fingers[static_cast<std::size_t>(f)];
    char line[512];
    std::snprintf(line, sizeof line, "%s %.17g %.17g %.17g %.17g %.17g %.17g %.17g\n", names[f], m.gain[0],
                  m.gain[1], m.gain[2], m.gain[3], m.bias.x, m.bias.y, m.residual_rms);
    out += line;
  }
  return out;
}

TactileCalibration decode_calibration(const std::string& text) {
  TactileCalibration c;
  bool seen[2] = {false, false};
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string name;
    AffineMap m;
    ls >> name >> m.gain[0] >> m.gain[1] >> m.gain[2] >> m.gain[3] >> m.bias.x >> m.bias.y >> m.residual_rms;
    if (!ls) throw std::runtime_error("calibration line " + std::to_string(line_no) + ": expected name + 7 numbers");
    const int f = name == "left" ? 0 : name == "right" ? 1 : -1;
    if (f < 0) throw std::runtime_error("calibration line " + std::to_string(line_no) + ": unknown finger '" + name + "'");
    const double det = m.gain[0] * m.gain[3] - m.gain[1] * m.gain[2];
    if (!std::isfinite(det) || det == 0.0) {
      throw std::runtime_error("calibration line " + std::to_string(line_no) + ": singular gain");
    }
    c.fingers[static_cast<std::size_t>(f)] = m;
    seen[f] = true;
  }
  if (!seen[0] || !seen[1]) throw std::runtime_error("calibration: both left and right fingers are required");
  return c;
}

void save_calibration(const std::string& path, const TactileCalibration& calibration) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write calibration file: " + path);
  out << encode_calibration(calibration);
}

TactileCalibration load_calibration(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open calibration file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return decode_calibration(ss.str());
}

}  // namespace vialsim::tactile
