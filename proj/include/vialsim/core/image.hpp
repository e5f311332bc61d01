#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace vialsim {

/// 8-bit grayscale raster, row-major.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  Image() = default;
  Image(int w, int h, std::uint8_t fill = 0);

  bool empty() const { return width == 0 || height == 0; }
  std::uint8_t& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
  bool operator==(const Image&) const = default;
};

/// Tactile sensor frames share the camera raster type.
using TactileFrame = Image;

/// Real-valued raster, row-major.
struct RealImage {
  int width = 0;
  int height = 0;
  std::vector<double> data;

  RealImage() = default;
  RealImage(int w, int h, double fill = 0.0);

  double& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
  double at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
};

/// Binary raster (0/1 samples), row-major.
struct BinaryImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;

  BinaryImage() = default;
  BinaryImage(int w, int h, std::uint8_t fill = 0);

  std::uint8_t& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
};

/// Binary PGM: "P5\n<w> <h>\n255\n" followed by raw bytes.
std::string encode_pgm(const Image& image);
Image decode_pgm(const std::string& bytes);
void write_pgm(const std::string& path, const Image& image);
Image read_pgm(const std::string& path);

inline std::uint8_t to_gray(double v) {
  if (v <= 0.0) return 0;
  if (v >= 255.0) return 255;
  return static_cast<std::uint8_t>(v + 0.5);
}

}  // namespace vialsim
