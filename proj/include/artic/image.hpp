#pragma once

#include <cstdint>
#include <vector>

#include "artic/geom.hpp"

namespace artic {

template <typename T>
struct Image {
  int width = 0, height = 0;
  std::vector<T> data;

  Image() = default;
  Image(int w, int h, T fill = T{}) : width(w), height(h), data(std::size_t(w) * h, fill) {}

  bool inside(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }

  T& at(int x, int y) { return data[std::size_t(y) * width + x]; }
  const T& at(int x, int y) const { return data[std::size_t(y) * width + x]; }

  bool operator==(const Image& o) const {
    return width == o.width && height == o.height && data == o.data;
  }
};

struct Rgb8 {
  std::uint8_t r = 0, g = 0, b = 0;
  bool operator==(const Rgb8&) const = default;
};

inline Vec3 to_linear(const Rgb8& c) {
  return Vec3(c.r / 255.0, c.g / 255.0, c.b / 255.0);
}

inline Rgb8 to_rgb8(const Vec3& c) {
  auto q = [](double v) {
    double s = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
    return std::uint8_t(std::lround(s * 255.0));
  };
  return Rgb8{q(c.x()), q(c.y()), q(c.z())};
}

/// One posed RGB-D view of one joint state. Labels are 0 for background and
/// dense 1..M otherwise; whether they are view-local or globally consistent
/// depends on the pipeline stage. When the generator permutes labels it
/// records label_to_gt (index = label in this frame, value = ground-truth
/// global id; entry 0 maps background to background).
struct Frame {
  Camera camera;
  Image<Rgb8> rgb;
  Image<float> depth;        // camera-space z in meters, 0 where no surface
  Image<std::uint16_t> label;
  int state = 0;
  int view = 0;
  bool is_test = false;
  std::vector<int> label_to_gt;

  int n_labels() const {
    std::uint16_t m = 0;
    for (auto l : label.data) m = std::max(m, l);
    return int(m);
  }
};

/// Bilinear sample of inverse depth at a continuous pixel position. Exact
/// for planar surfaces (inverse depth is affine in pixel coordinates on a
/// plane), which is what makes synthetic match lifting exact. Returns 0
/// when any contributing texel is background or out of bounds.
inline double sample_depth_invz(const Image<float>& depth, const Eigen::Vector2d& pixel) {
  if (depth.width < 2 || depth.height < 2) return 0.0;
  double px = pixel.x() - 0.5, py = pixel.y() - 0.5;
  int x0 = int(std::floor(px)), y0 = int(std::floor(py));
  double fx = px - x0, fy = py - y0;
  if (x0 < -1 || y0 < -1 || x0 > depth.width - 1 || y0 > depth.height - 1) return 0.0;
  if (x0 < 0) { x0 = 0; fx = 0.0; }
  if (y0 < 0) { y0 = 0; fy = 0.0; }
  if (x0 > depth.width - 2) { x0 = depth.width - 2; fx = 1.0; }
  if (y0 > depth.height - 2) { y0 = depth.height - 2; fy = 1.0; }
  double d00 = depth.at(x0, y0), d10 = depth.at(x0 + 1, y0);
  double d01 = depth.at(x0, y0 + 1), d11 = depth.at(x0 + 1, y0 + 1);
  if (d00 <= 0.0 || d10 <= 0.0 || d01 <= 0.0 || d11 <= 0.0) return 0.0;
  double inv = (1 - fx) * (1 - fy) / d00 + fx * (1 - fy) / d10 +
               (1 - fx) * fy / d01 + fx * fy / d11;
  return 1.0 / inv;
}

}  // namespace artic
