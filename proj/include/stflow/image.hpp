#pragma once

#include <cstddef>
#include <vector>

namespace stflow {

/// Row-major 2D image, values indexed (x, y) with x fastest.
struct Image2D {
  int width = 0;
  int height = 0;
  std::vector<double> data;

  Image2D() = default;
  Image2D(int w, int h, double fill = 0.0) : width(w), height(h), data(std::size_t(w) * h, fill) {}

  double& at(int x, int y) noexcept { return data[std::size_t(y) * width + x]; }
  double at(int x, int y) const noexcept { return data[std::size_t(y) * width + x]; }
  bool same_size(const Image2D& o) const noexcept { return width == o.width && height == o.height; }
};

}  // namespace stflow
