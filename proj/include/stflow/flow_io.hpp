#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "stflow/grid.hpp"

namespace stflow::io {

/// Magnitudes above this mark a `.flo` vector as unknown.
constexpr float kUnknownFlowThreshold = 1e9f;

/// One temporal slice of a flow field, in `.flo` precision.
struct FlowSlice {
  int width = 0;
  int height = 0;
  std::vector<float> u;
  std::vector<float> v;

  FlowSlice() = default;
  FlowSlice(int w, int h) : width(w), height(h), u(std::size_t(w) * h), v(std::size_t(w) * h) {}

  std::size_t index(int x, int y) const noexcept { return std::size_t(y) * width + x; }
  bool unknown(std::size_t i) const noexcept {
    return !(std::abs(u[i]) <= kUnknownFlowThreshold && std::abs(v[i]) <= kUnknownFlowThreshold);
  }
  bool same_size(const FlowSlice& o) const noexcept {
    return width == o.width && height == o.height;
  }
  double magnitude(std::size_t i) const noexcept { return std::hypot(double(u[i]), double(v[i])); }
};

/// Slice t (0-based) of a flow module.
FlowSlice slice(const FlowComponent& flow, int t);

std::vector<std::uint8_t> encode_flo(const FlowSlice& slice);
FlowSlice decode_flo(const std::vector<std::uint8_t>& bytes);
void write_flo(const FlowSlice& slice, const std::filesystem::path& path);
FlowSlice read_flo(const std::filesystem::path& path);

struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;  ///< interleaved RGB

  RgbImage() = default;
  RgbImage(int w, int h) : width(w), height(h), data(std::size_t(w) * h * 3, 0) {}
};

struct GrayImage {
  int width = 0;
  int height = 0;
  int bit_depth = 8;
  std::vector<std::uint16_t> data;

  GrayImage() = default;
  GrayImage(int w, int h, int depth = 8)
      : width(w), height(h), bit_depth(depth), data(std::size_t(w) * h, 0) {}
  std::uint16_t max_value() const noexcept { return bit_depth == 16 ? 65535 : 255; }
};

/// PGM (P5, 8 or 16 bit) or grayscale PNG, chosen by extension.
GrayImage read_gray_image(const std::filesystem::path& path);
void write_pgm(const GrayImage& img, const std::filesystem::path& path);
void write_png(const GrayImage& img, const std::filesystem::path& path);
void write_png(const RgbImage& img, const std::filesystem::path& path);
RgbImage read_png_rgb(const std::filesystem::path& path);

/// Loads >= 3 equally sized frames and scales the intensities of the whole
/// sequence jointly to [0,1] (a constant sequence maps to 0).
ScalarField3 read_sequence(const std::vector<std::filesystem::path>& paths);

/// Sorted *.pgm / *.png files of a directory.
std::vector<std::filesystem::path> list_frames(const std::filesystem::path& dir);

/// Writes frame_0001.pgm ... as 8-bit PGM (values clamped to [0,1]).
std::vector<std::filesystem::path> write_sequence(const ScalarField3& f,
                                                  const std::filesystem::path& dir,
                                                  const std::string& prefix = "frame_");

/// Hue = direction atan2(v, u), saturation = |(u,v)| / max_magnitude (capped
/// at 1), value = 1; unknown vectors are black. max_magnitude <= 0 selects
/// the 99th percentile of the known magnitudes.
RgbImage render_color(const FlowSlice& slice, double max_magnitude = 0.0);

/// Black where |(u,v)| <= threshold, otherwise gray proportional to the
/// magnitude relative to the slice maximum.
GrayImage render_magnitude(const FlowSlice& slice, double threshold);

/// Zeroes `primary` where both it and `other` exceed the magnitude threshold.
FlowSlice mask_common(const FlowSlice& primary, const FlowSlice& other, double threshold);

/// HSV (h in [0,1), s, v in [0,1]) to 8-bit RGB.
void hsv_to_rgb8(double h, double s, double v, std::uint8_t rgb[3]);

/// The synthetic slice (u,v) = r (cos theta, sin theta) over a disc of the given
/// radius with |(u,v)| = 1 on its rim; zero outside.
FlowSlice color_wheel_slice(int size);

/// Writes bytes to a sibling temporary file, then renames it over `path`.
void atomic_write(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);
void atomic_write(const std::filesystem::path& path, const std::string& text);

}  // namespace stflow::io
