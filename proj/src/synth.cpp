#include "stflow/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "stflow/operators.hpp"

namespace stflow::synth {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double overlap(double a0, double a1, double b0, double b1) {
  return std::max(0.0, std::min(a1, b1) - std::max(a0, b0));
}

double bilinear(const Image2D& img, double x, double y) {
  const int x0 = static_cast<int>(std::floor(x));
  const int y0 = static_cast<int>(std::floor(y));
  const double fx = x - x0, fy = y - y0;
  auto px = [&](int xi, int yi) {
    if (xi < 0 || yi < 0 || xi >= img.width || yi >= img.height) return 0.0;
    return img.at(xi, yi);
  };
  return (1 - fx) * (1 - fy) * px(x0, y0) + fx * (1 - fy) * px(x0 + 1, y0) +
         (1 - fx) * fy * px(x0, y0 + 1) + fx * fy * px(x0 + 1, y0 + 1);
}

}  // namespace

Texture::Texture(unsigned seed, double wavelength_px, double lo, double hi, int waves)
    : lo_(lo), hi_(hi), norm_(0.0) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  waves_.reserve(waves);
  for (int i = 0; i < waves; ++i) {
    const double dir = kTwoPi * unit(rng);
    const double lambda = wavelength_px * (1.0 + 2.0 * unit(rng));
    const double k = kTwoPi / lambda;
    const double amp = 0.5 + 0.5 * unit(rng);
    waves_.push_back({k * std::cos(dir), k * std::sin(dir), kTwoPi * unit(rng), amp});
    norm_ += amp;
  }
}

double Texture::operator()(double x, double y) const {
  double acc = 0.0;
  for (const Wave& w : waves_) acc += w.amp * std::cos(w.kx * x + w.ky * y + w.phase);
  return lo_ + (hi_ - lo_) * (0.5 + 0.5 * acc / norm_);
}

ScalarField3 gen_separable(const GridSpec& grid, const analytic1d::SeparableScene1D& scene,
                           int axis) {
  if (axis != 0 && axis != 1) throw InvalidArgument("gen_separable: axis must be 0 or 1");
  ScalarField3 f = sample_closed_form(grid, [&](double x, double y, double t) {
    return scene.value(axis == 0 ? x : y, t);
  });
  const auto [lo_it, hi_it] = std::minmax_element(f.values().begin(), f.values().end());
  const double lo = *lo_it, hi = *hi_it;
  if (lo < 0.0 || hi > 1.0) {
    const double range = hi - lo;
    for (auto& v : f.values()) v = range > 0.0 ? (v - lo) / range : 0.0;
  }
  return f;
}

double disc_radius(int M, int N) { return 0.5 * std::min(M, N) - 1.0; }

Image2D textured_disc_pattern(int M, int N, unsigned seed) {
  const Texture tex(seed, 0.25 * std::min(M, N), 0.15, 1.0);
  Image2D img(M, N);
  const double cx = 0.5 * (M - 1), cy = 0.5 * (N - 1), R = disc_radius(M, N);
  for (int y = 0; y < N; ++y)
    for (int x = 0; x < M; ++x)
      if (std::hypot(x - cx, y - cy) <= R) img.at(x, y) = tex(x, y);
  return img;
}

Image2D rotate_pattern(const Image2D& base, double angle) {
  const int M = base.width, N = base.height;
  Image2D out(M, N);
  const double cx = 0.5 * (M - 1), cy = 0.5 * (N - 1), R = disc_radius(M, N);
  const double c = std::cos(angle), s = std::sin(angle);
  for (int y = 0; y < N; ++y) {
    for (int x = 0; x < M; ++x) {
      const double dx = x - cx, dy = y - cy;
      if (std::hypot(dx, dy) > R) continue;
      // Inverse rotation maps the output pixel back into the base pattern.
      const double bx = c * dx + s * dy + cx;
      const double by = -s * dx + c * dy + cy;
      out.at(x, y) = bilinear(base, bx, by);
    }
  }
  return out;
}

ScalarField3 gen_periodic_motion(const GridSpec& grid, const Image2D& base, int freq_multiplier) {
  if (base.width != grid.M() || base.height != grid.N()) {
    throw InvalidArgument("gen_periodic_motion: pattern size does not match grid");
  }
  if (freq_multiplier < 1) {
    throw InvalidArgument("gen_periodic_motion: frequency multiplier must be >= 1");
  }
  ScalarField3 f(grid);
  for (int t = 0; t < grid.T(); ++t) {
    const double angle = kTwoPi * freq_multiplier * t * grid.dt();
    const Image2D frame = rotate_pattern(base, angle);
    for (int s = 0; s < grid.N(); ++s)
      for (int r = 0; r < grid.M(); ++r) f.at(r, s, t) = std::clamp(frame.at(r, s), 0.0, 1.0);
  }
  return f;
}

bool SquareSceneLayout::in_square_interior(int x, int y, int t, double margin) const {
  const double sx = square_x[t];
  return x >= sx + margin && x <= sx + side - margin && y >= square_y + margin &&
         y <= square_y + side - margin;
}

bool SquareSceneLayout::in_background(int x, int y, int t, double margin) const {
  const double sx = square_x[t];
  return x < sx - margin || x > sx + side + margin || y < square_y - margin ||
         y > square_y + side + margin;
}

ScalarField3 gen_square_over_oscillating_bg(const GridSpec& grid, const SquareSceneParams& p,
                                            SquareSceneLayout* layout,
                                            std::vector<std::string>* warnings) {
  if (!(p.bg_amplitude >= 0.0 && p.bg_amplitude <= 0.2)) {
    throw InvalidArgument("gen_square_over_oscillating_bg: amplitude must lie in [0, 0.2]");
  }
  if (p.bg_period < 2) throw InvalidArgument("gen_square_over_oscillating_bg: period must be >= 2");
  if (!(p.square_fraction > 0.0 && p.square_fraction < 1.0)) {
    throw InvalidArgument("gen_square_over_oscillating_bg: square fraction must lie in (0,1)");
  }
  if (!(p.square_intensity >= 0.0 && p.square_intensity <= 1.0)) {
    throw InvalidArgument("gen_square_over_oscillating_bg: square intensity must lie in [0,1]");
  }
  const int M = grid.M(), N = grid.N(), T = grid.T();
  const double size = std::min(M, N);
  const Texture tex(p.seed, 0.2 * size, 0.1, 0.7);

  SquareSceneLayout lay;
  lay.side = p.square_fraction * size;
  lay.square_y = 0.5 * (N - 1) - 0.5 * lay.side;
  const double start = 0.5 * (M - 1) - 0.5 * lay.side - 0.5 * p.square_speed * (T - 1);
  const double step = p.bg_amplitude * size;
  const double diag = 1.0 / std::sqrt(2.0);
  bool clipped = false;
  for (int t = 0; t < T; ++t) {
    const double sx = start + p.square_speed * t;
    lay.square_x.push_back(sx);
    if (sx < -0.5 || sx + lay.side > M - 0.5) clipped = true;
    const int phase = t % p.bg_period;
    lay.bg_shift.push_back(step * std::min(phase, p.bg_period - phase));
  }
  if (clipped && warnings) {
    warnings->push_back("square leaves the frame and is clipped");
  }

  ScalarField3 f(grid);
  for (int t = 0; t < T; ++t) {
    const double d = lay.bg_shift[t];
    const double sx = lay.square_x[t];
    for (int y = 0; y < N; ++y) {
      for (int x = 0; x < M; ++x) {
        // Up-right in image coordinates is (+x, -y).
        const double bg = tex(x - d * diag, y + d * diag);
        const double cover = overlap(x - 0.5, x + 0.5, sx, sx + lay.side) *
                             overlap(y - 0.5, y + 0.5, lay.square_y, lay.square_y + lay.side);
        f.at(x, y, t) = cover * p.square_intensity + (1.0 - cover) * bg;
      }
    }
  }
  if (layout) *layout = std::move(lay);
  return f;
}

FlickerFrames make_flicker_frames(int M, int N, const FlickerFrameParams& p) {
  if (M < 3 || N < 3) throw InvalidArgument("make_flicker_frames: frame too small");
  FlickerFrames out{Image2D(M, N), Image2D(M, N), {}};
  const double size = std::min(M, N);
  const Texture bg(p.seed, 0.2 * size, kBlankLevel - p.background_contrast,
                   kBlankLevel + p.background_contrast);
  const Texture patch(p.seed + 101, 0.15 * size, kBlankLevel - p.change_contrast,
                      kBlankLevel + p.change_contrast);
  const int w = std::max(1, static_cast<int>(std::lround(p.rect_fraction * M)));
  const int h = std::max(1, static_cast<int>(std::lround(p.rect_fraction * N)));
  out.changed = {M / 5, N / 4, w, h};
  for (int y = 0; y < N; ++y) {
    for (int x = 0; x < M; ++x) {
      const double v = bg(x, y);
      out.frame1.at(x, y) = v;
      double v2 = v;
      if (out.changed.contains(x, y)) {
        v2 = patch(x, y);
        // Keep the change visible at every pixel of the rectangle.
        if (std::abs(v2 - v) < 0.05) v2 = v + (v < kBlankLevel ? 0.1 : -0.1);
      }
      out.frame2.at(x, y) = std::clamp(v2, 0.0, 1.0);
    }
  }
  return out;
}

ScalarField3 gen_flicker(const Image2D& frame1, const Image2D& frame2, int repeats, int T) {
  if (!frame1.same_size(frame2)) throw InvalidArgument("gen_flicker: frame size mismatch");
  if (repeats < 1) throw InvalidArgument("gen_flicker: repeats must be >= 1");
  const int raw = 4 * repeats;
  if (T == 0) T = raw;
  const GridSpec grid(frame1.width, frame1.height, T);
  const Image2D blank(frame1.width, frame1.height, kBlankLevel);
  auto raw_frame = [&](int i) -> const Image2D& {
    switch (i % 4) {
      case 0:
        return frame1;
      case 2:
        return frame2;
      default:
        return blank;
    }
  };
  ScalarField3 f(grid);
  for (int t = 0; t < T; ++t) {
    const double pos = T == 1 ? 0.0 : double(t) * (raw - 1) / (T - 1);
    const int i0 = std::min(static_cast<int>(std::floor(pos)), raw - 1);
    const int i1 = std::min(i0 + 1, raw - 1);
    const double w = pos - i0;
    const Image2D& a = raw_frame(i0);
    const Image2D& b = raw_frame(i1);
    for (int y = 0; y < grid.N(); ++y)
      for (int x = 0; x < grid.M(); ++x)
        f.at(x, y, t) = (1.0 - w) * a.at(x, y) + w * b.at(x, y);
  }
  return f;
}

double mean_abs_temporal_derivative(const ScalarField3& f) {
  const ScalarField3 d = central_difference(f, 2);
  double acc = 0.0;
  for (double v : d.values()) acc += std::abs(v);
  return acc / static_cast<double>(d.size());
}

std::vector<Fixture> bundled_fixtures() {
  std::vector<Fixture> out;
  const GridSpec g(48, 48, 16);
  out.push_back({"rotate", gen_periodic_motion(g, textured_disc_pattern(48, 48), 2)});
  out.push_back({"square", gen_square_over_oscillating_bg(g, {})});
  const FlickerFrames fr = make_flicker_frames(48, 48);
  out.push_back({"flicker", gen_flicker(fr.frame1, fr.frame2, 2, 16)});
  out.push_back({"darkening", gen_separable(GridSpec(32, 32, 16), analytic1d::darkening_scene())});
  return out;
}

}  // namespace stflow::synth
