#pragma once

#include <string>
#include <vector>

#include "stflow/analytic1d.hpp"
#include "stflow/grid.hpp"
#include "stflow/image.hpp"

namespace stflow::synth {

/// Axis-aligned pixel rectangle [x0, x0+w) x [y0, y0+h).
struct Rect {
  int x0 = 0;
  int y0 = 0;
  int w = 0;
  int h = 0;

  bool contains(int x, int y) const noexcept {
    return x >= x0 && x < x0 + w && y >= y0 && y < y0 + h;
  }
  /// Grown by `px` pixels on every side.
  Rect dilated(int px) const noexcept { return {x0 - px, y0 - px, w + 2 * px, h + 2 * px}; }
};

/// Smooth band-limited texture: a seeded sum of plane waves evaluated at
/// continuous pixel positions, with values in [lo, hi].
class Texture {
 public:
  Texture(unsigned seed, double wavelength_px, double lo, double hi, int waves = 24);
  double operator()(double x, double y) const;

 private:
  struct Wave {
    double kx, ky, phase, amp;
  };
  std::vector<Wave> waves_;
  double lo_, hi_, norm_;
};

/// f(r, s, t) = f_tilde(x) g(t) with x along x1 (axis 0) or x2 (axis 1),
/// constant along the other spatial axis. Rescaled to [0,1] by global min-max
/// only when some value falls outside [0,1].
ScalarField3 gen_separable(const GridSpec& grid, const analytic1d::SeparableScene1D& scene,
                           int axis = 0);

/// Textured disc centred in an M x N frame; zero outside the disc.
Image2D textured_disc_pattern(int M, int N, unsigned seed = 7);

/// Pattern rotated by `angle` about the frame centre with bilinear
/// resampling; pixels outside the inscribed disc are 0.
Image2D rotate_pattern(const Image2D& base, double angle);

/// Radius of the disc used by rotate_pattern.
double disc_radius(int M, int N);

/// Frame t (0-based) shows `base` rotated by 2 pi k t dt: k full turns over
/// the unit time interval.
ScalarField3 gen_periodic_motion(const GridSpec& grid, const Image2D& base, int freq_multiplier);

struct SquareSceneParams {
  double square_speed = 1.0;   ///< pixels per frame along +x1
  double bg_amplitude = 0.05;  ///< per-frame diagonal step, fraction of frame size
  int bg_period = 4;           ///< frames per oscillation period
  double square_fraction = 0.25;  ///< side length relative to min(M, N)
  double square_intensity = 0.4;  ///< mean level of the background texture
  unsigned seed = 11;
};

/// Regions used to score the background/foreground split.
struct SquareSceneLayout {
  /// Square's top-left corner (pixels, continuous) at each frame.
  std::vector<double> square_x;
  double square_y = 0.0;
  double side = 0.0;
  /// Background diagonal displacement (pixels) at each frame.
  std::vector<double> bg_shift;

  /// Pixel is inside the square eroded by `margin` pixels at frame t.
  bool in_square_interior(int x, int y, int t, double margin) const;
  /// Pixel is farther than `margin` pixels from the square at frame t.
  bool in_background(int x, int y, int t, double margin) const;
};

/// Textured background oscillating along the bottom-left to top-right
/// diagonal (a zigzag: `bg_period/2` frames forward, then back, each step
/// `bg_amplitude * min(M, N)` pixels), occluded by a uniform square
/// translating along x1. A square leaving the frame is clipped and reported
/// in `warnings`.
ScalarField3 gen_square_over_oscillating_bg(const GridSpec& grid, const SquareSceneParams& params,
                                            SquareSceneLayout* layout = nullptr,
                                            std::vector<std::string>* warnings = nullptr);

constexpr double kBlankLevel = 0.5;

struct FlickerFrames {
  Image2D frame1;
  Image2D frame2;
  Rect changed;
};

struct FlickerFrameParams {
  double background_contrast = 0.15;  ///< texture half-range around mid-gray
  double change_contrast = 0.45;      ///< half-range of the pattern in the altered rectangle
  double rect_fraction = 0.3;         ///< rectangle side relative to frame size
  unsigned seed = 5;
};

/// Two frames that differ exactly on one rectangle.
FlickerFrames make_flicker_frames(int M, int N, const FlickerFrameParams& params = {});

/// Cycle {frame1, blank, frame2, blank} repeated `repeats` times, then
/// linearly resampled to T frames over the same time span (T = 0 keeps the
/// raw 4 * repeats frames). Blank is uniform kBlankLevel.
ScalarField3 gen_flicker(const Image2D& frame1, const Image2D& frame2, int repeats, int T = 0);

/// Mean absolute temporal central difference of a sequence.
double mean_abs_temporal_derivative(const ScalarField3& f);

struct Fixture {
  std::string name;
  ScalarField3 f;
};

/// The small sequences used for solver regression checks (all <= 48x48x16):
/// rotating disc (k = 2), square over oscillating background, flicker
/// (2 repeats resampled to 16 frames) and a globally darkening parabola.
std::vector<Fixture> bundled_fixtures();

}  // namespace stflow::synth
