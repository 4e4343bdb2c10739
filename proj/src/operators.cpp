#include "stflow/operators.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace stflow {

namespace {

// Clamp helper for replicate padding.
inline int clamp_index(int i, int n) noexcept { return i < 0 ? 0 : (i >= n ? n - 1 : i); }

}  // namespace

ScalarField3 central_difference(const ScalarField3& H, int axis) {
  const GridSpec& g = H.grid();
  ScalarField3 out(g);
  const int M = g.M(), N = g.N(), T = g.T();
  switch (axis) {
    case 0: {
      const double inv = 1.0 / (2.0 * g.dx());
      for (int t = 0; t < T; ++t)
        for (int s = 0; s < N; ++s)
          for (int r = 0; r < M; ++r)
            out.at(r, s, t) =
                (H.at(clamp_index(r + 1, M), s, t) - H.at(clamp_index(r - 1, M), s, t)) * inv;
      break;
    }
    case 1: {
      const double inv = 1.0 / (2.0 * g.dy());
      for (int t = 0; t < T; ++t)
        for (int s = 0; s < N; ++s)
          for (int r = 0; r < M; ++r)
            out.at(r, s, t) =
                (H.at(r, clamp_index(s + 1, N), t) - H.at(r, clamp_index(s - 1, N), t)) * inv;
      break;
    }
    case 2: {
      const double inv = 1.0 / (2.0 * g.dt());
      for (int t = 0; t < T; ++t)
        for (int s = 0; s < N; ++s)
          for (int r = 0; r < M; ++r)
            out.at(r, s, t) =
                (H.at(r, s, clamp_index(t + 1, T)) - H.at(r, s, clamp_index(t - 1, T))) * inv;
      break;
    }
    default:
      throw InvalidArgument("central_difference: axis must be 0, 1 or 2");
  }
  return out;
}

VectorField3 grad3(const ScalarField3& H) {
  VectorField3 out(H.grid());
  out.c1 = central_difference(H, 0);
  out.c2 = central_difference(H, 1);
  out.c3 = central_difference(H, 2);
  return out;
}

ScalarField3 div3(const VectorField3& V) {
  require_same_grid(V.c1.grid(), V.c2.grid(), "div3");
  require_same_grid(V.c1.grid(), V.c3.grid(), "div3");
  ScalarField3 out = central_difference(V.c1, 0);
  const ScalarField3 d2 = central_difference(V.c2, 1);
  const ScalarField3 d3 = central_difference(V.c3, 2);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += d2[i] + d3[i];
  return out;
}

ScalarField3 temporal_primitive(const ScalarField3& u) {
  const GridSpec& g = u.grid();
  ScalarField3 out(g);
  const double dt = g.dt();
  const std::size_t frame = g.frame_size();
  for (std::size_t p = 0; p < frame; ++p) {
    double acc = 0.0;
    for (int t = 0; t < g.T(); ++t) {
      acc += u[t * frame + p];
      out[t * frame + p] = dt * acc;
    }
  }
  return out;
}

ScalarField3 temporal_second_primitive(const ScalarField3& u) {
  const GridSpec& g = u.grid();
  const ScalarField3 hat = temporal_primitive(u);
  ScalarField3 out(g);
  const double dt = g.dt();
  const std::size_t frame = g.frame_size();
  for (std::size_t p = 0; p < frame; ++p) {
    double acc = 0.0;
    for (int t = g.T() - 1; t >= 0; --t) {
      acc += hat[t * frame + p];
      out[t * frame + p] = -dt * acc;
    }
  }
  return out;
}

Sym2 sqrt_psd(const Sym2& m) {
  const double s = std::sqrt(std::max(0.0, m.det()));
  const double tau = std::sqrt(std::max(0.0, m.trace() + 2.0 * s));
  if (tau == 0.0) return {};
  return {(m.a + s) / tau, m.b / tau, (m.c + s) / tau};
}

Sym2 inverse(const Sym2& m) {
  const double d = m.det();
  if (d == 0.0) throw InvalidArgument("inverse: singular 2x2 matrix");
  return {m.c / d, -m.b / d, m.a / d};
}

Sym2 product(const Sym2& p, const Sym2& q) {
  return {p.a * q.a + p.b * q.b, p.a * q.b + p.b * q.c, p.b * q.b + p.c * q.c};
}

SurrogateData surrogate_fields(const ScalarField3& f) {
  const GridSpec& g = f.grid();
  SurrogateData out(g);
  out.derivatives = grad3(f);
  const auto& fx = out.derivatives.c1;
  const auto& fy = out.derivatives.c2;
  const auto& ft = out.derivatives.c3;
  for (std::size_t i = 0; i < g.size(); ++i) {
    out.a0[i] = {fx[i] * fx[i], fx[i] * fy[i], fy[i] * fy[i]};
    const double mag = std::hypot(fx[i], fy[i]);
    out.grad_mag[i] = mag;
    if (mag < 1e-12) {
      out.rho.u1[i] = 0.0;
      out.rho.u2[i] = 0.0;
    } else {
      out.rho.u1[i] = -ft[i] * fx[i] / mag;
      out.rho.u2[i] = -ft[i] * fy[i] / mag;
    }
  }
  return out;
}

Sym2 surrogate_sqrt_a0(const Sym2& a0, double grad_mag) {
  if (grad_mag < 1e-12) return {};
  return {a0.a / grad_mag, a0.b / grad_mag, a0.c / grad_mag};
}

Sym2 surrogate_matrix_a(const Sym2& a0, double eps) {
  Sym2 sq = product(a0, a0);
  sq.a += eps;
  sq.c += eps;
  return sqrt_psd(sq);
}

std::array<double, 2> surrogate_phi(const Sym2& a, double rho1, double rho2) {
  const Sym2 inv_sqrt = inverse(sqrt_psd(a));
  return inv_sqrt.apply(rho1, rho2);
}

double surrogate_identity_max_rel_error(const ScalarField3& f, int samples_per_voxel,
                                        unsigned seed, double min_grad) {
  const SurrogateData sd = surrogate_fields(f);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  double worst = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (sd.grad_mag[i] <= min_grad) continue;
    const Sym2 root = surrogate_sqrt_a0(sd.a0[i], sd.grad_mag[i]);
    const double fx = sd.derivatives.c1[i];
    const double fy = sd.derivatives.c2[i];
    const double ft = sd.derivatives.c3[i];
    // Random w on the scale of the local flow -f_t/|grad f|.
    const double scale = 1.0 + std::abs(ft) / sd.grad_mag[i];
    for (int k = 0; k < samples_per_voxel; ++k) {
      const double w1 = scale * dist(rng);
      const double w2 = scale * dist(rng);
      const auto aw = root.apply(w1, w2);
      const double d1 = aw[0] - sd.rho.u1[i];
      const double d2 = aw[1] - sd.rho.u2[i];
      const double lhs = d1 * d1 + d2 * d2;
      const double res = fx * w1 + fy * w2 + ft;
      const double rhs = res * res;
      // Relative to the size of the terms that cancel inside the residual.
      const double term = sd.grad_mag[i] * std::hypot(w1, w2) + std::abs(ft);
      const double denom = std::max({lhs, rhs, term * term});
      if (denom < 1e-300) continue;
      worst = std::max(worst, std::abs(lhs - rhs) / denom);
    }
  }
  return worst;
}

}  // namespace stflow
