#pragma once

#include <array>
#include <vector>

#include "stflow/grid.hpp"

namespace stflow {

/// Central differences along x1, x2 and t. Nodes on the boundary see a
/// replicated neighbour, so the normal difference there is half a one-sided
/// difference and constants are annihilated exactly.
VectorField3 grad3(const ScalarField3& H);

/// d1 V1 + d2 V2 + dt V3 with the stencil and padding of grad3.
ScalarField3 div3(const VectorField3& V);

/// Single-axis central differences (axis 0 = x1, 1 = x2, 2 = t).
ScalarField3 central_difference(const ScalarField3& H, int axis);

/// u_hat(t) = dt * sum_{tau <= t} u(tau).
ScalarField3 temporal_primitive(const ScalarField3& u);

/// u_hathat(t) = -dt * sum_{tau >= t} u_hat(tau).
ScalarField3 temporal_second_primitive(const ScalarField3& u);

/// Symmetric 2x2 matrix [[a, b], [b, c]].
struct Sym2 {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;

  std::array<double, 2> apply(double w1, double w2) const noexcept {
    return {a * w1 + b * w2, b * w1 + c * w2};
  }
  double trace() const noexcept { return a + c; }
  double det() const noexcept { return a * c - b * b; }
};

/// Principal square root of a symmetric positive semi-definite 2x2 matrix.
Sym2 sqrt_psd(const Sym2& m);
Sym2 inverse(const Sym2& m);
Sym2 product(const Sym2& p, const Sym2& q);  // assumes p, q commute

/// Per-voxel quantities of the surrogate data term.
struct SurrogateData {
  FlowComponent rho;        ///< -(f_t / |grad f|) grad f; zero where grad f vanishes
  std::vector<Sym2> a0;     ///< grad f grad f^T
  ScalarField3 grad_mag;    ///< |grad f| (spatial)
  VectorField3 derivatives; ///< (f_x, f_y, f_t)

  explicit SurrogateData(const GridSpec& g) : rho(g), a0(g.size()), grad_mag(g), derivatives(g) {}
};

SurrogateData surrogate_fields(const ScalarField3& f);

/// A0^{1/2} via the closed form A0 / |grad f| (zero where grad f vanishes).
Sym2 surrogate_sqrt_a0(const Sym2& a0, double grad_mag);
/// A = (A0^T A0 + eps Id)^{1/2}.
Sym2 surrogate_matrix_a(const Sym2& a0, double eps);
/// phi = A^{-1/2} rho.
std::array<double, 2> surrogate_phi(const Sym2& a, double rho1, double rho2);

/// The surrogate identity |A0^{1/2} w - rho|^2 = (grad f . w + f_t)^2,
/// evaluated for `samples_per_voxel` pseudo-random w at every voxel with
/// |grad f| above `min_grad`. Returns the largest relative deviation.
double surrogate_identity_max_rel_error(const ScalarField3& f, int samples_per_voxel,
                                        unsigned seed, double min_grad = 1e-6);

}  // namespace stflow
