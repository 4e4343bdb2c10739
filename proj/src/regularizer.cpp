#include "stflow/regularizer.hpp"

#include <cmath>
#include <string>

namespace stflow {

void NuParams::validate() const {
  if (!(eps > 0.0 && eps <= 1.0)) throw InvalidArgument("NuParams: eps must lie in (0,1]");
  if (!(lambda > 0.0)) throw InvalidArgument("NuParams: lambda must be positive");
}

double nu(double r, const NuParams& p) {
  if (r < 0.0) throw InvalidArgument("nu: argument must be nonnegative, got " + std::to_string(r));
  const double l2 = p.lambda * p.lambda;
  return p.eps * r + (1.0 - p.eps) * l2 * (std::sqrt(1.0 + r / l2) - 1.0);
}

double nu_prime(double r, const NuParams& p) {
  if (r < 0.0) {
    throw InvalidArgument("nu_prime: argument must be nonnegative, got " + std::to_string(r));
  }
  return p.eps + (1.0 - p.eps) / (2.0 * std::sqrt(1.0 + r / (p.lambda * p.lambda)));
}

namespace {

// |grad3 u_1|^2 + |grad3 u_2|^2 per voxel.
ScalarField3 gradient_energy_density(const FlowComponent& u) {
  const VectorField3 g1 = grad3(u.u1);
  const VectorField3 g2 = grad3(u.u2);
  ScalarField3 out(u.grid());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = g1.c1[i] * g1.c1[i] + g1.c2[i] * g1.c2[i] + g1.c3[i] * g1.c3[i] +
             g2.c1[i] * g2.c1[i] + g2.c2[i] * g2.c2[i] + g2.c3[i] * g2.c3[i];
  }
  return out;
}

}  // namespace

double reg1(const FlowComponent& u1, const NuParams& p) {
  const ScalarField3 density = gradient_energy_density(u1);
  double acc = 0.0;
  for (double r : density.values()) acc += nu(r, p);
  return acc * u1.grid().cell_volume();
}

double reg2(const FlowComponent& u2) {
  return l2_norm_sq(temporal_primitive(u2.u1)) + l2_norm_sq(temporal_primitive(u2.u2));
}

ScalarField3 ofe_residual(const VectorField3& df, const FlowComponent& u1,
                          const FlowComponent& u2) {
  require_same_grid(df.grid(), u1.grid(), "ofe_residual");
  require_same_grid(df.grid(), u2.grid(), "ofe_residual");
  ScalarField3 res(df.grid());
  for (std::size_t i = 0; i < res.size(); ++i) {
    res[i] = df.c1[i] * (u1.u1[i] + u2.u1[i]) + df.c2[i] * (u1.u2[i] + u2.u2[i]) + df.c3[i];
  }
  return res;
}

double data_energy(const VectorField3& df, const FlowComponent& u1, const FlowComponent& u2) {
  return l2_norm_sq(ofe_residual(df, u1, u2));
}

double data_energy(const ScalarField3& f, const FlowComponent& u1, const FlowComponent& u2) {
  return data_energy(grad3(f), u1, u2);
}

double total_energy(const VectorField3& df, const FlowComponent& u1, const FlowComponent& u2,
                    const SolverConfig& config) {
  return data_energy(df, u1, u2) + config.alpha1 * reg1(u1, nu_params(config)) +
         config.alpha2 * reg2(u2);
}

double total_energy(const ScalarField3& f, const FlowComponent& u1, const FlowComponent& u2,
                    const SolverConfig& config) {
  return total_energy(grad3(f), u1, u2, config);
}

ScalarField3 diffusivity(const FlowComponent& u1, const NuParams& p) {
  ScalarField3 out = gradient_energy_density(u1);
  for (auto& v : out.values()) v = nu_prime(v, p);
  return out;
}

ScalarField3 weighted_diffusion(const ScalarField3& H, const ScalarField3& g) {
  VectorField3 flux = grad3(H);
  for (std::size_t i = 0; i < H.size(); ++i) {
    flux.c1[i] *= g[i];
    flux.c2[i] *= g[i];
    flux.c3[i] *= g[i];
  }
  return div3(flux);
}

FlowComponent optimality_residual_u1(const ScalarField3& f, const FlowComponent& u1,
                                     const FlowComponent& u2, const SolverConfig& config) {
  require_same_grid(f.grid(), u1.grid(), "optimality_residual_u1");
  require_same_grid(f.grid(), u2.grid(), "optimality_residual_u1");
  const VectorField3 df = grad3(f);
  const ScalarField3 res = ofe_residual(df, u1, u2);
  const ScalarField3 g = diffusivity(u1, nu_params(config));
  FlowComponent out(f.grid());
  for (int j = 0; j < 2; ++j) {
    const ScalarField3& dj = j == 0 ? df.c1 : df.c2;
    const ScalarField3 diff = weighted_diffusion(u1.channel(j), g);
    ScalarField3& o = out.channel(j);
    for (std::size_t i = 0; i < o.size(); ++i) o[i] = dj[i] * res[i] - config.alpha1 * diff[i];
  }
  return out;
}

FlowComponent optimality_residual_u2(const ScalarField3& f, const FlowComponent& u1,
                                     const FlowComponent& u2, const SolverConfig& config) {
  require_same_grid(f.grid(), u1.grid(), "optimality_residual_u2");
  require_same_grid(f.grid(), u2.grid(), "optimality_residual_u2");
  const VectorField3 df = grad3(f);
  const ScalarField3 res = ofe_residual(df, u1, u2);
  FlowComponent out(f.grid());
  for (int j = 0; j < 2; ++j) {
    const ScalarField3& dj = j == 0 ? df.c1 : df.c2;
    const ScalarField3 hh = temporal_second_primitive(u2.channel(j));
    ScalarField3& o = out.channel(j);
    for (std::size_t i = 0; i < o.size(); ++i) o[i] = dj[i] * res[i] - config.alpha2 * hh[i];
  }
  return out;
}

}  // namespace stflow
