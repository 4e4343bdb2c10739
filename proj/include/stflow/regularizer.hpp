#pragma once

#include "stflow/grid.hpp"
#include "stflow/operators.hpp"

namespace stflow {

/// Parameters of the edge-preserving penaliser
/// nu(r) = eps r + (1 - eps) lambda^2 (sqrt(1 + r / lambda^2) - 1).
struct NuParams {
  double eps = 0.01;
  double lambda = 0.1;

  void validate() const;
};

double nu(double r, const NuParams& p);
double nu_prime(double r, const NuParams& p);

/// R1: quadrature of nu(|grad3 u_1|^2 + |grad3 u_2|^2).
double reg1(const FlowComponent& u1, const NuParams& p);

/// R2: sum over channels of the squared L2 norm of the temporal primitive.
double reg2(const FlowComponent& u2);

/// Pointwise optical-flow residual f_x (u1+u2)_1 + f_y (u1+u2)_2 + f_t, with
/// derivatives taken from grad3(f).
ScalarField3 ofe_residual(const VectorField3& df, const FlowComponent& u1,
                          const FlowComponent& u2);

/// Data term E = quadrature of the squared residual.
double data_energy(const ScalarField3& f, const FlowComponent& u1, const FlowComponent& u2);
double data_energy(const VectorField3& df, const FlowComponent& u1, const FlowComponent& u2);

/// F = E + alpha1 R1 + alpha2 R2.
double total_energy(const ScalarField3& f, const FlowComponent& u1, const FlowComponent& u2,
                    const SolverConfig& config);
double total_energy(const VectorField3& df, const FlowComponent& u1, const FlowComponent& u2,
                    const SolverConfig& config);

/// nu'(|grad3 u_1|^2 + |grad3 u_2|^2) per voxel.
ScalarField3 diffusivity(const FlowComponent& u1, const NuParams& p);

/// div3(g grad3 H).
ScalarField3 weighted_diffusion(const ScalarField3& H, const ScalarField3& g);

/// Pointwise f_j res - alpha1 div3(nu' grad3 u1_j). Half the L2 gradient of F
/// with respect to u1 (the common factor 2 is dropped).
FlowComponent optimality_residual_u1(const ScalarField3& f, const FlowComponent& u1,
                                     const FlowComponent& u2, const SolverConfig& config);

/// Pointwise f_j res - alpha2 u_hathat_j. Half the L2 gradient of F with
/// respect to u2.
FlowComponent optimality_residual_u2(const ScalarField3& f, const FlowComponent& u1,
                                     const FlowComponent& u2, const SolverConfig& config);

inline NuParams nu_params(const SolverConfig& c) { return {c.eps_nu, c.lambda}; }

}  // namespace stflow
