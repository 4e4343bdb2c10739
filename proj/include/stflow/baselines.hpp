#pragma once

#include <vector>

#include "stflow/grid.hpp"
#include "stflow/image.hpp"
#include "stflow/solver.hpp"

namespace stflow {

/// Two-frame flow in pixel units.
struct Flow2D {
  Image2D u;
  Image2D v;
};

/// Classical two-frame Horn-Schunck: Jacobi iterations for
/// (I_x u + I_y v + I_t)^2 + alpha |grad u|^2 + alpha |grad v|^2, with central
/// spatial differences on the frame average and I_t = b - a.
Flow2D horn_schunck(const Image2D& frame_a, const Image2D& frame_b, double alpha, int iters);

/// Discrete Horn-Schunck energy consistent with the Jacobi scheme above
/// (4-neighbour edges, Neumann boundary).
double horn_schunck_energy(const Image2D& frame_a, const Image2D& frame_b, const Flow2D& flow,
                           double alpha);

struct WeickertSchnoerrParams {
  double alpha1 = 1.0;
  double eps_nu = 0.01;
  double lambda = 0.1;
  double dtau = 1e-4;
  double tol = 0.05;
  int max_iter = 100;

  /// Same parameters inside a decomposition config (u2 equations unused).
  SolverConfig as_solver_config() const;
  static WeickertSchnoerrParams from(const SolverConfig& c);
};

/// Spatio-temporal single-component flow minimising E + alpha1 R1: the
/// decomposition scheme with the u2 updates skipped (u2 stays zero).
FlowComponent weickert_schnoerr(const ScalarField3& f, const WeickertSchnoerrParams& params);

/// As weickert_schnoerr, with the iteration history (u2 is all zero).
DecompositionResult weickert_schnoerr_run(const ScalarField3& f,
                                          const WeickertSchnoerrParams& params,
                                          const SweepObserver& observer = {});

}  // namespace stflow
