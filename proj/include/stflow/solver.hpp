#pragma once

#include <functional>
#include <memory>

#include "stflow/grid.hpp"
#include "stflow/regularizer.hpp"

namespace stflow {

/// One iterate of the semi-implicit fixed-point scheme.
struct IterationState {
  int k = 0;
  FlowComponent u1;
  FlowComponent u2;
  /// grad3(f), shared between successive states.
  std::shared_ptr<const VectorField3> df;

  /// Zero flows on the grid of f, k = 0.
  static IterationState initial(const ScalarField3& f);
};

/// One k -> k+1 step. Components are updated in the order u1_1, u1_2, u2_1,
/// u2_2; each update is linear in its own new value and is solved per voxel.
/// The diffusivity nu' and the second primitives of u2 are frozen at the
/// start of the sweep. Throws DivergenceError on a non-finite update.
IterationState sweep(const IterationState& state, const SolverConfig& config);

/// True iff some channel of u1 and some channel of u2 changed by a relative
/// Euclidean amount strictly below tol. A channel that was zero and stayed zero
/// counts as converged; one that was zero and became nonzero does not.
bool stopping_criterion(const IterationState& prev, const IterationState& next, double tol);

/// Relative change |next - prev| / |prev| of one channel with the zero rules of
/// stopping_criterion (0/0 -> 0, x/0 -> +inf).
double relative_change(const ScalarField3& prev, const ScalarField3& next);

/// Observer invoked after every sweep with the new state and its energy.
using SweepObserver = std::function<void(const IterationState&, double energy)>;

/// Runs sweeps from zero initialisation until stopping_criterion holds (never
/// before k = 2) or max_iter sweeps were done.
DecompositionResult decompose(const ScalarField3& f, const SolverConfig& config,
                              const SweepObserver& observer = {});

namespace detail {

enum class SweepMode { decomposition, single_component };

IterationState sweep(const IterationState& state, const SolverConfig& config, SweepMode mode);

DecompositionResult run_fixed_point(const ScalarField3& f, const SolverConfig& config,
                                    SweepMode mode, const SweepObserver& observer);

}  // namespace detail

}  // namespace stflow
