#include "stflow/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace stflow {

IterationState IterationState::initial(const ScalarField3& f) {
  IterationState s;
  s.k = 0;
  s.u1 = FlowComponent(f.grid());
  s.u2 = FlowComponent(f.grid());
  s.df = std::make_shared<const VectorField3>(grad3(f));
  return s;
}

namespace detail {

namespace {

void check_finite(const ScalarField3& field, int iteration, const char* name) {
  for (double v : field.values()) {
    if (!std::isfinite(v)) throw DivergenceError(iteration, std::string("non-finite ") + name);
  }
}

}  // namespace

IterationState sweep(const IterationState& state, const SolverConfig& config, SweepMode mode) {
  if (!state.df) throw InvalidArgument("sweep: state carries no sequence derivatives");
  const VectorField3& df = *state.df;
  require_same_grid(df.grid(), state.u1.grid(), "sweep");
  require_same_grid(df.grid(), state.u2.grid(), "sweep");

  const ScalarField3& fx = df.c1;
  const ScalarField3& fy = df.c2;
  const ScalarField3& ft = df.c3;
  const double inv_tau = 1.0 / config.dtau;
  const double a1 = config.alpha1;
  const double a2 = config.alpha2;
  const std::size_t n = fx.size();

  IterationState next;
  next.k = state.k + 1;
  next.df = state.df;
  next.u1 = state.u1;
  next.u2 = state.u2;

  // Lagged diffusion terms div3(nu'(k) grad3 u1_j(k)).
  const ScalarField3 g = diffusivity(state.u1, nu_params(config));
  const ScalarField3 diff1 = weighted_diffusion(state.u1.u1, g);
  const ScalarField3 diff2 = weighted_diffusion(state.u1.u2, g);

  const ScalarField3& u11 = state.u1.u1;
  const ScalarField3& u12 = state.u1.u2;
  const ScalarField3& u21 = state.u2.u1;
  const ScalarField3& u22 = state.u2.u2;
  ScalarField3& n11 = next.u1.u1;
  ScalarField3& n12 = next.u1.u2;
  ScalarField3& n21 = next.u2.u1;
  ScalarField3& n22 = next.u2.u2;

  for (std::size_t i = 0; i < n; ++i) {
    const double rest = fy[i] * (u12[i] + u22[i]) + ft[i] + fx[i] * u21[i];
    n11[i] = (u11[i] * inv_tau + diff1[i] - fx[i] / a1 * rest) /
             (inv_tau + fx[i] * fx[i] / a1);
  }
  check_finite(n11, next.k, "u1_1");

  for (std::size_t i = 0; i < n; ++i) {
    const double rest = fx[i] * (n11[i] + u21[i]) + ft[i] + fy[i] * u22[i];
    n12[i] = (u12[i] * inv_tau + diff2[i] - fy[i] / a1 * rest) /
             (inv_tau + fy[i] * fy[i] / a1);
  }
  check_finite(n12, next.k, "u1_2");

  if (mode == SweepMode::single_component) return next;

  const ScalarField3 hh1 = temporal_second_primitive(u21);
  const ScalarField3 hh2 = temporal_second_primitive(u22);

  for (std::size_t i = 0; i < n; ++i) {
    const double rest = fx[i] * n11[i] + fy[i] * (n12[i] + u22[i]) + ft[i];
    n21[i] = (u21[i] * inv_tau + hh1[i] - fx[i] / a2 * rest) /
             (inv_tau + fx[i] * fx[i] / a2);
  }
  check_finite(n21, next.k, "u2_1");

  for (std::size_t i = 0; i < n; ++i) {
    const double rest = fx[i] * (n11[i] + n21[i]) + fy[i] * n12[i] + ft[i];
    n22[i] = (u22[i] * inv_tau + hh2[i] - fy[i] / a2 * rest) /
             (inv_tau + fy[i] * fy[i] / a2);
  }
  check_finite(n22, next.k, "u2_2");

  return next;
}

DecompositionResult run_fixed_point(const ScalarField3& f, const SolverConfig& config,
                                    SweepMode mode, const SweepObserver& observer) {
  config.validate();
  IterationState state = IterationState::initial(f);
  DecompositionResult result;
  result.stop_reason = StopReason::max_iter;
  while (state.k < config.max_iter) {
    IterationState next = sweep(state, config, mode);
    const double data = data_energy(*next.df, next.u1, next.u2);
    const double energy = data + config.alpha1 * reg1(next.u1, nu_params(config)) +
                          config.alpha2 * reg2(next.u2);
    if (!std::isfinite(energy)) throw DivergenceError(next.k, "non-finite energy");
    result.energy_history.push_back(energy);
    result.residual_history.push_back(data);
    if (observer) observer(next, energy);
    const bool converged = next.k >= 2 && stopping_criterion(state, next, config.tol);
    state = std::move(next);
    if (converged) {
      result.stop_reason = StopReason::tolerance_reached;
      break;
    }
  }
  result.iterations = state.k;
  result.data_residual = result.residual_history.empty() ? 0.0 : result.residual_history.back();
  result.u1 = std::move(state.u1);
  result.u2 = std::move(state.u2);
  return result;
}

}  // namespace detail

IterationState sweep(const IterationState& state, const SolverConfig& config) {
  return detail::sweep(state, config, detail::SweepMode::decomposition);
}

double relative_change(const ScalarField3& prev, const ScalarField3& next) {
  require_same_grid(prev.grid(), next.grid(), "relative_change");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < prev.size(); ++i) {
    const double d = prev[i] - next[i];
    num += d * d;
    den += prev[i] * prev[i];
  }
  if (den == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return std::sqrt(num / den);
}

bool stopping_criterion(const IterationState& prev, const IterationState& next, double tol) {
  const double r1 = std::min(relative_change(prev.u1.u1, next.u1.u1),
                             relative_change(prev.u1.u2, next.u1.u2));
  const double r2 = std::min(relative_change(prev.u2.u1, next.u2.u1),
                             relative_change(prev.u2.u2, next.u2.u2));
  return r1 < tol && r2 < tol;
}

DecompositionResult decompose(const ScalarField3& f, const SolverConfig& config,
                              const SweepObserver& observer) {
  return detail::run_fixed_point(f, config, detail::SweepMode::decomposition, observer);
}

}  // namespace stflow
