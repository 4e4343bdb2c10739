#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "stflow/error.hpp"

namespace stflow {

/// Sampling of the unit space-time cube [0,1]^3 with M x N x T nodes.
///
/// Node (r, s, t) sits at ((r-1)dx, (s-1)dy, (t-1)dt) in the 1-based
/// convention used in file formats and messages; the accessors below are
/// 0-based.
class GridSpec {
 public:
  GridSpec() = default;
  /// Throws InvalidArgument unless M, N, T >= 3.
  GridSpec(int M, int N, int T);

  int M() const noexcept { return M_; }
  int N() const noexcept { return N_; }
  int T() const noexcept { return T_; }
  double dx() const noexcept { return 1.0 / (M_ - 1); }
  double dy() const noexcept { return 1.0 / (N_ - 1); }
  double dt() const noexcept { return 1.0 / (T_ - 1); }
  /// Quadrature weight of one node.
  double cell_volume() const noexcept { return dx() * dy() * dt(); }

  std::size_t size() const noexcept {
    return static_cast<std::size_t>(M_) * N_ * T_;
  }
  std::size_t frame_size() const noexcept { return static_cast<std::size_t>(M_) * N_; }

  /// Linear index; r fastest, t slowest.
  std::size_t index(int r, int s, int t) const noexcept {
    return (static_cast<std::size_t>(t) * N_ + s) * M_ + r;
  }

  double x(int r) const noexcept { return r * dx(); }
  double y(int s) const noexcept { return s * dy(); }
  double time(int t) const noexcept { return t * dt(); }

  bool operator==(const GridSpec&) const = default;

  std::string describe() const;

 private:
  int M_ = 0;
  int N_ = 0;
  int T_ = 0;
};

/// Throws InvalidArgument naming `what` if the grids differ.
void require_same_grid(const GridSpec& a, const GridSpec& b, const char* what);

/// Real-valued field sampled on a GridSpec.
class ScalarField3 {
 public:
  ScalarField3() = default;
  explicit ScalarField3(const GridSpec& grid, double fill = 0.0)
      : grid_(grid), data_(grid.size(), fill) {}
  ScalarField3(const GridSpec& grid, std::vector<double> data);

  const GridSpec& grid() const noexcept { return grid_; }

  double& at(int r, int s, int t) noexcept { return data_[grid_.index(r, s, t)]; }
  double at(int r, int s, int t) const noexcept { return data_[grid_.index(r, s, t)]; }
  double& operator[](std::size_t i) noexcept { return data_[i]; }
  double operator[](std::size_t i) const noexcept { return data_[i]; }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }
  std::size_t size() const noexcept { return data_.size(); }

  /// Samples of frame t (0-based), row-major M x N.
  std::span<const double> frame(int t) const noexcept {
    return std::span<const double>(data_).subspan(t * grid_.frame_size(),
                                                  grid_.frame_size());
  }

  bool operator==(const ScalarField3&) const = default;

 private:
  GridSpec grid_;
  std::vector<double> data_;
};

/// Three channels (x1, x2, t) on one grid, e.g. a discrete gradient.
struct VectorField3 {
  ScalarField3 c1;
  ScalarField3 c2;
  ScalarField3 c3;

  explicit VectorField3(const GridSpec& grid) : c1(grid), c2(grid), c3(grid) {}
  const GridSpec& grid() const noexcept { return c1.grid(); }
};

/// One flow module u^(i) = (u_1, u_2) over space-time.
struct FlowComponent {
  ScalarField3 u1;
  ScalarField3 u2;

  FlowComponent() = default;
  explicit FlowComponent(const GridSpec& grid) : u1(grid), u2(grid) {}
  FlowComponent(ScalarField3 a, ScalarField3 b);

  const GridSpec& grid() const noexcept { return u1.grid(); }
  ScalarField3& channel(int j) noexcept { return j == 0 ? u1 : u2; }
  const ScalarField3& channel(int j) const noexcept { return j == 0 ? u1 : u2; }

  bool operator==(const FlowComponent&) const = default;
};

enum class BoundaryPolicy { replicate };

/// Tunables of the decomposition solver.
struct SolverConfig {
  double alpha1 = 1.0;
  double alpha2 = 1.0;
  double eps_nu = 0.01;
  double lambda = 0.1;
  double dtau = 1e-4;
  double tol = 0.05;
  int max_iter = 100;
  /// Regularisation of the surrogate matrix A; never used by the solver.
  double eps_surrogate = 1e-6;
  BoundaryPolicy boundary_policy = BoundaryPolicy::replicate;

  /// Throws InvalidArgument on the first violated constraint.
  void validate() const;
};

enum class StopReason { tolerance_reached, max_iter };

const char* to_string(StopReason reason) noexcept;

struct DecompositionResult {
  FlowComponent u1;
  FlowComponent u2;
  std::vector<double> energy_history;
  /// Data term after every sweep (same length as energy_history).
  std::vector<double> residual_history;
  double data_residual = 0.0;
  int iterations = 0;
  StopReason stop_reason = StopReason::max_iter;
};

using SpaceTimeFunction = std::function<double(double x, double y, double t)>;

/// Evaluates fn at every node. Non-finite values are rejected with the
/// (1-based) node reported.
ScalarField3 sample_closed_form(const GridSpec& grid, const SpaceTimeFunction& fn);

/// dx*dy*dt * sum of squares over all nodes.
double l2_norm_sq(const ScalarField3& field);
/// Sum of l2_norm_sq over both channels.
double l2_norm_sq(const FlowComponent& field);

/// Plain Euclidean inner product of the sample vectors (no quadrature weight).
double dot(std::span<const double> a, std::span<const double> b);
/// Plain Euclidean norm of the sample vector.
double euclidean_norm(std::span<const double> a);
double max_abs(std::span<const double> a);

/// Per-node magnitude sqrt(u1^2 + u2^2).
ScalarField3 magnitude(const FlowComponent& flow);
FlowComponent scaled(const FlowComponent& flow, double c);
FlowComponent sum(const FlowComponent& a, const FlowComponent& b);

}  // namespace stflow
