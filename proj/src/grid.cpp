#include "stflow/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace stflow {

GridSpec::GridSpec(int M, int N, int T) : M_(M), N_(N), T_(T) {
  if (M < 3 || N < 3 || T < 3) {
    throw InvalidArgument("grid " + describe() + " invalid: M, N, T must all be >= 3");
  }
}

std::string GridSpec::describe() const {
  std::ostringstream os;
  os << M_ << "x" << N_ << "x" << T_;
  return os.str();
}

void require_same_grid(const GridSpec& a, const GridSpec& b, const char* what) {
  if (!(a == b)) {
    throw InvalidArgument(std::string(what) + ": grid mismatch (" + a.describe() +
                          " vs " + b.describe() + ")");
  }
}

ScalarField3::ScalarField3(const GridSpec& grid, std::vector<double> data)
    : grid_(grid), data_(std::move(data)) {
  if (data_.size() != grid_.size()) {
    throw InvalidArgument("field data size " + std::to_string(data_.size()) +
                          " does not match grid " + grid_.describe());
  }
}

FlowComponent::FlowComponent(ScalarField3 a, ScalarField3 b)
    : u1(std::move(a)), u2(std::move(b)) {
  require_same_grid(u1.grid(), u2.grid(), "FlowComponent");
}

void SolverConfig::validate() const {
  auto require = [](bool ok, const char* msg) {
    if (!ok) throw InvalidArgument(std::string("SolverConfig: ") + msg);
  };
  require(alpha1 > 0.0, "alpha1 must be positive");
  require(alpha2 > 0.0, "alpha2 must be positive");
  require(eps_nu > 0.0 && eps_nu < 1.0, "eps_nu must lie in (0,1)");
  require(lambda > 0.0, "lambda must be positive");
  require(dtau > 0.0, "dtau must be positive");
  require(tol > 0.0 && tol < 1.0, "tol must lie in (0,1)");
  require(max_iter > 0, "max_iter must be positive");
  require(eps_surrogate > 0.0, "eps_surrogate must be positive");
}

const char* to_string(StopReason reason) noexcept {
  switch (reason) {
    case StopReason::tolerance_reached:
      return "tolerance_reached";
    case StopReason::max_iter:
      return "max_iter";
  }
  return "unknown";
}

ScalarField3 sample_closed_form(const GridSpec& grid, const SpaceTimeFunction& fn) {
  ScalarField3 out(grid);
  for (int t = 0; t < grid.T(); ++t) {
    for (int s = 0; s < grid.N(); ++s) {
      for (int r = 0; r < grid.M(); ++r) {
        const double v = fn(grid.x(r), grid.y(s), grid.time(t));
        if (!std::isfinite(v)) {
          std::ostringstream os;
          os << "sample_closed_form: non-finite value at node (r=" << r + 1
             << ", s=" << s + 1 << ", t=" << t + 1 << ")";
          throw InvalidArgument(os.str());
        }
        out.at(r, s, t) = v;
      }
    }
  }
  return out;
}

double l2_norm_sq(const ScalarField3& field) {
  double acc = 0.0;
  for (double v : field.values()) acc += v * v;
  return acc * field.grid().cell_volume();
}

double l2_norm_sq(const FlowComponent& field) {
  return l2_norm_sq(field.u1) + l2_norm_sq(field.u2);
}

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double euclidean_norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double max_abs(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

ScalarField3 magnitude(const FlowComponent& flow) {
  ScalarField3 out(flow.grid());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = std::hypot(flow.u1[i], flow.u2[i]);
  }
  return out;
}

FlowComponent scaled(const FlowComponent& flow, double c) {
  FlowComponent out = flow;
  for (auto& v : out.u1.values()) v *= c;
  for (auto& v : out.u2.values()) v *= c;
  return out;
}

FlowComponent sum(const FlowComponent& a, const FlowComponent& b) {
  require_same_grid(a.grid(), b.grid(), "sum");
  FlowComponent out = a;
  for (std::size_t i = 0; i < out.u1.size(); ++i) {
    out.u1[i] += b.u1[i];
    out.u2[i] += b.u2[i];
  }
  return out;
}

}  // namespace stflow
