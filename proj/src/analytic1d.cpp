#include "stflow/analytic1d.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "stflow/error.hpp"

namespace stflow::analytic1d {

namespace {

constexpr double kPi = std::numbers::pi;

double parabola(double x) { return x * (1.0 - x); }
double parabola_dx(double x) { return 1.0 - 2.0 * x; }

double simpson_step(const std::function<double(double)>& fn, double a, double b, double fa,
                    double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = fn(lm), frm = fn(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_step(fn, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(fn, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double SeparableScene1D::g(double t) const { return std::exp(log_g(t)); }

double SeparableScene1D::inverse_log_slope(double x) const {
  const double slope = f_tilde_dx(x);
  if (std::abs(slope) <= 1e-12) {
    std::ostringstream os;
    os << "scene '" << name << "': d/dx f_tilde vanishes at x = " << x;
    throw SingularityError(os.str());
  }
  return f_tilde(x) / slope;
}

SeparableScene1D darkening_scene() {
  SeparableScene1D s;
  s.name = "darkening";
  s.f_tilde = parabola;
  s.f_tilde_dx = parabola_dx;
  s.log_g = [](double t) { return std::log(1.0 - t); };
  s.log_g_dt = [](double t) { return -1.0 / (1.0 - t); };
  return s;
}

SeparableScene1D power_law_scene(double beta) {
  if (!(beta > 0.0 && beta < 1.0)) {
    throw InvalidArgument("power_law_scene: beta must lie in (0,1)");
  }
  SeparableScene1D s;
  s.name = "power_law";
  s.beta = beta;
  s.f_tilde = parabola;
  s.f_tilde_dx = parabola_dx;
  s.log_g = [beta](double t) { return -std::pow(1.0 - t, beta) / beta; };
  s.log_g_dt = [beta](double t) { return std::pow(1.0 - t, beta - 1.0); };
  return s;
}

SeparableScene1D flicker_scene(int n0, std::function<double(double)> f_tilde,
                               std::function<double(double)> f_tilde_dx) {
  if (n0 < 1) throw InvalidArgument("flicker_scene: n0 must be a positive integer");
  SeparableScene1D s;
  s.name = "flicker";
  s.n0 = n0;
  s.f_tilde = std::move(f_tilde);
  s.f_tilde_dx = std::move(f_tilde_dx);
  const double w = n0 * kPi;
  s.log_g = [w](double t) { return std::sin(w * t) / w; };
  s.log_g_dt = [w](double t) { return std::cos(w * t); };
  return s;
}

SeparableScene1D flicker_scene_ramp(int n0) {
  SeparableScene1D s =
      flicker_scene(n0, [](double x) { return 1.0 + x; }, [](double) { return 1.0; });
  s.name = "flicker_ramp";
  return s;
}

SeparableScene1D flicker_scene_parabola(int n0) {
  SeparableScene1D s = flicker_scene(n0, parabola, parabola_dx);
  s.name = "flicker_parabola";
  return s;
}

SeparableScene1D static_scene() {
  SeparableScene1D s;
  s.name = "static";
  s.f_tilde = parabola;
  s.f_tilde_dx = parabola_dx;
  s.log_g = [](double) { return 0.0; };
  s.log_g_dt = [](double) { return 0.0; };
  return s;
}

double ofe_flow_1d(const SeparableScene1D& scene, double x, double t) {
  return -scene.log_g_dt(t) * scene.inverse_log_slope(x);
}

double adaptive_simpson(const std::function<double(double)>& fn, double a, double b, double tol,
                        int max_depth) {
  const double fa = fn(a), fb = fn(b), fm = fn(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_step(fn, a, b, fa, fm, fb, whole, tol, max_depth);
}

double composite_simpson(const std::function<double(double)>& fn, double a, double b,
                         int panels) {
  if (panels < 2 || panels % 2 != 0) {
    throw InvalidArgument("composite_simpson: panel count must be even and >= 2");
  }
  const double h = (b - a) / panels;
  double acc = fn(a) + fn(b);
  for (int i = 1; i < panels; ++i) acc += (i % 2 == 1 ? 4.0 : 2.0) * fn(a + i * h);
  return acc * h / 3.0;
}

double example_constant_c() {
  return adaptive_simpson(
      [](double x) {
        const double q = x * (1.0 - x) / (1.0 - 2.0 * x);
        return q * q;
      },
      0.0, 0.25);
}

NormCase parse_norm_case(const std::string& s) {
  if (s == "ex1_uhat") return NormCase::ex1_uhat;
  if (s == "ex2_u") return NormCase::ex2_u;
  if (s == "ex2_uhat") return NormCase::ex2_uhat;
  throw InvalidArgument("unknown norm case '" + s + "' (expected ex1_uhat, ex2_u or ex2_uhat)");
}

const char* to_string(NormCase c) {
  switch (c) {
    case NormCase::ex1_uhat:
      return "ex1_uhat";
    case NormCase::ex2_u:
      return "ex2_u";
    case NormCase::ex2_uhat:
      return "ex2_uhat";
  }
  return "?";
}

std::optional<double> example_norm_analytic(NormCase which, double beta) {
  switch (which) {
    case NormCase::ex1_uhat:
      return std::nullopt;
    case NormCase::ex2_u:
      if (beta > 0.5) return example_constant_c() / (2.0 * beta - 1.0);
      return std::nullopt;
    case NormCase::ex2_uhat:
      return example_constant_c() / (beta * beta) *
             (1.0 / (2.0 * beta + 1.0) - 2.0 / (beta + 1.0) + 1.0);
  }
  return std::nullopt;
}

NormStudy example_norms(NormCase which, double beta, const NormStudyOptions& options) {
  if (which != NormCase::ex1_uhat && !(beta > 0.0 && beta < 1.0)) {
    throw InvalidArgument("example_norms: beta must lie in (0,1)");
  }
  if (options.levels < 1 || options.nx0 < 2 || options.nt0 < 1 || options.factor_x < 1 ||
      options.factor_t < 1) {
    throw InvalidArgument("example_norms: invalid refinement options");
  }
  if (which == NormCase::ex1_uhat && (options.nx0 % 2 != 0)) {
    throw InvalidArgument("example_norms: ex1_uhat needs an even x resolution");
  }
  NormStudy study;
  study.which = which;
  study.beta = beta;
  study.analytic = example_norm_analytic(which, beta);
  study.diverges = !study.analytic.has_value();

  const double x_len = which == NormCase::ex1_uhat ? 1.0 : 0.25;
  auto spatial = [](double x) { return x * (1.0 - x) / (1.0 - 2.0 * x); };
  auto temporal = [which, beta](double t) {
    const double s = 1.0 - t;
    switch (which) {
      case NormCase::ex1_uhat:
        return -std::log(s);
      case NormCase::ex2_u:
        return -std::pow(s, beta - 1.0);
      case NormCase::ex2_uhat:
        return (std::pow(s, beta) - 1.0) / beta;
    }
    return 0.0;
  };

  int nx = options.nx0, nt = options.nt0;
  for (int level = 0; level < options.levels; ++level) {
    const double hx = x_len / nx, ht = 1.0 / nt;
    double acc = 0.0;
    for (int j = 0; j < nt; ++j) {
      const double w = temporal((j + 0.5) * ht);
      double row = 0.0;
      for (int i = 0; i < nx; ++i) {
        const double u = spatial((i + 0.5) * hx) * w;
        row += u * u;
      }
      acc += row;
    }
    study.levels.push_back({nx, nt, acc * hx * ht});
    nx *= options.factor_x;
    nt *= options.factor_t;
  }
  return study;
}

double transfer_ratio(double alpha, int m, int n) {
  const double pi4 = kPi * kPi * kPi * kPi;
  return alpha / (alpha + pi4 * (double(m) * m + double(n) * n) * double(n) * n);
}

Eigen::VectorXd cosine_coefficients(const SeparableScene1D& scene, int m_max, int panels) {
  Eigen::VectorXd out(m_max + 1);
  for (int m = 0; m <= m_max; ++m) {
    const double integral = composite_simpson(
        [&](double x) {
          const double v = scene.inverse_log_slope(x) * std::cos(m * kPi * x);
          if (!std::isfinite(v)) {
            throw InvalidArgument("cosine_coefficients: non-integrable integrand");
          }
          return v;
        },
        0.0, 1.0, panels);
    out(m) = (m == 0 ? 1.0 : 2.0) * integral;
  }
  return out;
}

Eigen::VectorXd sine_coefficients(const SeparableScene1D& scene, int n_max, int panels) {
  Eigen::VectorXd out(n_max);
  for (int n = 1; n <= n_max; ++n) {
    out(n - 1) = 2.0 * composite_simpson(
                           [&](double t) {
                             const double v = scene.log_g_increment(t) * std::sin(n * kPi * t);
                             if (!std::isfinite(v)) {
                               throw InvalidArgument(
                                   "sine_coefficients: non-integrable integrand");
                             }
                             return v;
                           },
                           0.0, 1.0, panels);
  }
  return out;
}

FourierModel1D fourier_decompose(const SeparableScene1D& scene, double alpha, int m_max,
                                 int n_max, int panels) {
  if (!(alpha >= 0.0)) throw InvalidArgument("fourier_decompose: alpha must be nonnegative");
  if (m_max < 0 || n_max < 1) throw InvalidArgument("fourier_decompose: invalid truncation");
  FourierModel1D model;
  model.alpha = alpha;
  try {
    model.f_m = cosine_coefficients(scene, m_max, panels);
  } catch (const SingularityError& e) {
    throw InvalidArgument(std::string("fourier_decompose: non-integrable coefficient integrand (") +
                          e.what() + ")");
  }
  model.g_hat = sine_coefficients(scene, n_max, panels);
  model.U1.resize(m_max + 1, n_max);
  model.U2.resize(m_max + 1, n_max);
  for (int m = 0; m <= m_max; ++m) {
    for (int n = 1; n <= n_max; ++n) {
      const double total = -model.f_m(m) * model.g_hat(n - 1);
      const double u1 = transfer_ratio(alpha, m, n) * total;
      model.U1(m, n - 1) = u1;
      model.U2(m, n - 1) = total - u1;
    }
  }
  return model;
}

namespace {

double synthesize(const Eigen::MatrixXd& coeffs, double x, double t) {
  double acc = 0.0;
  for (int m = 0; m < coeffs.rows(); ++m) {
    const double cx = std::cos(m * kPi * x);
    for (int n = 1; n <= coeffs.cols(); ++n) acc += coeffs(m, n - 1) * cx * std::sin(n * kPi * t);
  }
  return acc;
}

}  // namespace

double FourierModel1D::synthesize_u1(double x, double t) const { return synthesize(U1, x, t); }
double FourierModel1D::synthesize_u2(double x, double t) const { return synthesize(U2, x, t); }

OracleSolution oracle_decompose_1d(const SeparableScene1D& scene, double alpha, int nx, int nt) {
  if (nx < 2 || nt < 3) throw InvalidArgument("oracle_decompose_1d: grid too small");
  if (!(alpha >= 0.0)) throw InvalidArgument("oracle_decompose_1d: alpha must be nonnegative");
  const double hx = 1.0 / (nx - 1), ht = 1.0 / (nt - 1);
  OracleSolution sol;
  sol.x.resize(nx);
  sol.t.resize(nt);
  for (int i = 0; i < nx; ++i) sol.x[i] = i * hx;
  for (int j = 0; j < nt; ++j) sol.t[j] = j * ht;
  sol.u_hat = Eigen::MatrixXd::Zero(nx, nt);
  for (int i = 0; i < nx; ++i) {
    const double F = scene.inverse_log_slope(sol.x[i]);
    for (int j = 0; j < nt; ++j) sol.u_hat(i, j) = -scene.log_g_increment(sol.t[j]) * F;
  }

  // Unknowns: U(i, j) for interior times j = 1..nt-2.
  const int interior = nt - 2;
  const int n = nx * interior;
  auto unknown = [&](int i, int j) { return (j >= 1 && j <= nt - 2) ? i * interior + (j - 1) : -1; };
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  auto x_weight = [&](int i) { return (i == 0 || i == nx - 1) ? 0.5 : 1.0; };

  // Adds weight * (sum_k c_k U_{idx_k})^2 to the quadratic form.
  auto add_row = [&](const int* idx, const double* c, int count, double weight) {
    for (int p = 0; p < count; ++p) {
      if (idx[p] < 0) continue;
      for (int q = 0; q < count; ++q) {
        if (idx[q] < 0) continue;
        A(idx[p], idx[q]) += weight * c[p] * c[q];
      }
    }
  };

  const double cell = hx * ht;
  // (d_tt U)^2 at interior times.
  for (int i = 0; i < nx; ++i) {
    for (int j = 1; j <= nt - 2; ++j) {
      const int idx[3] = {unknown(i, j - 1), unknown(i, j), unknown(i, j + 1)};
      const double c[3] = {1.0 / (ht * ht), -2.0 / (ht * ht), 1.0 / (ht * ht)};
      add_row(idx, c, 3, x_weight(i) * cell);
    }
  }
  // (d_xt U)^2 on cell centres.
  for (int i = 0; i + 1 < nx; ++i) {
    for (int j = 0; j + 1 < nt; ++j) {
      const int idx[4] = {unknown(i, j), unknown(i + 1, j), unknown(i, j + 1),
                          unknown(i + 1, j + 1)};
      const double s = 1.0 / (hx * ht);
      const double c[4] = {s, -s, -s, s};
      add_row(idx, c, 4, cell);
    }
  }
  // alpha (U - u_hat)^2 at interior nodes.
  for (int i = 0; i < nx; ++i) {
    for (int j = 1; j <= nt - 2; ++j) {
      const int k = unknown(i, j);
      const double w = alpha * x_weight(i) * cell;
      A(k, k) += w;
      b(k) += w * sol.u_hat(i, j);
    }
  }

  Eigen::LLT<Eigen::MatrixXd> llt(A);
  if (llt.info() != Eigen::Success) {
    throw InvalidArgument("oracle_decompose_1d: normal equations are not positive definite");
  }
  const Eigen::VectorXd u = llt.solve(b);
  sol.U1 = Eigen::MatrixXd::Zero(nx, nt);
  for (int i = 0; i < nx; ++i)
    for (int j = 1; j <= nt - 2; ++j) sol.U1(i, j) = u(unknown(i, j));
  sol.U2 = sol.u_hat - sol.U1;
  return sol;
}

double fourier_oracle_discrepancy(const FourierModel1D& model, const OracleSolution& oracle) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < oracle.x.size(); ++i) {
    for (std::size_t j = 0; j < oracle.t.size(); ++j) {
      const double ref = model.synthesize_u1(oracle.x[i], oracle.t[j]);
      const double d = oracle.U1(i, j) - ref;
      num += d * d;
      den += ref * ref;
    }
  }
  if (den == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return std::sqrt(num / den);
}

}  // namespace stflow::analytic1d
