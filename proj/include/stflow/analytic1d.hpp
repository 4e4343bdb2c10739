#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace stflow::analytic1d {

/// 1D scene f(x, t) = f_tilde(x) g(t) with static content f_tilde and a
/// global brightness modulation g > 0.
struct SeparableScene1D {
  std::string name;
  std::function<double(double)> f_tilde;
  std::function<double(double)> f_tilde_dx;
  /// log g(t) and its derivative.
  std::function<double(double)> log_g;
  std::function<double(double)> log_g_dt;
  double beta = 0.0;
  int n0 = 0;

  double g(double t) const;
  double value(double x, double t) const { return f_tilde(x) * g(t); }
  /// f_tilde / f_tilde' = 1 / d_x log f_tilde. Throws SingularityError within
  /// 1e-12 of a critical point of f_tilde.
  double inverse_log_slope(double x) const;
  /// log g(t) - log g(0).
  double log_g_increment(double t) const { return log_g(t) - log_g(0.0); }
};

/// f_tilde = x(1-x), g = 1 - t (characteristics join at x = 1/2).
SeparableScene1D darkening_scene();
/// f_tilde = x(1-x), g = exp(-(1-t)^beta / beta), beta in (0,1).
SeparableScene1D power_law_scene(double beta);
/// g = exp(sin(n0 pi t) / (n0 pi)) over the given static content.
SeparableScene1D flicker_scene(int n0, std::function<double(double)> f_tilde,
                               std::function<double(double)> f_tilde_dx);
/// Flicker over the monotone ramp f_tilde = 1 + x, whose inverse log slope
/// 1 + x is smooth on [0,1].
SeparableScene1D flicker_scene_ramp(int n0);
/// Flicker over f_tilde = x(1-x), singular at x = 1/2.
SeparableScene1D flicker_scene_parabola(int n0);
/// g == 1.
SeparableScene1D static_scene();

/// Closed-form solution of f_x u + f_t = 0:
/// u = -d_t log g(t) / d_x log f_tilde(x).
double ofe_flow_1d(const SeparableScene1D& scene, double x, double t);

/// Adaptive Simpson quadrature to absolute tolerance `tol`.
double adaptive_simpson(const std::function<double(double)>& fn, double a, double b,
                        double tol = 1e-13, int max_depth = 50);

/// Composite Simpson rule with `panels` (even) subintervals.
double composite_simpson(const std::function<double(double)>& fn, double a, double b,
                         int panels);

/// C = int_0^{1/4} x^2 (1-x)^2 / (1-2x)^2 dx, by adaptive quadrature.
double example_constant_c();

enum class NormCase { ex1_uhat, ex2_u, ex2_uhat };

NormCase parse_norm_case(const std::string& s);
const char* to_string(NormCase c);

struct NormLevel {
  int nx = 0;
  int nt = 0;
  double value = 0.0;
};

struct NormStudy {
  NormCase which = NormCase::ex2_u;
  double beta = 0.0;
  std::vector<NormLevel> levels;
  /// Closed-form limit when the norm is finite.
  std::optional<double> analytic;
  /// True when the closed form says the norm is infinite.
  bool diverges = false;
};

struct NormStudyOptions {
  int nx0 = 16;
  int nt0 = 64;
  int factor_x = 4;
  int factor_t = 4;
  int levels = 3;
};

/// Squared L2 norms of the closed-form flows on cell-centred (offset) grids,
/// refined by the given factors. The power-law cases (ex2_*) live on
/// (0,1/4) x (0,1), the darkening case (ex1_uhat) on (0,1)^2; midpoint nodes
/// never hit x = 1/2 when nx is even.
NormStudy example_norms(NormCase which, double beta, const NormStudyOptions& options);

/// Closed-form value of the squared norm, or nullopt when it is infinite.
std::optional<double> example_norm_analytic(NormCase which, double beta);

/// Coefficients of the R-minimising split of u_hat = U1 + U2 for a
/// separable scene: U1_mn = -alpha / (alpha + pi^4 (m^2 + n^2) n^2) f_m g_n.
struct FourierModel1D {
  double alpha = 0.0;
  Eigen::VectorXd f_m;     ///< m = 0..M_max, cosine coefficients of 1/d_x log f_tilde
  Eigen::VectorXd g_hat;   ///< index n-1 for n = 1..N_max, sine coefficients of log g - log g(0)
  Eigen::MatrixXd U1;      ///< (M_max+1) x N_max, column n-1
  Eigen::MatrixXd U2;

  int m_max() const { return static_cast<int>(f_m.size()) - 1; }
  int n_max() const { return static_cast<int>(g_hat.size()); }

  double synthesize_u1(double x, double t) const;
  double synthesize_u2(double x, double t) const;
};

/// alpha / (alpha + pi^4 (m^2 + n^2) n^2), the share of mode (m, n) in U1.
double transfer_ratio(double alpha, int m, int n);

/// Cosine coefficients of 1/d_x log f_tilde on [0,1] (m = 0..m_max).
Eigen::VectorXd cosine_coefficients(const SeparableScene1D& scene, int m_max, int panels = 4096);
/// Sine coefficients of log g(t) - log g(0) on [0,1] (n = 1..n_max).
Eigen::VectorXd sine_coefficients(const SeparableScene1D& scene, int n_max, int panels = 4096);

FourierModel1D fourier_decompose(const SeparableScene1D& scene, double alpha, int m_max = 64,
                                 int n_max = 64, int panels = 4096);

/// Discrete minimiser of
///   sum (d_xt U1)^2 + (d_tt U1)^2 + alpha (U1 - u_hat)^2
/// on nx x nt nodes of [0,1]^2 with U1 = 0 at t = 0 and t = 1.
struct OracleSolution {
  std::vector<double> x;
  std::vector<double> t;
  Eigen::MatrixXd U1;     ///< nx x nt
  Eigen::MatrixXd U2;     ///< u_hat - U1
  Eigen::MatrixXd u_hat;  ///< -(log g - log g(0)) / d_x log f_tilde
};

OracleSolution oracle_decompose_1d(const SeparableScene1D& scene, double alpha, int nx, int nt);

/// Relative L2 discrepancy between the oracle U1 and the Fourier synthesis on
/// the oracle nodes.
double fourier_oracle_discrepancy(const FourierModel1D& model, const OracleSolution& oracle);

}  // namespace stflow::analytic1d
