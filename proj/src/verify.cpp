#include "stflow/verify.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>
#include <sstream>
#include <cstring>

#include <unistd.h>

#include "stflow/analytic1d.hpp"
#include "stflow/baselines.hpp"
#include "stflow/flow_io.hpp"
#include "stflow/operators.hpp"
#include "stflow/regularizer.hpp"
#include "stflow/solver.hpp"
#include "stflow/synth.hpp"

namespace stflow::verify {

namespace {

namespace a1d = analytic1d;
namespace fs = std::filesystem;

using Rng = std::mt19937_64;

ScalarField3 random_field(const GridSpec& g, Rng& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  ScalarField3 f(g);
  for (auto& v : f.values()) v = d(rng);
  return f;
}

ScalarField3 scaled_field(ScalarField3 f, double c) {
  for (auto& v : f.values()) v *= c;
  return f;
}

FlowComponent random_flow(const GridSpec& g, Rng& rng, double scale) {
  return {scaled_field(random_field(g, rng), scale), scaled_field(random_field(g, rng), scale)};
}

void zero_collar(ScalarField3& f) {
  const GridSpec& g = f.grid();
  for (int t = 0; t < g.T(); ++t)
    for (int s = 0; s < g.N(); ++s)
      for (int r = 0; r < g.M(); ++r)
        if (r == 0 || s == 0 || t == 0 || r == g.M() - 1 || s == g.N() - 1 || t == g.T() - 1)
          f.at(r, s, t) = 0.0;
}

double rel_diff(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / scale;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

CheckResult result(const std::string& name, bool pass, const std::string& detail) {
  return {name, pass, detail};
}

// ---------------------------------------------------------------------------
// grid

CheckResult grid_index_roundtrip(const Options&) {
  const GridSpec g(7, 5, 4);
  std::size_t bad = 0;
  for (int t = 0; t < g.T(); ++t) {
    for (int s = 0; s < g.N(); ++s) {
      for (int r = 0; r < g.M(); ++r) {
        const std::size_t i = g.index(r, s, t);
        const int r2 = static_cast<int>(i % g.M());
        const int s2 = static_cast<int>((i / g.M()) % g.N());
        const int t2 = static_cast<int>(i / g.frame_size());
        const bool coords = std::lround(g.x(r) / g.dx()) == r && std::lround(g.y(s) / g.dy()) == s &&
                            std::lround(g.time(t) / g.dt()) == t;
        if (r2 != r || s2 != s || t2 != t || !coords) ++bad;
      }
    }
  }
  return result("grid-index-roundtrip", bad == 0, std::to_string(bad) + " mismatches");
}

CheckResult grid_homogeneity(const Options&) {
  Rng rng(1);
  std::uniform_real_distribution<double> cd(-5.0, 5.0);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const ScalarField3 f = random_field(GridSpec(6, 5, 4), rng);
    const double c = cd(rng);
    worst = std::max(worst, rel_diff(l2_norm_sq(scaled_field(f, c)), c * c * l2_norm_sq(f)));
  }
  return result("grid-homogeneity", worst <= 1e-12, "max rel error " + fmt(worst));
}

CheckResult grid_trilinear_sampling(const Options&) {
  const GridSpec g(5, 6, 7);
  auto fn = [](double x, double y, double t) {
    return 0.3 + 1.5 * x - 0.7 * y + 2.0 * t + 0.9 * x * y - 1.1 * y * t + 0.4 * x * t +
           0.8 * x * y * t;
  };
  const ScalarField3 f = sample_closed_form(g, fn);
  std::size_t bad = 0;
  for (int t = 0; t < g.T(); ++t)
    for (int s = 0; s < g.N(); ++s)
      for (int r = 0; r < g.M(); ++r)
        if (f.at(r, s, t) != fn(g.x(r), g.y(s), g.time(t))) ++bad;
  return result("grid-trilinear-sampling", bad == 0, std::to_string(bad) + " inexact nodes");
}

// ---------------------------------------------------------------------------
// operators

CheckResult primitive_difference(const Options&) {
  Rng rng(2);
  const GridSpec g(6, 5, 9);
  const ScalarField3 u = random_field(g, rng);
  const ScalarField3 uh = temporal_primitive(u);
  const ScalarField3 uhh = temporal_second_primitive(u);
  const double scale = max_abs(uh.values()) * g.dt();
  double worst = 0.0;
  for (int t = 0; t + 1 < g.T(); ++t)
    for (int s = 0; s < g.N(); ++s)
      for (int r = 0; r < g.M(); ++r)
        worst = std::max(worst, std::abs(uhh.at(r, s, t + 1) - uhh.at(r, s, t) -
                                         g.dt() * uh.at(r, s, t)) / scale);
  return result("primitive-difference", worst <= 1e-12, "max rel error " + fmt(worst));
}

CheckResult sbp_adjoint(const Options&) {
  Rng rng(3);
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const GridSpec g(7 + trial % 3, 6, 5 + trial % 2);
    const ScalarField3 h = random_field(g, rng);
    VectorField3 v(g);
    v.c1 = random_field(g, rng);
    v.c2 = random_field(g, rng);
    v.c3 = random_field(g, rng);
    zero_collar(v.c1);
    zero_collar(v.c2);
    zero_collar(v.c3);
    const VectorField3 gh = grad3(h);
    const double lhs = dot(gh.c1.values(), v.c1.values()) +
                       dot(gh.c2.values(), v.c2.values()) + dot(gh.c3.values(), v.c3.values());
    const double rhs = -dot(h.values(), div3(v).values());
    worst = std::max(worst, rel_diff(lhs, rhs));
  }
  return result("sbp-adjoint", worst <= 1e-10, "max rel error " + fmt(worst));
}

CheckResult surrogate_identity(const Options&) {
  Rng rng(4);
  const ScalarField3 f = random_field(GridSpec(8, 7, 6), rng, 0.0, 1.0);
  const double err = surrogate_identity_max_rel_error(f, 100, 17);
  return result("surrogate-identity", err <= 1e-10, "max rel error " + fmt(err));
}

CheckResult grad_constants(const Options&) {
  const GridSpec g(5, 4, 6);
  const VectorField3 gc = grad3(ScalarField3(g, 0.731));
  VectorField3 v(g);
  v.c1 = ScalarField3(g, 1.3);
  v.c2 = ScalarField3(g, -0.2);
  v.c3 = ScalarField3(g, 4.5);
  const double m = std::max({max_abs(gc.c1.values()), max_abs(gc.c2.values()),
                             max_abs(gc.c3.values()), max_abs(div3(v).values())});
  return result("grad-constants", m == 0.0, "max |value| " + fmt(m));
}

// ---------------------------------------------------------------------------
// regularizer

CheckResult nu_monotone(const Options&) {
  Rng rng(5);
  std::uniform_real_distribution<double> rd(0.0, 10.0), ed(1e-4, 1.0), ld(1e-3, 2.0);
  int bad = 0;
  for (int i = 0; i < 1000; ++i) {
    const NuParams p{ed(rng), ld(rng)};
    double r1 = rd(rng), r2 = rd(rng);
    if (r1 > r2) std::swap(r1, r2);
    if (nu(r1, p) > nu(r2, p)) ++bad;
  }
  return result("nu-monotone", bad == 0, std::to_string(bad) + " violations in 1000 pairs");
}

CheckResult nu_prime_bounds(const Options&) {
  Rng rng(6);
  std::uniform_real_distribution<double> rd(0.0, 100.0), ed(1e-4, 1.0), ld(1e-3, 2.0);
  int bad = 0;
  for (int i = 0; i < 1000; ++i) {
    const NuParams p{ed(rng), ld(rng)};
    const double v = nu_prime(rd(rng), p);
    const double bound = std::max(p.eps, p.eps + 0.5 * (1.0 - p.eps));
    if (!(v > 0.0 && v <= bound)) ++bad;
  }
  return result("nu-prime-bounds", bad == 0, std::to_string(bad) + " violations in 1000 samples");
}

CheckResult energies_nonnegative(const Options&) {
  Rng rng(7);
  const GridSpec g(6, 6, 5);
  const NuParams p;
  int bad = 0;
  for (int i = 0; i < 20; ++i) {
    const ScalarField3 f = random_field(g, rng, 0.0, 1.0);
    const FlowComponent u1 = random_flow(g, rng, 0.5), u2 = random_flow(g, rng, 0.5);
    if (reg1(u1, p) < 0.0 || reg2(u2) < 0.0 || data_energy(f, u1, u2) < 0.0) ++bad;
  }
  const FlowComponent z(g);
  const ScalarField3 c(g, 0.4);
  const bool zero = reg1(z, p) == 0.0 && reg2(z) == 0.0 && data_energy(c, z, z) == 0.0;
  return result("energies-nonnegative", bad == 0 && zero,
                std::to_string(bad) + " negative samples; zero configuration " +
                    (zero ? "vanishes" : "does not vanish"));
}

// Largest relative mismatch between 2 <R, d> |cell| and the central finite
// difference of total_energy along d, over `directions` random directions.
double gradient_check_error(bool first_module, int directions, unsigned seed) {
  Rng rng(seed);
  const GridSpec g(8, 8, 6);
  const ScalarField3 f = random_field(g, rng, 0.0, 1.0);
  const FlowComponent u1 = random_flow(g, rng, 0.05), u2 = random_flow(g, rng, 0.05);
  SolverConfig c;
  c.alpha1 = 0.7;
  c.alpha2 = 1.3;
  const FlowComponent res = first_module ? optimality_residual_u1(f, u1, u2, c)
                                         : optimality_residual_u2(f, u1, u2, c);
  double worst = 0.0;
  for (int k = 0; k < directions; ++k) {
    FlowComponent d = random_flow(g, rng, 1.0);
    if (first_module) {
      zero_collar(d.u1);
      zero_collar(d.u2);
    }
    const double h = 1e-5;
    auto energy_at = [&](double step) {
      const FlowComponent moved = sum(first_module ? u1 : u2, scaled(d, step));
      return first_module ? total_energy(f, moved, u2, c) : total_energy(f, u1, moved, c);
    };
    const double fd = (energy_at(h) - energy_at(-h)) / (2.0 * h);
    const double analytic =
        2.0 * g.cell_volume() * (dot(res.u1.values(), d.u1.values()) + dot(res.u2.values(), d.u2.values()));
    worst = std::max(worst, rel_diff(fd, analytic));
  }
  return worst;
}

CheckResult gradient_check(const Options&) {
  const double e1 = gradient_check_error(true, 20, 8);
  const double e2 = gradient_check_error(false, 20, 9);
  return result("gradient-check", e1 <= 1e-4 && e2 <= 1e-4,
                "u1 " + fmt(e1) + ", u2 " + fmt(e2) + " max rel error over 20 directions each");
}

CheckResult reg2_nested(const Options&) {
  Rng rng(10);
  double worst = 0.0;
  for (int T : {8, 16, 32}) {
    const GridSpec g(5, 4, T);
    const ScalarField3 u = random_field(g, rng);
    const ScalarField3 uhh = temporal_second_primitive(u);
    const double nested = -dot(uhh.values(), u.values()) * g.cell_volume();
    const double direct = l2_norm_sq(temporal_primitive(u));
    worst = std::max(worst, rel_diff(nested, direct));
  }
  return result("reg2-nested", worst <= 1e-10, "max rel error " + fmt(worst));
}

// ---------------------------------------------------------------------------
// solver

CheckResult sweep_fixed_point(const Options&) {
  Rng rng(11);
  const GridSpec g(8, 7, 6);
  const ScalarField3 f = random_field(g, rng, 0.0, 1.0);
  SolverConfig c;
  c.alpha1 = 0.8;
  c.alpha2 = 0.6;
  c.dtau = 1e-3;
  IterationState s = IterationState::initial(f);
  s.u1 = random_flow(g, rng, 0.1);
  s.u2 = random_flow(g, rng, 0.1);
  const IterationState n = sweep(s, c);
  const VectorField3& df = *s.df;

  // Each update solves its own optimality equation against the state it sees.
  const FlowComponent r1 = optimality_residual_u1(f, s.u1, s.u2, c);
  const FlowComponent r21 = optimality_residual_u2(f, n.u1, s.u2, c);
  const FlowComponent r22 = optimality_residual_u2(f, n.u1, FlowComponent(n.u2.u1, s.u2.u2), c);
  double worst = 0.0;
  const double scale = std::max({max_abs(r1.u1.values()), max_abs(r21.u1.values()),
                                 max_abs(r22.u2.values())});
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double e1 = r1.u1[i] - (s.u1.u1[i] - n.u1.u1[i]) * (c.alpha1 / c.dtau + df.c1[i] * df.c1[i]);
    const double e2 = r21.u1[i] - (s.u2.u1[i] - n.u2.u1[i]) * (c.alpha2 / c.dtau + df.c1[i] * df.c1[i]);
    const double e3 = r22.u2[i] - (s.u2.u2[i] - n.u2.u2[i]) * (c.alpha2 / c.dtau + df.c2[i] * df.c2[i]);
    worst = std::max({worst, std::abs(e1) / scale, std::abs(e2) / scale, std::abs(e3) / scale});
  }
  return result("sweep-fixed-point", worst <= 1e-9,
                "update/optimality identity max rel error " + fmt(worst));
}

struct FixtureRuns {
  std::vector<std::string> names;
  std::vector<DecompositionResult> runs;
  std::vector<DecompositionResult> reruns;
};

const FixtureRuns& fixture_runs() {
  static const FixtureRuns runs = [] {
    FixtureRuns out;
    for (const auto& fx : synth::bundled_fixtures()) {
      out.names.push_back(fx.name);
      out.runs.push_back(decompose(fx.f, SolverConfig{}));
      out.reruns.push_back(decompose(fx.f, SolverConfig{}));
    }
    return out;
  }();
  return runs;
}

CheckResult energy_descent(const Options&) {
  const FixtureRuns& fr = fixture_runs();
  double worst = 0.0;
  std::string where = "-";
  for (std::size_t i = 0; i < fr.runs.size(); ++i) {
    const auto& h = fr.runs[i].energy_history;
    for (std::size_t k = 2; k < h.size(); ++k) {
      const double up = (h[k] - h[k - 1]) / std::max(std::abs(h[k - 1]), 1e-300);
      if (up > worst) {
        worst = up;
        where = fr.names[i] + " iteration " + std::to_string(k + 1);
      }
    }
  }
  return result("energy-descent", worst <= 1e-9,
                "largest relative uptick " + fmt(worst) + " (" + where + ")");
}

CheckResult iteration_count(const Options&) {
  const FixtureRuns& fr = fixture_runs();
  int worst = 0;
  std::string detail;
  for (std::size_t i = 0; i < fr.runs.size(); ++i) {
    worst = std::max(worst, fr.runs[i].iterations);
    detail += fr.names[i] + "=" + std::to_string(fr.runs[i].iterations) + " ";
  }
  return result("iteration-count", worst < 100, "iterations at tol 0.05: " + detail);
}

CheckResult reproducibility(const Options&) {
  const FixtureRuns& fr = fixture_runs();
  int bad = 0;
  for (std::size_t i = 0; i < fr.runs.size(); ++i) {
    const auto& a = fr.runs[i];
    const auto& b = fr.reruns[i];
    if (!(a.energy_history == b.energy_history && a.residual_history == b.residual_history &&
          a.u1 == b.u1 && a.u2 == b.u2))
      ++bad;
  }
  return result("reproducibility", bad == 0, std::to_string(bad) + " fixtures differ between runs");
}

// ---------------------------------------------------------------------------
// baselines

CheckResult horn_schunck_descent(const Options&) {
  const synth::Texture tex(21, 6.0, 0.1, 0.9);
  Image2D a(24, 20), b(24, 20);
  for (int y = 0; y < a.height; ++y) {
    for (int x = 0; x < a.width; ++x) {
      a.at(x, y) = tex(x, y);
      b.at(x, y) = tex(x - 0.6, y - 0.3);
    }
  }
  double prev = horn_schunck_energy(a, b, horn_schunck(a, b, 0.05, 0), 0.05);
  double worst = 0.0;
  for (int k = 1; k <= 60; ++k) {
    const double e = horn_schunck_energy(a, b, horn_schunck(a, b, 0.05, k), 0.05);
    worst = std::max(worst, (e - prev) / prev);
    prev = e;
  }
  return result("horn-schunck-descent", worst <= 1e-12,
                "largest relative uptick over 60 iterations " + fmt(worst));
}

CheckResult ws_shared_path(const Options&) {
  const synth::Fixture fx = synth::bundled_fixtures().front();
  WeickertSchnoerrParams p;
  p.max_iter = 2;
  p.tol = 1e-300;
  const DecompositionResult ws = weickert_schnoerr_run(fx.f, p);
  const SolverConfig c = p.as_solver_config();
  IterationState s = IterationState::initial(fx.f);
  s = detail::sweep(detail::sweep(s, c, detail::SweepMode::single_component), c,
                    detail::SweepMode::single_component);
  const IterationState first_ws =
      detail::sweep(IterationState::initial(fx.f), c, detail::SweepMode::single_component);
  const IterationState first_dec = sweep(IterationState::initial(fx.f), c);
  const bool same = ws.u1 == s.u1 && l2_norm_sq(ws.u2) == 0.0 && first_ws.u1 == first_dec.u1;
  return result("ws-shared-path", same,
                same ? "two sweeps identical to the decomposition path without u2"
                     : "baseline differs from the shared sweep");
}

// ---------------------------------------------------------------------------
// analytic1d

CheckResult fourier_split(const Options&) {
  const auto scene = a1d::flicker_scene_ramp(2);
  double split_err = 0.0;
  int monotone_bad = 0;
  const std::vector<double> alphas{0.1, 1.0, 10.0, 100.0};
  std::vector<a1d::FourierModel1D> models;
  for (double a : alphas) models.push_back(a1d::fourier_decompose(scene, a, 16, 16, 1024));
  for (const auto& m : models) {
    for (int i = 0; i <= m.m_max(); ++i) {
      for (int n = 1; n <= m.n_max(); ++n) {
        const double target = -m.f_m[i] * m.g_hat[n - 1];
        split_err = std::max(split_err, std::abs(m.U1(i, n - 1) + m.U2(i, n - 1) - target) /
                                            std::max(std::abs(target), 1e-300));
      }
    }
  }
  for (std::size_t k = 1; k < models.size(); ++k) {
    for (int i = 0; i <= models[k].m_max(); ++i) {
      for (int n = 1; n <= models[k].n_max(); ++n) {
        const double target = std::abs(models[k].f_m[i] * models[k].g_hat[n - 1]);
        if (target < 1e-14) continue;
        if (!(std::abs(models[k].U1(i, n - 1)) > std::abs(models[k - 1].U1(i, n - 1)))) ++monotone_bad;
        if (!(std::abs(models[k].U2(i, n - 1)) < std::abs(models[k - 1].U2(i, n - 1)))) ++monotone_bad;
      }
    }
  }
  return result("fourier-split", split_err <= 1e-14 && monotone_bad == 0,
                "split error " + fmt(split_err) + ", " + std::to_string(monotone_bad) +
                    " modes not monotone in alpha");
}

CheckResult frequency_transfer(const Options&) {
  int bad = 0;
  for (double a : {0.25, 1.0, 10.0}) {
    for (int m = 0; m <= 20; ++m) {
      for (int n = 1; n <= 20; ++n) {
        if (!(a1d::transfer_ratio(a, m, n + 1) < a1d::transfer_ratio(a, m, n))) ++bad;
        if (!(a1d::transfer_ratio(a, m + 1, n) < a1d::transfer_ratio(a, m, n))) ++bad;
      }
    }
  }
  const double pi4 = std::pow(std::numbers::pi, 4);
  const double r = a1d::transfer_ratio(1.0, 0, 8);
  const double err = rel_diff(r, 1.0 / (1.0 + 4096.0 * pi4));
  return result("frequency-transfer", bad == 0 && err <= 1e-2,
                std::to_string(bad) + " non-decreasing steps; ratio(alpha=1, m=0, n=8) = " + fmt(r));
}

CheckResult fourier_oracle(const Options&) {
  const auto scene = a1d::flicker_scene_ramp(2);
  const auto model = a1d::fourier_decompose(scene, 10.0, 32, 32);
  const auto oracle = a1d::oracle_decompose_1d(scene, 10.0, 48, 48);
  const double d = a1d::fourier_oracle_discrepancy(model, oracle);
  return result("fourier-oracle", d <= 0.02, "relative L2 discrepancy " + fmt(d));
}

CheckResult ofe_residual_order(const Options&) {
  const auto scene = a1d::flicker_scene_ramp(3);
  auto max_residual = [&](int n) {
    const double h = 1.0 / n;
    double worst = 0.0;
    for (int i = 1; i < n; ++i) {
      for (int j = 1; j < n; ++j) {
        const double x = i * h, t = j * h;
        const double fx = (scene.value(x + h, t) - scene.value(x - h, t)) / (2 * h);
        const double ft = (scene.value(x, t + h) - scene.value(x, t - h)) / (2 * h);
        worst = std::max(worst, std::abs(fx * a1d::ofe_flow_1d(scene, x, t) + ft));
      }
    }
    return worst;
  };
  const double e1 = max_residual(32), e2 = max_residual(64);
  const double order = std::log2(e1 / e2);
  return result("ofe-residual", order >= 1.8,
                "residual " + fmt(e1) + " -> " + fmt(e2) + ", observed order " + fmt(order));
}

std::string levels_text(const a1d::NormStudy& s) {
  std::string out;
  for (const auto& l : s.levels) out += fmt(l.value) + " ";
  return out;
}

bool strictly_increasing(const a1d::NormStudy& s) {
  for (std::size_t i = 1; i < s.levels.size(); ++i)
    if (!(s.levels[i].value > s.levels[i - 1].value)) return false;
  return true;
}

CheckResult norms(const Options& o) {
  std::vector<std::string> failures;
  std::string detail;
  auto convergent = [&](a1d::NormCase c, double beta) {
    const auto s = a1d::example_norms(c, beta, {});
    const double err = rel_diff(s.levels.back().value, s.analytic.value());
    detail += std::string(a1d::to_string(c)) + "(" + fmt(beta) + ") err " + fmt(err) + "; ";
    if (err > 0.02) failures.push_back(std::string(a1d::to_string(c)) + " beta=" + fmt(beta));
  };
  auto divergent = [&](a1d::NormCase c, double beta) {
    a1d::NormStudyOptions opt;
    opt.levels = 4;
    const auto s = a1d::example_norms(c, beta, opt);
    detail += std::string(a1d::to_string(c)) + "(" + fmt(beta) + ") " + levels_text(s) + "; ";
    if (!strictly_increasing(s))
      failures.push_back(std::string(a1d::to_string(c)) + " beta=" + fmt(beta) + " not increasing");
  };
  if (o.beta) {
    const double b = *o.beta;
    if (!(b > 0.0 && b < 1.0)) throw InvalidArgument("norms: beta must lie in (0,1)");
    if (a1d::example_norm_analytic(a1d::NormCase::ex2_u, b))
      convergent(a1d::NormCase::ex2_u, b);
    else
      divergent(a1d::NormCase::ex2_u, b);
    convergent(a1d::NormCase::ex2_uhat, b);
  } else {
    convergent(a1d::NormCase::ex2_u, 0.75);
    for (double b : {0.25, 0.5, 0.75}) convergent(a1d::NormCase::ex2_uhat, b);
    divergent(a1d::NormCase::ex2_u, 0.4);
    divergent(a1d::NormCase::ex1_uhat, 0.0);
  }
  std::string fail_text;
  for (const auto& f : failures) fail_text += f + "; ";
  return result("norms", failures.empty(), failures.empty() ? detail : "failed: " + fail_text);
}

// ---------------------------------------------------------------------------
// synth

std::vector<synth::Fixture> generator_outputs() {
  std::vector<synth::Fixture> out = synth::bundled_fixtures();
  const GridSpec g(24, 20, 6);
  out.push_back({"separable-power", synth::gen_separable(g, a1d::power_law_scene(0.6), 1)});
  out.push_back({"separable-flicker",
                 synth::gen_separable(g, a1d::flicker_scene_parabola(4))});
  const auto fr = synth::make_flicker_frames(24, 20);
  out.push_back({"flicker-raw", synth::gen_flicker(fr.frame1, fr.frame2, 2)});
  return out;
}

CheckResult synth_determinism(const Options&) {
  const auto a = generator_outputs();
  const auto b = generator_outputs();
  int bad = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!(a[i].f == b[i].f)) ++bad;
  return result("synth-determinism", bad == 0, std::to_string(bad) + " generators differ");
}

CheckResult synth_range(const Options&) {
  std::string bad;
  for (const auto& fx : generator_outputs()) {
    const auto [lo, hi] = std::minmax_element(fx.f.values().begin(), fx.f.values().end());
    if (*lo < 0.0 || *hi > 1.0) bad += fx.name + " ";
  }
  return result("synth-range", bad.empty(), bad.empty() ? "all outputs in [0,1]" : "out of range: " + bad);
}

CheckResult rotation_symmetry(const Options&) {
  const GridSpec g(32, 32, 9);
  const Image2D base = synth::textured_disc_pattern(32, 32);
  const ScalarField3 f = synth::gen_periodic_motion(g, base, 1);
  double worst = 0.0;
  for (int t = 0; t < g.T(); ++t) {
    const int mirror = g.T() - 1 - t;
    // The mirrored frame is the rotation by the complementary angle -theta.
    const double theta = 2.0 * std::numbers::pi * t * g.dt();
    const Image2D expected = synth::rotate_pattern(base, -theta);
    for (int s = 0; s < g.N(); ++s)
      for (int r = 0; r < g.M(); ++r)
        worst = std::max(worst, std::abs(f.at(r, s, mirror) - std::clamp(expected.at(r, s), 0.0, 1.0)));
  }
  return result("rotation-symmetry", worst <= 1e-3, "max deviation " + fmt(worst));
}

// ---------------------------------------------------------------------------
// flow_io

CheckResult flo_roundtrip(const Options&) {
  Rng rng(12);
  std::uniform_int_distribution<int> sd(1, 9);
  std::uniform_real_distribution<float> vd(-1e3f, 1e3f);
  std::uniform_int_distribution<int> special(0, 20);
  int bad = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    io::FlowSlice s(sd(rng), sd(rng));
    for (std::size_t i = 0; i < s.u.size(); ++i) {
      s.u[i] = special(rng) == 0 ? 1.7e9f : vd(rng);
      s.v[i] = special(rng) == 0 ? -0.0f : vd(rng);
    }
    const io::FlowSlice back = io::decode_flo(io::encode_flo(s));
    const bool same = back.width == s.width && back.height == s.height &&
                      std::memcmp(back.u.data(), s.u.data(), s.u.size() * 4) == 0 &&
                      std::memcmp(back.v.data(), s.v.data(), s.v.size() * 4) == 0;
    if (!same) ++bad;
  }
  return result("flo-roundtrip", bad == 0, std::to_string(bad) + " of 1000 slices differ");
}

CheckResult flo_golden_bytes(const Options&) {
  io::FlowSlice s(2, 1);
  s.u = {1.0f, -2.5f};
  s.v = {0.5f, 0.0f};
  const std::vector<std::uint8_t> expected{
      0x50, 0x49, 0x45, 0x48, 0x02, 0x00, 0x00, 0x00, 0x01, 0x00, 0x00, 0x00,
      0x00, 0x00, 0x80, 0x3f, 0x00, 0x00, 0x00, 0x3f, 0x00, 0x00, 0x20, 0xc0, 0x00, 0x00, 0x00, 0x00};
  const bool same = io::encode_flo(s) == expected;
  return result("flo-golden-bytes", same, same ? "2x1 file matches reference bytes" : "byte mismatch");
}

double hue_of(const io::FlowSlice& s, std::size_t i) {
  double h = std::atan2(double(s.v[i]), double(s.u[i])) / (2.0 * std::numbers::pi);
  return h < 0.0 ? h + 1.0 : h;
}

CheckResult color_equivariance(const Options&) {
  const io::FlowSlice wheel = io::color_wheel_slice(41);
  int worst = 0;
  for (int k = 0; k < 8; ++k) {
    const double phi = 2.0 * std::numbers::pi * (k + 0.5) / 8.0;
    io::FlowSlice rot = wheel;
    for (std::size_t i = 0; i < rot.u.size(); ++i) {
      rot.u[i] = static_cast<float>(std::cos(phi) * wheel.u[i] - std::sin(phi) * wheel.v[i]);
      rot.v[i] = static_cast<float>(std::sin(phi) * wheel.u[i] + std::cos(phi) * wheel.v[i]);
    }
    const io::RgbImage img = io::render_color(rot, 1.0);
    for (std::size_t i = 0; i < rot.u.size(); ++i) {
      std::uint8_t expected[3];
      io::hsv_to_rgb8(hue_of(wheel, i) + phi / (2.0 * std::numbers::pi),
                      std::min(1.0, wheel.magnitude(i)), 1.0, expected);
      for (int c = 0; c < 3; ++c)
        worst = std::max(worst, std::abs(int(img.data[3 * i + c]) - int(expected[c])));
    }
  }
  return result("color-equivariance", worst <= 1,
                "max channel deviation " + std::to_string(worst) + "/255 over 8 angles");
}

CheckResult color_wheel_anchors(const Options&) {
  const int n = 41;
  const io::RgbImage img = io::render_color(io::color_wheel_slice(n), 1.0);
  auto px = [&](int x, int y) {
    const std::uint8_t* p = img.data.data() + 3 * (std::size_t(y) * n + x);
    return std::array<int, 3>{p[0], p[1], p[2]};
  };
  const int c = n / 2;
  const bool ok = px(c, c) == std::array<int, 3>{255, 255, 255} &&
                  px(n - 1, c) == std::array<int, 3>{255, 0, 0} &&
                  px(c, n - 1) == std::array<int, 3>{128, 255, 0} &&
                  px(0, c) == std::array<int, 3>{0, 255, 255} &&
                  px(c, 0) == std::array<int, 3>{128, 0, 255} &&
                  px(0, 0) == std::array<int, 3>{255, 255, 255};
  return result("color-wheel-anchors", ok,
                ok ? "centre white, rim hues at 0/90/180/270 degrees, zero flow outside the disc white"
                   : "anchor colour mismatch");
}

CheckResult sequence_idempotent(const Options&) {
  Rng rng(13);
  const GridSpec g(9, 7, 4);
  ScalarField3 f = random_field(g, rng, 0.0, 1.0);
  f[0] = 0.0;
  f[1] = 1.0;
  const fs::path dir = fs::temp_directory_path() / ("stflow_verify_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  const ScalarField3 f1 = io::read_sequence(io::write_sequence(f, dir / "a"));
  const ScalarField3 f2 = io::read_sequence(io::write_sequence(f1, dir / "b"));
  fs::remove_all(dir);
  double e01 = 0.0, e12 = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    e01 = std::max(e01, std::abs(f1[i] - f[i]));
    e12 = std::max(e12, std::abs(f2[i] - f1[i]));
  }
  const double q = 1.0 / 255.0;
  return result("sequence-idempotent", e01 <= q && e12 <= q,
                "write/read deviation " + fmt(e01) + ", second pass " + fmt(e12));
}

// ---------------------------------------------------------------------------
// cli

CheckResult default_parameters(const Options&) {
  const SolverConfig c;
  const bool ok = c.dtau == 1e-4 && c.tol == 0.05 && c.max_iter == 100 && c.eps_nu == 0.01 &&
                  c.lambda == 0.1;
  return result("default-parameters", ok, "dtau 1e-4, tol 0.05, max-iter 100, eps 0.01, lambda 0.1");
}

}  // namespace

const std::vector<Check>& registry() {
  static const std::vector<Check> checks{
      {"grid-index-roundtrip", "grid", grid_index_roundtrip},
      {"grid-homogeneity", "grid", grid_homogeneity},
      {"grid-trilinear-sampling", "grid", grid_trilinear_sampling},
      {"primitive-difference", "operators", primitive_difference},
      {"sbp-adjoint", "operators", sbp_adjoint},
      {"surrogate-identity", "operators", surrogate_identity},
      {"grad-constants", "operators", grad_constants},
      {"nu-monotone", "regularizer", nu_monotone},
      {"nu-prime-bounds", "regularizer", nu_prime_bounds},
      {"energies-nonnegative", "regularizer", energies_nonnegative},
      {"gradient-check", "regularizer", gradient_check},
      {"reg2-nested", "regularizer", reg2_nested},
      {"sweep-fixed-point", "solver", sweep_fixed_point},
      {"energy-descent", "solver", energy_descent},
      {"iteration-count", "solver", iteration_count},
      {"reproducibility", "solver", reproducibility},
      {"horn-schunck-descent", "baselines", horn_schunck_descent},
      {"ws-shared-path", "baselines", ws_shared_path},
      {"fourier-split", "analytic1d", fourier_split},
      {"frequency-transfer", "analytic1d", frequency_transfer},
      {"fourier-oracle", "analytic1d", fourier_oracle},
      {"ofe-residual", "analytic1d", ofe_residual_order},
      {"norms", "analytic1d", norms},
      {"synth-determinism", "synth", synth_determinism},
      {"synth-range", "synth", synth_range},
      {"rotation-symmetry", "synth", rotation_symmetry},
      {"flo-roundtrip", "flow_io", flo_roundtrip},
      {"flo-golden-bytes", "flow_io", flo_golden_bytes},
      {"color-equivariance", "flow_io", color_equivariance},
      {"color-wheel-anchors", "flow_io", color_wheel_anchors},
      {"sequence-idempotent", "flow_io", sequence_idempotent},
      {"default-parameters", "cli", default_parameters},
  };
  return checks;
}

std::vector<CheckResult> run(const Options& options) {
  std::vector<CheckResult> out;
  bool matched = false;
  for (const Check& c : registry()) {
    if (options.only && *options.only != c.name && *options.only != c.group) continue;
    matched = true;
    try {
      out.push_back(c.run(options));
    } catch (const std::exception& e) {
      out.push_back({c.name, false, std::string("exception: ") + e.what()});
    }
  }
  if (!matched) throw InvalidArgument("no check named '" + *options.only + "'");
  return out;
}

std::string format(const CheckResult& r) {
  return std::string(r.pass ? "PASS " : "FAIL ") + r.name + ": " + r.detail;
}

}  // namespace stflow::verify
