// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "stflow/analytic1d.hpp"
#include "stflow/baselines.hpp"
#include "stflow/flow_io.hpp"
#include "stflow/operators.hpp"
#include "stflow/regularizer.hpp"
#include "stflow/solver.hpp"
#include "stflow/synth.hpp"

using namespace stflow;
namespace a1d = stflow::analytic1d;

namespace {

using Rng = std::mt19937_64;
constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

ScalarField3 random_field(const GridSpec& g, Rng& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  ScalarField3 f(g);
  for (auto& v : f.values()) v = d(rng);
  return f;
}

FlowComponent random_flow(const GridSpec& g, Rng& rng, double scale) {
  return {random_field(g, rng, -scale, scale), random_field(g, rng, -scale, scale)};
}

void zero_collar(ScalarField3& f) {
  const GridSpec& g = f.grid();
  for (int t = 0; t < g.T(); ++t)
    for (int s = 0; s < g.N(); ++s)
      for (int r = 0; r < g.M(); ++r)
        if (r == 0 || s == 0 || t == 0 || r == g.M() - 1 || s == g.N() - 1 || t == g.T() - 1)
          f.at(r, s, t) = 0.0;
}

// C = int_0^{1/4} x^2 (1-x)^2 / (1-2x)^2 dx; y = 1 - 2x gives
// (1/32) int_{1/2}^1 (y^-2 - 2 + y^2) dy.
double constant_c() {
  auto F = [](double y) { return (-1.0 / y - 2.0 * y + y * y * y / 3.0) / 32.0; };
  return F(1.0) - F(0.5);
}

bool strictly_increasing(const a1d::NormStudy& s) {
  for (std::size_t i = 1; i < s.levels.size(); ++i)
    if (!(s.levels[i].value > s.levels[i - 1].value)) return false;
  return true;
}

std::string levels(const a1d::NormStudy& s) {
  std::string out;
  for (const auto& l : s.levels) out += (out.empty() ? "" : " < ") + fmt(l.value);
  return out;
}

double mean_magnitude(const FlowComponent& u) {
  double m = 0.0;
  for (std::size_t i = 0; i < u.u1.size(); ++i) m += std::hypot(u.u1[i], u.u2[i]);
  return m / double(u.u1.size());
}

double sup_magnitude(const FlowComponent& u) {
  double m = 0.0;
  for (std::size_t i = 0; i < u.u1.size(); ++i) m = std::max(m, std::hypot(u.u1[i], u.u2[i]));
  return m;
}

double energy_at(const FlowComponent& u, std::size_t i) { return u.u1[i] * u.u1[i] + u.u2[i] * u.u2[i]; }

// ---------------------------------------------------------------------------

Outcome operator_identities() {
  Rng rng(101);
  double prim = 0.0, adj = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const GridSpec g(5 + trial % 4, 4 + trial % 3, 6 + trial);
    const ScalarField3 u = random_field(g, rng);
    const ScalarField3 p = temporal_primitive(u), pp = temporal_second_primitive(u);
    for (int t = 0; t + 1 < g.T(); ++t)
      for (int s = 0; s < g.N(); ++s)
        for (int r = 0; r < g.M(); ++r)
          prim = std::max(prim, rel((pp.at(r, s, t + 1) - pp.at(r, s, t)) / g.dt(), p.at(r, s, t)));

    const ScalarField3 h = random_field(g, rng);
    VectorField3 v(g);
    v.c1 = random_field(g, rng);
    v.c2 = random_field(g, rng);
    v.c3 = random_field(g, rng);
    zero_collar(v.c1);
    zero_collar(v.c2);
    zero_collar(v.c3);
    const VectorField3 gh = grad3(h);
    const double lhs = dot(gh.c1.values(), v.c1.values()) + dot(gh.c2.values(), v.c2.values()) +
                       dot(gh.c3.values(), v.c3.values());
    adj = std::max(adj, rel(lhs, -dot(h.values(), div3(v).values())));
  }
  const double sur = surrogate_identity_max_rel_error(random_field(GridSpec(9, 8, 7), rng, 0.0, 1.0), 100, 5);
  return {prim <= 1e-12 && adj <= 1e-10 && sur <= 1e-10,
          "primitive " + fmt(prim) + ", adjoint " + fmt(adj) + ", surrogate " + fmt(sur)};
}

Outcome gradient_checks() {
  double worst = 0.0;
  for (bool first : {true, false}) {
    Rng rng(first ? 201 : 202);
    const GridSpec g(8, 8, 6);
    const ScalarField3 f = random_field(g, rng, 0.0, 1.0);
    const FlowComponent u1 = random_flow(g, rng, 0.05), u2 = random_flow(g, rng, 0.05);
    SolverConfig c;
    c.alpha1 = 0.9;
    c.alpha2 = 1.7;
    const FlowComponent res = first ? optimality_residual_u1(f, u1, u2, c) : optimality_residual_u2(f, u1, u2, c);
    for (int k = 0; k < 24; ++k) {
      FlowComponent d = random_flow(g, rng, 1.0);
      if (first) {
        zero_collar(d.u1);
        zero_collar(d.u2);
      }
      auto F = [&](double h) {
        const FlowComponent m = sum(first ? u1 : u2, scaled(d, h));
        return first ? total_energy(f, m, u2, c) : total_energy(f, u1, m, c);
      };
      const double h = 1e-5;
      const double fd = (F(h) - F(-h)) / (2 * h);
      const double an = 2 * g.cell_volume() * (dot(res.u1.values(), d.u1.values()) + dot(res.u2.values(), d.u2.values()));
      worst = std::max(worst, rel(fd, an));
    }
  }
  return {worst <= 1e-4, "max rel error " + fmt(worst) + " over 48 directions"};
}

Outcome fourier_cross_validation() {
  const auto scene = a1d::flicker_scene_ramp(2);
  const double d = a1d::fourier_oracle_discrepancy(a1d::fourier_decompose(scene, 10.0, 32, 32),
                                                   a1d::oracle_decompose_1d(scene, 10.0, 48, 48));
  return {d <= 0.02, "relative L2 discrepancy " + fmt(d)};
}

Outcome frequency_law() {
  int bad = 0;
  for (double a : {0.1, 1.0, 10.0, 100.0})
    for (int m = 0; m <= 24; ++m)
      for (int n = 1; n <= 24; ++n) {
        bad += !(a1d::transfer_ratio(a, m, n + 1) < a1d::transfer_ratio(a, m, n));
        bad += !(a1d::transfer_ratio(a, m + 1, n) < a1d::transfer_ratio(a, m, n));
      }
  // Ratio from the solved coefficients of a pure n0 = 8 flicker at m = 0.
  const auto model = a1d::fourier_decompose(a1d::flicker_scene_ramp(8), 1.0, 4, 8, 4096);
  const double total = model.U1(0, 7) + model.U2(0, 7);
  const double r = std::abs(model.U1(0, 7)) / std::abs(total);
  const double expect = 1.0 / (1.0 + 4096.0 * std::pow(kPi, 4));
  const double err = rel(r, expect);
  return {bad == 0 && err <= 0.01,
          std::to_string(bad) + " monotonicity violations; ratio " + fmt(r) + " vs " + fmt(expect)};
}

Outcome power_law_norms() {
  const double C = constant_c();
  std::string detail;
  bool ok = rel(a1d::example_constant_c(), C) <= 1e-8;
  detail += "C " + fmt(a1d::example_constant_c()) + "; ";
  {
    const double beta = 0.75;
    const auto s = a1d::example_norms(a1d::NormCase::ex2_u, beta, {});
    const double e = rel(s.levels.back().value, C / (2 * beta - 1));
    ok &= e <= 0.02;
    detail += "u(0.75) err " + fmt(e) + "; ";
  }
  for (double beta : {0.25, 0.5, 0.75}) {
    const auto s = a1d::example_norms(a1d::NormCase::ex2_uhat, beta, {});
    const double expect = C / (beta * beta) * (1.0 / (2 * beta + 1) - 2.0 / (beta + 1) + 1.0);
    const double e = rel(s.levels.back().value, expect);
    ok &= e <= 0.02;
    detail += "uhat(" + fmt(beta) + ") err " + fmt(e) + "; ";
  }
  a1d::NormStudyOptions o;
  o.levels = 4;
  const auto d = a1d::example_norms(a1d::NormCase::ex2_u, 0.4, o);
  ok &= d.levels.size() == 4 && strictly_increasing(d);
  detail += "u(0.4) " + levels(d);
  return {ok, detail};
}

Outcome darkening_primitive_divergence() {
  a1d::NormStudyOptions o;
  o.levels = 4;
  const auto s = a1d::example_norms(a1d::NormCase::ex1_uhat, 0.0, o);
  return {s.levels.size() == 4 && strictly_increasing(s), levels(s)};
}

Outcome solver_behavior() {
  bool ok = true;
  std::string detail;
  for (const auto& fx : synth::bundled_fixtures()) {
    const DecompositionResult a = decompose(fx.f, SolverConfig{});
    const DecompositionResult b = decompose(fx.f, SolverConfig{});
    double up = 0.0;
    for (std::size_t k = 2; k < a.energy_history.size(); ++k)
      up = std::max(up, (a.energy_history[k] - a.energy_history[k - 1]) / std::abs(a.energy_history[k - 1]));
    const bool same = a.energy_history == b.energy_history && a.u1 == b.u1 && a.u2 == b.u2;
    ok &= a.iterations < 100 && up <= 1e-9 && same;
    detail += fx.name + " k=" + std::to_string(a.iterations) + " uptick " + fmt(up) + (same ? "" : " NOT reproducible") + "; ";
  }
  return {ok, detail};
}

Outcome frequency_experiment() {
  const GridSpec g(48, 48, 16);
  const Image2D base = synth::textured_disc_pattern(48, 48);
  SolverConfig c;
  c.alpha1 = 1.0;
  c.alpha2 = 0.25;
  std::vector<double> m;
  std::string detail;
  for (int k : {2, 4, 8}) {
    m.push_back(mean_magnitude(decompose(synth::gen_periodic_motion(g, base, k), c).u2));
    detail += "k=" + std::to_string(k) + " " + fmt(m.back()) + "; ";
  }
  return {m[0] < m[1] && m[1] < m[2], "mean |u2|: " + detail};
}

Outcome background_foreground() {
  const GridSpec g(48, 48, 16);
  synth::SquareSceneLayout lay;
  const ScalarField3 f = synth::gen_square_over_oscillating_bg(g, {}, &lay);
  SolverConfig c;
  c.alpha1 = 1e3;
  c.alpha2 = 1e3;
  c.dtau = 1e-5;
  c.tol = 1e-3;
  c.max_iter = 100000;
  const DecompositionResult r = decompose(f, c);
  double bg[2] = {0, 0}, sq[2] = {0, 0};
  for (int t = 0; t < g.T(); ++t)
    for (int s = 0; s < g.N(); ++s)
      for (int x = 0; x < g.M(); ++x) {
        const std::size_t i = g.index(x, s, t);
        const double e1 = energy_at(r.u1, i), e2 = energy_at(r.u2, i);
        if (lay.in_background(x, s, t, 2.0)) {
          bg[0] += e1;
          bg[1] += e2;
        }
        if (lay.in_square_interior(x, s, t, 2.0)) {
          sq[0] += e1;
          sq[1] += e2;
        }
      }
  const double bg2 = bg[1] / (bg[0] + bg[1]), sq1 = sq[0] / (sq[0] + sq[1]);
  return {bg2 >= 0.8 && sq1 >= 0.8, "background share in u2 " + fmt(bg2) + ", square interior share in u1 " +
                                        fmt(sq1) + " (k=" + std::to_string(r.iterations) + ")"};
}

Outcome flicker_experiment() {
  const auto fr = synth::make_flicker_frames(48, 48);
  const ScalarField3 f = synth::gen_flicker(fr.frame1, fr.frame2, 4, 32);
  const GridSpec& g = f.grid();
  SolverConfig c;
  c.alpha1 = 1.0;
  c.alpha2 = 1.0;
  c.tol = 1e-3;
  c.max_iter = 100000;
  const DecompositionResult r = decompose(f, c);
  const double ratio = sup_magnitude(r.u1) / sup_magnitude(r.u2);
  const synth::Rect zone = fr.changed.dilated(2);
  double inside = 0.0, total = 0.0;
  for (int t = 0; t < g.T(); ++t)
    for (int s = 0; s < g.N(); ++s)
      for (int x = 0; x < g.M(); ++x) {
        const double e = energy_at(r.u2, g.index(x, s, t));
        total += e;
        if (zone.contains(x, s)) inside += e;
      }
  const double frac = inside / total;
  return {ratio <= 0.1 && frac >= 0.7, "sup|u1|/sup|u2| " + fmt(ratio) + ", u2 energy in changed region " +
                                           fmt(frac) + " (k=" + std::to_string(r.iterations) + ")"};
}

Outcome residual_ordering() {
  SolverConfig c;
  c.alpha1 = 100.0;
  c.alpha2 = 0.25;
  c.tol = 0.01;
  bool ok = true;
  std::string detail;
  for (const auto& fx : synth::bundled_fixtures()) {
    const DecompositionResult d = decompose(fx.f, c);
    const DecompositionResult w = weickert_schnoerr_run(fx.f, WeickertSchnoerrParams::from(c));
    const double ed = data_energy(fx.f, d.u1, d.u2), ew = data_energy(fx.f, w.u1, w.u2);
    ok &= ed < ew;
    detail += fx.name + " " + fmt(ed / ew) + "; ";
  }
  return {ok, "decomposition/single-flow data energy: " + detail};
}

Outcome penalty_limit() {
  SolverConfig c;
  c.alpha2 = 1e8;
  c.tol = 1e-12;
  c.max_iter = 100;
  bool ok = true;
  std::string detail;
  for (const auto& fx : synth::bundled_fixtures()) {
    const DecompositionResult d = decompose(fx.f, c);
    const DecompositionResult w = weickert_schnoerr_run(fx.f, WeickertSchnoerrParams::from(c));
    const double n2 = std::sqrt(l2_norm_sq(d.u2));
    const double diff = std::sqrt(l2_norm_sq(sum(d.u1, scaled(w.u1, -1.0)))), nw = std::sqrt(l2_norm_sq(w.u1));
    const double rd = nw > 0.0 ? diff / nw : diff;
    ok &= n2 <= 1e-3 && rd <= 0.01;
    detail += fx.name + " |u2| " + fmt(n2) + " u1 diff " + fmt(rd) + "; ";
  }
  return {ok, detail};
}

Outcome flo_io() {
  Rng rng(1301);
  std::uniform_int_distribution<int> sd(1, 12);
  std::uniform_int_distribution<std::uint32_t> bits;
  int bad = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    io::FlowSlice s(sd(rng), sd(rng));
    for (auto* ch : {&s.u, &s.v})
      for (auto& x : *ch) {
        float v;
        do {
          v = std::bit_cast<float>(bits(rng));
        } while (!std::isfinite(v));
        x = v;
      }
    const auto bytes = io::encode_flo(s);
    const auto back = io::decode_flo(bytes);
    bad += !(io::encode_flo(back) == bytes && back.width == s.width && back.height == s.height);
  }

  io::FlowSlice ref(2, 1);
  ref.u = {1.0f, -2.5f};
  ref.v = {0.5f, 0.0f};
  const std::vector<std::uint8_t> golden = {0x50, 0x49, 0x45, 0x48, 0x02, 0x00, 0x00, 0x00, 0x01, 0x00,
                                            0x00, 0x00, 0x00, 0x00, 0x80, 0x3f, 0x00, 0x00, 0x00, 0x3f,
                                            0x00, 0x00, 0x20, 0xc0, 0x00, 0x00, 0x00, 0x00};
  const bool golden_ok = io::encode_flo(ref) == golden;

  const io::RgbImage wheel = io::read_png_rgb(std::filesystem::path(STFLOW_TEST_DATA_DIR) / "color_wheel.png");
  const io::RgbImage got = io::render_color(io::color_wheel_slice(wheel.width), 1.0);
  int worst = 255;
  if (got.data.size() == wheel.data.size()) {
    worst = 0;
    for (std::size_t i = 0; i < got.data.size(); ++i) worst = std::max(worst, std::abs(int(got.data[i]) - int(wheel.data[i])));
  }
  return {bad == 0 && golden_ok && worst <= 1,
          std::to_string(bad) + "/1000 roundtrip mismatches, golden bytes " + (golden_ok ? "match" : "DIFFER") +
              ", color wheel max channel diff " + std::to_string(worst)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"operator-identities", operator_identities},
      {"gradient-checks", gradient_checks},
      {"fourier-cross-validation", fourier_cross_validation},
      {"frequency-law", frequency_law},
      {"power-law-norms", power_law_norms},
      {"darkening-primitive-divergence", darkening_primitive_divergence},
      {"solver-behavior", solver_behavior},
      {"frequency-experiment", frequency_experiment},
      {"background-foreground-split", background_foreground},
      {"flicker-experiment", flicker_experiment},
      {"residual-ordering", residual_ordering},
      {"penalty-limit", penalty_limit},
      {"flo-io", flo_io},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !o.pass;
    std::printf("%s %2zu %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", int(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
