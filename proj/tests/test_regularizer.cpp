#include <doctest.h>

#include <cmath>

#include "stflow/analytic1d.hpp"
#include "stflow/regularizer.hpp"
#include "test_util.hpp"

using namespace stflow;

TEST_CASE("penaliser values") {
  const NuParams p{0.01, 0.1};
  CHECK(nu(0.0, p) == 0.0);
  CHECK(nu_prime(0.0, p) == doctest::Approx(0.505));
  CHECK(nu(3.0, NuParams{1.0, 0.1}) == doctest::Approx(3.0));
  CHECK(nu_prime(7.0, NuParams{1.0, 0.1}) == doctest::Approx(1.0));
  const double l = 0.2;
  CHECK(nu(0.12, NuParams{0.5, l}) ==
        doctest::Approx(0.5 * 0.12 + 0.5 * l * l * (std::sqrt(1 + 0.12 / (l * l)) - 1)));
  CHECK(nu_prime(1e12, p) == doctest::Approx(p.eps).epsilon(1e-4));
  CHECK_THROWS_AS(NuParams({0.0, 0.1}).validate(), InvalidArgument);
  CHECK_THROWS_AS(NuParams({0.1, -1.0}).validate(), InvalidArgument);
}

TEST_CASE("penaliser derivative matches finite differences") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> rd(0.01, 5.0), ed(0.001, 1.0), ld(0.01, 2.0);
  for (int i = 0; i < 200; ++i) {
    const NuParams p{ed(rng), ld(rng)};
    const double r = rd(rng), h = 1e-6 * std::max(1.0, r);
    const double fd = (nu(r + h, p) - nu(r - h, p)) / (2 * h);
    CHECK(fd == doctest::Approx(nu_prime(r, p)).epsilon(1e-6));
    CHECK(nu_prime(r, p) >= p.eps);
    CHECK(nu_prime(r, p) <= 0.5 * (1 + p.eps));
  }
}

TEST_CASE("spatio-temporal smoothness term") {
  CHECK(reg1(FlowComponent(GridSpec(4, 4, 4)), NuParams{}) == 0.0);
  double prev = 1.0;
  for (int n : {9, 17, 33}) {
    const GridSpec g(n, n, n);
    FlowComponent u(g);
    u.u1 = sample_closed_form(g, [](double x, double, double) { return x; });
    const double err = std::abs(reg1(u, NuParams{1.0, 0.1}) - 1.0);
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev < 0.1);
  const GridSpec g(6, 5, 4);
  FlowComponent c(ScalarField3(g, 2.0), ScalarField3(g, -1.0));
  CHECK(reg1(c, NuParams{}) == 0.0);
}

TEST_CASE("temporal-primitive term") {
  double prev = 1.0;
  for (int T : {9, 17, 33, 65}) {
    const GridSpec g(3, 3, T);
    FlowComponent u(g);
    u.u1 = ScalarField3(g, 1.0);
    const double mean_sq = reg2(u) / l2_norm_sq(u.u1);
    const double err = std::abs(mean_sq - 1.0 / 3.0);
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev < 0.05);

  const GridSpec g(3, 3, 16);
  FlowComponent constant(g), alternating(g);
  constant.u2 = ScalarField3(g, 1.0);
  for (int t = 0; t < g.T(); ++t)
    for (int s = 0; s < 3; ++s)
      for (int r = 0; r < 3; ++r) alternating.u2.at(r, s, t) = (t % 2 == 0) ? 1.0 : -1.0;
  CHECK(reg2(alternating) < 0.1 * reg2(constant));
}

TEST_CASE("data term") {
  const GridSpec g(7, 6, 5);
  const FlowComponent zero(g);
  CHECK(data_energy(ScalarField3(g, 0.4), zero, zero) == 0.0);

  const ScalarField3 moving = sample_closed_form(g, [](double x, double, double t) { return x + t; });
  FlowComponent u(g);
  u.u1 = ScalarField3(g, -1.0);
  const ScalarField3 res = ofe_residual(grad3(moving), u, zero);
  for (int t = 1; t < g.T() - 1; ++t)
    for (int s = 0; s < g.N(); ++s)
      for (int r = 1; r < g.M() - 1; ++r) CHECK(std::abs(res.at(r, s, t)) < 1e-12);
  CHECK(data_energy(moving, zero, u) == doctest::Approx(data_energy(moving, u, zero)));
}

TEST_CASE("exact flow of a separable scene leaves a second-order residual") {
  const auto scene = analytic1d::flicker_scene_ramp(1);
  double prev = 0.0;
  for (int n : {9, 17, 33}) {
    const GridSpec g(n, 3, n);
    const ScalarField3 f =
        sample_closed_form(g, [&](double x, double, double t) { return scene.value(x, t); });
    FlowComponent u(g);
    u.u1 = sample_closed_form(g, [&](double x, double, double t) { return analytic1d::ofe_flow_1d(scene, x, t); });
    const ScalarField3 res = ofe_residual(grad3(f), u, FlowComponent(g));
    double worst = 0.0;
    for (int t = 1; t < n - 1; ++t)
      for (int r = 1; r < n - 1; ++r) worst = std::max(worst, std::abs(res.at(r, 1, t)));
    if (prev > 0.0) CHECK(prev / worst > 3.5);
    prev = worst;
  }
}

TEST_CASE("total energy is the weighted sum and reduces with zero weights") {
  std::mt19937_64 rng(2);
  const GridSpec g(6, 6, 5);
  const ScalarField3 f = testutil::random_field(g, rng, 0.0, 1.0);
  const FlowComponent u1 = testutil::random_flow(g, rng, 0.1), u2 = testutil::random_flow(g, rng, 0.1);
  SolverConfig c;
  c.alpha1 = 2.5;
  c.alpha2 = 0.3;
  const double e = data_energy(f, u1, u2), r1 = reg1(u1, nu_params(c)), r2 = reg2(u2);
  CHECK(total_energy(f, u1, u2, c) == doctest::Approx(e + 2.5 * r1 + 0.3 * r2));
  c.alpha1 = 0.0;
  c.alpha2 = 0.0;
  CHECK(total_energy(f, u1, u2, c) == doctest::Approx(e));
  CHECK(e >= 0.0);
  CHECK(r1 >= 0.0);
  CHECK(r2 >= 0.0);
}

namespace {

double directional_error(bool first, unsigned seed) {
  std::mt19937_64 rng(seed);
  const GridSpec g(7, 6, 5);
  const ScalarField3 f = testutil::random_field(g, rng, 0.0, 1.0);
  const FlowComponent u1 = testutil::random_flow(g, rng, 0.05), u2 = testutil::random_flow(g, rng, 0.05);
  SolverConfig c;
  c.alpha1 = 0.5;
  c.alpha2 = 2.0;
  const FlowComponent res =
      first ? optimality_residual_u1(f, u1, u2, c) : optimality_residual_u2(f, u1, u2, c);
  FlowComponent d = testutil::random_flow(g, rng);
  if (first) {
    testutil::zero_collar(d.u1);
    testutil::zero_collar(d.u2);
  }
  auto energy = [&](double h) {
    const FlowComponent m = sum(first ? u1 : u2, scaled(d, h));
    return first ? total_energy(f, m, u2, c) : total_energy(f, u1, m, c);
  };
  const double h = 1e-5;
  const double fd = (energy(h) - energy(-h)) / (2 * h);
  const double an =
      2 * g.cell_volume() * (dot(res.u1.values(), d.u1.values()) + dot(res.u2.values(), d.u2.values()));
  return std::abs(fd - an) / std::max(std::abs(fd), 1e-300);
}

}  // namespace

TEST_CASE("optimality residuals are half gradients") {
  for (unsigned s = 0; s < 5; ++s) {
    CHECK(directional_error(true, 100 + s) < 1e-5);
    CHECK(directional_error(false, 200 + s) < 1e-5);
  }
}

TEST_CASE("second primitive pairs with the first") {
  std::mt19937_64 rng(6);
  const GridSpec g(4, 3, 12);
  const ScalarField3 u = testutil::random_field(g, rng);
  const double nested = -dot(temporal_second_primitive(u).values(), u.values()) * g.cell_volume();
  CHECK(nested == doctest::Approx(l2_norm_sq(temporal_primitive(u))).epsilon(1e-12));
}

TEST_CASE("diffusivity of a zero flow") {
  const NuParams p{0.2, 0.5};
  const ScalarField3 d = diffusivity(FlowComponent(GridSpec(3, 4, 3)), p);
  for (double v : d.values()) CHECK(v == doctest::Approx(0.6));
}
