#include "stflow/baselines.hpp"

#include <algorithm>

namespace stflow {

namespace {

struct HsDerivatives {
  Image2D ix, iy, it;
};

HsDerivatives hs_derivatives(const Image2D& a, const Image2D& b) {
  const int w = a.width, h = a.height;
  HsDerivatives d{Image2D(w, h), Image2D(w, h), Image2D(w, h)};
  auto avg = [&](int x, int y) {
    x = std::clamp(x, 0, w - 1);
    y = std::clamp(y, 0, h - 1);
    return 0.5 * (a.at(x, y) + b.at(x, y));
  };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      d.ix.at(x, y) = 0.5 * (avg(x + 1, y) - avg(x - 1, y));
      d.iy.at(x, y) = 0.5 * (avg(x, y + 1) - avg(x, y - 1));
      d.it.at(x, y) = b.at(x, y) - a.at(x, y);
    }
  }
  return d;
}

// 4-neighbour average with replicated borders.
double local_average(const Image2D& f, int x, int y) {
  const int w = f.width, h = f.height;
  return 0.25 * (f.at(std::min(x + 1, w - 1), y) + f.at(std::max(x - 1, 0), y) +
                 f.at(x, std::min(y + 1, h - 1)) + f.at(x, std::max(y - 1, 0)));
}

void check_frames(const Image2D& a, const Image2D& b) {
  if (!a.same_size(b)) throw InvalidArgument("horn_schunck: frame size mismatch");
  if (a.width < 2 || a.height < 2) throw InvalidArgument("horn_schunck: frames too small");
}

}  // namespace

Flow2D horn_schunck(const Image2D& frame_a, const Image2D& frame_b, double alpha, int iters) {
  check_frames(frame_a, frame_b);
  if (!(alpha > 0.0)) throw InvalidArgument("horn_schunck: alpha must be positive");
  const int w = frame_a.width, h = frame_a.height;
  const HsDerivatives d = hs_derivatives(frame_a, frame_b);
  Flow2D flow{Image2D(w, h), Image2D(w, h)};
  Flow2D next = flow;
  for (int k = 0; k < iters; ++k) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const double ub = local_average(flow.u, x, y);
        const double vb = local_average(flow.v, x, y);
        const double ix = d.ix.at(x, y), iy = d.iy.at(x, y), it = d.it.at(x, y);
        const double t = (ix * ub + iy * vb + it) / (4.0 * alpha + ix * ix + iy * iy);
        next.u.at(x, y) = ub - ix * t;
        next.v.at(x, y) = vb - iy * t;
      }
    }
    std::swap(flow, next);
  }
  return flow;
}

double horn_schunck_energy(const Image2D& frame_a, const Image2D& frame_b, const Flow2D& flow,
                           double alpha) {
  check_frames(frame_a, frame_b);
  const HsDerivatives d = hs_derivatives(frame_a, frame_b);
  const int w = frame_a.width, h = frame_a.height;
  double data = 0.0, smooth = 0.0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double r = d.ix.at(x, y) * flow.u.at(x, y) + d.iy.at(x, y) * flow.v.at(x, y) +
                       d.it.at(x, y);
      data += r * r;
      if (x + 1 < w) {
        const double du = flow.u.at(x + 1, y) - flow.u.at(x, y);
        const double dv = flow.v.at(x + 1, y) - flow.v.at(x, y);
        smooth += du * du + dv * dv;
      }
      if (y + 1 < h) {
        const double du = flow.u.at(x, y + 1) - flow.u.at(x, y);
        const double dv = flow.v.at(x, y + 1) - flow.v.at(x, y);
        smooth += du * du + dv * dv;
      }
    }
  }
  return data + alpha * smooth;
}

SolverConfig WeickertSchnoerrParams::as_solver_config() const {
  SolverConfig c;
  c.alpha1 = alpha1;
  c.alpha2 = 1.0;  // unused: the u2 equations are skipped
  c.eps_nu = eps_nu;
  c.lambda = lambda;
  c.dtau = dtau;
  c.tol = tol;
  c.max_iter = max_iter;
  return c;
}

WeickertSchnoerrParams WeickertSchnoerrParams::from(const SolverConfig& c) {
  return {c.alpha1, c.eps_nu, c.lambda, c.dtau, c.tol, c.max_iter};
}

DecompositionResult weickert_schnoerr_run(const ScalarField3& f,
                                          const WeickertSchnoerrParams& params,
                                          const SweepObserver& observer) {
  return detail::run_fixed_point(f, params.as_solver_config(),
                                 detail::SweepMode::single_component, observer);
}

FlowComponent weickert_schnoerr(const ScalarField3& f, const WeickertSchnoerrParams& params) {
  return weickert_schnoerr_run(f, params).u1;
}

}  // namespace stflow
