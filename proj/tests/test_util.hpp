#pragma once

#include <random>

#include "stflow/grid.hpp"

namespace testutil {

inline stflow::ScalarField3 random_field(const stflow::GridSpec& g, std::mt19937_64& rng,
                                         double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  stflow::ScalarField3 f(g);
  for (auto& v : f.values()) v = d(rng);
  return f;
}

inline stflow::FlowComponent random_flow(const stflow::GridSpec& g, std::mt19937_64& rng,
                                         double scale = 1.0) {
  return {random_field(g, rng, -scale, scale), random_field(g, rng, -scale, scale)};
}

inline void zero_collar(stflow::ScalarField3& f) {
  const auto& g = f.grid();
  for (int t = 0; t < g.T(); ++t)
    for (int s = 0; s < g.N(); ++s)
      for (int r = 0; r < g.M(); ++r)
        if (r == 0 || s == 0 || t == 0 || r == g.M() - 1 || s == g.N() - 1 || t == g.T() - 1)
          f.at(r, s, t) = 0.0;
}

}  // namespace testutil
