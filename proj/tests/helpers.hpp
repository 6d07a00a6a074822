#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "ascqa/chain.hpp"

namespace ascqa::testing {

/// Random coupling list of length n_spins - 1 with entries in [lo, hi].
inline std::vector<double> random_couplings(std::mt19937_64& rng, int n_spins, double lo = 0.2,
                                            double hi = 1.5) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> J(static_cast<std::size_t>(n_spins - 1));
  for (double& x : J) x = u(rng);
  return J;
}

/// Random valid alternating-sectors chain with N <= max_spins.
inline ChainSpec random_chain(std::mt19937_64& rng, int max_spins) {
  std::uniform_int_distribution<int> pick_n(1, std::max(1, (max_spins - 1) / 3));
  for (;;) {
    const int n = pick_n(rng);
    const int max_b = ((max_spins - 1) / n - 1) / 2;
    if (max_b < 0) continue;
    std::uniform_int_distribution<int> pick_b(0, max_b);
    const int N = 1 + n * (2 * pick_b(rng) + 1);
    if (N < 2) continue;
    std::uniform_real_distribution<double> w2(0.2, 0.9);
    const double light = w2(rng);
    return ChainSpec{N, n, 1.0, light};
  }
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace ascqa::testing
