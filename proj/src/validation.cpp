#include "ascqa/validation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

#include "ascqa/chain.hpp"
#include "ascqa/fermion.hpp"
#include "ascqa/oracle.hpp"
#include "ascqa/wick.hpp"

namespace ascqa {

namespace {

using Clock = std::chrono::steady_clock;

// Random alternating-sectors chain with 2 <= N <= max_spins, heavy coupling in
// [0.6, 1.5] and light coupling in [0.2, 0.9 heavy].
ChainSpec random_chain(std::mt19937_64& rng, int max_spins) {
  for (;;) {
    const int n = std::uniform_int_distribution<int>(1, std::max(1, (max_spins - 1) / 3))(rng);
    const int max_b = ((max_spins - 1) / n - 1) / 2;
    if (max_b < 0) continue;
    const int b = std::uniform_int_distribution<int>(0, max_b)(rng);
    const double heavy = std::uniform_real_distribution<double>(0.6, 1.5)(rng);
    const double light = std::uniform_real_distribution<double>(0.2, 0.9 * heavy)(rng);
    const ChainSpec spec{1 + n * (2 * b + 1), n, heavy, light};
    if (spec.num_spins >= 2) return spec;
  }
}

double random_field(std::mt19937_64& rng) {
  return std::uniform_real_distribution<double>(0.2, 1.5)(rng);
}

// Index of the unique dense eigenvector with the given parity and energy; -1 when the
// level is degenerate within `window` or absent.
int find_level(const DenseSpectrum& ex, int parity, double energy, double window = 1e-7) {
  int found = -1;
  for (int k = 0; k < static_cast<int>(ex.parity.size()); ++k) {
    if (ex.parity[static_cast<std::size_t>(k)] != parity) continue;
    if (std::abs(ex.energies(k) - energy) < window) {
      if (found >= 0) return -1;
      found = k;
    }
  }
  return found;
}

struct Paired {
  FermionSpectrum fermions;
  ContractionTables tables;
  DenseSpectrum exact;
  int vacuum_parity = 0;
  int vacuum = -1;
};

Paired paired_solution(double gamma, const std::vector<double>& couplings) {
  Paired p;
  p.fermions = diagonalize(gamma, couplings);
  p.tables = build_tables(p.fermions);
  p.exact = exact_spectrum(gamma, couplings);
  const int n = p.fermions.size();
  // The vacuum parity is the sign of the last diagonal entry of the contraction table.
  p.vacuum_parity = p.tables.g_tilde(n - 1, n - 1) > 0 ? 1 : -1;
  p.vacuum = find_level(p.exact, p.vacuum_parity, p.fermions.ground_energy);
  return p;
}

template <class Body>
ValidationCheck timed(std::string name, double tolerance, int chains, Body body) {
  ValidationCheck check;
  check.name = std::move(name);
  check.tolerance = tolerance;
  check.chains = chains;
  const auto start = Clock::now();
  body(check);
  check.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return check;
}

}  // namespace

ValidationCheck check_zero_field(std::uint64_t seed, int chains, int max_spins, double tolerance) {
  return timed("zero_field", tolerance, chains, [&](ValidationCheck& check) {
    std::mt19937_64 rng(seed);
    for (int c = 0; c < chains; ++c) {
      const auto J = build_couplings(random_chain(rng, max_spins));
      std::vector<double> expected{0.0};
      for (double j : J) expected.push_back(2.0 * j);
      std::sort(expected.begin(), expected.end());
      const auto sp = diagonalize(0.0, J);
      const double scale = expected.back();
      for (int k = 0; k < sp.size(); ++k) {
        const double ref = expected[static_cast<std::size_t>(k)];
        check.worst = std::max(check.worst, std::abs(sp.lambdas(k) - ref) / std::max(ref, scale));
        ++check.compared;
      }
    }
  });
}

ValidationCheck check_spectrum_equivalence(std::uint64_t seed, int chains, int max_spins,
                                           double tolerance) {
  return timed("spectrum_equivalence", tolerance, chains, [&](ValidationCheck& check) {
    std::mt19937_64 rng(seed);
    for (int c = 0; c < chains; ++c) {
      const auto J = build_couplings(random_chain(rng, max_spins));
      const double gamma = random_field(rng);
      const auto fermionic = fermionic_many_body_energies(diagonalize(gamma, J));
      const auto exact = exact_spectrum(gamma, J);
      for (std::size_t k = 0; k < fermionic.size(); ++k) {
        check.worst = std::max(check.worst, std::abs(fermionic[k] - exact.energies(static_cast<Eigen::Index>(k))));
        ++check.compared;
      }
    }
  });
}

ValidationCheck check_single_fermion_elements(std::uint64_t seed, int chains, int max_spins,
                                              double tolerance) {
  return timed("single_fermion_elements", tolerance, chains, [&](ValidationCheck& check) {
    std::mt19937_64 rng(seed);
    for (int c = 0; c < chains; ++c) {
      const auto J = build_couplings(random_chain(rng, max_spins));
      const auto p = paired_solution(random_field(rng), J);
      if (p.vacuum < 0) {
        check.worst = std::max(check.worst, 1.0);  // vacuum not identified
        continue;
      }
      const int n = p.fermions.size();
      for (int site = 1; site <= n; ++site) {
        const Eigen::MatrixXd z = sigma_z_eigenbasis(p.exact, site);
        for (int b = 0; b < n; ++b) {
          const int level =
              find_level(p.exact, -p.vacuum_parity, p.fermions.ground_energy + p.fermions.lambdas(b));
          if (level < 0) continue;
          check.worst = std::max(check.worst, std::abs(std::abs(p.tables.theta(site - 1, b)) -
                                                       std::abs(z(p.vacuum, level))));
          ++check.compared;
        }
      }
    }
  });
}

ValidationCheck check_three_fermion_elements(std::uint64_t seed, int chains, int max_spins,
                                             double tolerance) {
  return timed("three_fermion_elements", tolerance, chains, [&](ValidationCheck& check) {
    std::mt19937_64 rng(seed);
    for (int c = 0; c < chains; ++c) {
      const auto J = build_couplings(random_chain(rng, std::max(max_spins, 4)));
      const auto p = paired_solution(random_field(rng), J);
      if (p.vacuum < 0) {
        check.worst = std::max(check.worst, 1.0);
        continue;
      }
      const int n = p.fermions.size();
      for (int site = 1; site <= n; ++site) {
        const Eigen::MatrixXd z = sigma_z_eigenbasis(p.exact, site);
        for (int a = 1; a <= n; ++a)
          for (int b = a + 1; b <= n; ++b)
            for (int d = b + 1; d <= n; ++d) {
              const int level =
                  find_level(p.exact, -p.vacuum_parity, state_energy(p.fermions, {a, b, d}));
              if (level < 0) continue;
              const double wick = three_fermion_element(p.fermions, site, {a, b, d});
              check.worst = std::max(check.worst, std::abs(std::abs(wick) - std::abs(z(level, p.vacuum))));
              ++check.compared;
            }
      }
    }
  });
}

std::vector<ValidationCheck> oracle_validation(std::uint64_t seed) {
  return {check_zero_field(seed), check_spectrum_equivalence(seed + 1),
          check_single_fermion_elements(seed + 2), check_three_fermion_elements(seed + 3)};
}

}  // namespace ascqa
