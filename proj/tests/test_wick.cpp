#include <doctest.h>

#include <algorithm>
#include <random>
#include <utility>

#include "ascqa/errors.hpp"
#include "ascqa/oracle.hpp"
#include "ascqa/spectral.hpp"
#include "ascqa/wick.hpp"
#include "helpers.hpp"

using namespace ascqa;

namespace {

// Brute-force state lookup: the unique eigenvector with the given parity and energy,
// or -1 when the level is degenerate (within `window`) or absent.
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

struct Fixture {
  std::vector<double> J;
  double gamma;
  FermionSpectrum sp;
  ContractionTables tables;
  DenseSpectrum exact;
  int vacuum_parity;
  int vacuum;
};

Fixture make_fixture(std::vector<double> J, double gamma) {
  Fixture f{std::move(J), gamma, {}, {}, {}, 0, 0};
  f.sp = diagonalize(gamma, f.J);
  f.tables = build_tables(f.sp);
  f.exact = exact_spectrum(gamma, f.J);
  const int n = f.sp.size();
  f.vacuum_parity = f.tables.g_tilde(n - 1, n - 1) > 0 ? 1 : -1;
  f.vacuum = find_level(f.exact, f.vacuum_parity, f.sp.ground_energy);
  return f;
}

}  // namespace

TEST_CASE("g-tilde equals explicit determinants and is upper triangular") {
  std::mt19937_64 rng(4);
  for (int n : {2, 3, 4, 6, 9, 40}) {
    const auto J = testing::random_couplings(rng, n);
    const auto sp = diagonalize(0.7, J);
    const auto t = build_tables(sp);
    CHECK((t.g - sp.phi_bar() * sp.psi_bar().transpose()).cwiseAbs().maxCoeff() < 1e-14);
    double worst = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i > j) {
          CHECK(t.g_tilde(i, j) == 0.0);
          continue;
        }
        Eigen::MatrixXd sub(i + 1, i + 1);
        for (int c = 0; c < i; ++c) sub.col(c) = t.g.col(c).head(i + 1);
        sub.col(i) = t.g.col(j).head(i + 1);
        worst = std::max(worst, std::abs(sub.determinant() - t.g_tilde(i, j)));
      }
    CAPTURE(n);
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("first row reduces to the single-operator case") {
  std::mt19937_64 rng(8);
  const auto J = testing::random_couplings(rng, 12);
  const auto sp = diagonalize(0.5, J);
  const auto t = build_tables(sp);
  for (int b = 0; b < 12; ++b) CHECK(t.theta(0, b) == doctest::Approx(sp.phi(b, 0)).epsilon(1e-12));
}

TEST_CASE("theta matches brute-force sigma^z elements") {
  std::mt19937_64 rng(17);
  int compared = 0;
  for (int trial = 0; trial < 12; ++trial) {
    const int n = 3 + trial % 8;
    const double gamma = std::uniform_real_distribution<double>(0.2, 1.5)(rng);
    const auto f = make_fixture(testing::random_couplings(rng, n), gamma);
    REQUIRE(f.vacuum >= 0);
    for (int site = 1; site <= n; ++site) {
      const Eigen::MatrixXd z = sigma_z_eigenbasis(f.exact, site);
      for (int b = 0; b < n; ++b) {
        const int level = find_level(f.exact, -f.vacuum_parity, f.sp.ground_energy + f.sp.lambdas(b));
        if (level < 0) continue;
        CHECK(std::abs(std::abs(f.tables.theta(site - 1, b)) - std::abs(z(f.vacuum, level))) < 1e-8);
        ++compared;
      }
    }
  }
  CHECK(compared > 300);
}

TEST_CASE("three-fermion elements match brute force in magnitude") {
  std::mt19937_64 rng(23);
  int compared = 0;
  for (int trial = 0; trial < 6; ++trial) {
    const int n = 5 + trial % 4;
    const auto f = make_fixture(testing::random_couplings(rng, n), 0.6 + 0.1 * trial);
    REQUIRE(f.vacuum >= 0);
    for (int site = 1; site <= n; ++site) {
      const Eigen::MatrixXd z = sigma_z_eigenbasis(f.exact, site);
      for (int a = 1; a <= n; ++a)
        for (int b = a + 1; b <= n; ++b)
          for (int c = b + 1; c <= n; ++c) {
            const double e = state_energy(f.sp, {a, b, c});
            const int level = find_level(f.exact, -f.vacuum_parity, e);
            if (level < 0) continue;
            const double wick = three_fermion_element(f.sp, site, {a, b, c});
            CHECK(std::abs(std::abs(wick) - std::abs(z(level, f.vacuum))) < 1e-8);
            ++compared;
          }
    }
  }
  CHECK(compared > 200);
}

TEST_CASE("sigma^z weight from the vacuum into single fermions is at most one") {
  std::mt19937_64 rng(31);
  const auto J = testing::random_couplings(rng, 60);
  const auto t = build_tables(diagonalize(0.9, J));
  for (int i = 0; i < 60; ++i) CHECK(t.theta.row(i).squaredNorm() <= 1.0 + 1e-10);
}

TEST_CASE("transition weights") {
  // Decoupled spins: each single fermion is one flipped spin; total weight N.
  const std::vector<double> zero(6, 0.0);
  const auto t0 = build_tables(diagonalize(1.0, zero));
  CHECK(transition_weights(t0).sum() == doctest::Approx(7.0));
  CHECK(transition_weight(t0, 1) == doctest::Approx(1.0));
  CHECK_THROWS_AS(transition_weight(t0, 8), ConstraintError);

  // Against brute-force sums over sites.
  std::mt19937_64 rng(2);
  const auto f = make_fixture(testing::random_couplings(rng, 8), 0.8);
  REQUIRE(f.vacuum >= 0);
  Eigen::VectorXd brute = Eigen::VectorXd::Zero(8);
  std::vector<int> levels(8);
  for (int b = 0; b < 8; ++b)
    levels[b] = find_level(f.exact, -f.vacuum_parity, f.sp.ground_energy + f.sp.lambdas(b));
  for (int site = 1; site <= 8; ++site) {
    const Eigen::MatrixXd z = sigma_z_eigenbasis(f.exact, site);
    for (int b = 0; b < 8; ++b)
      if (levels[b] >= 0) brute(b) += z(f.vacuum, levels[b]) * z(f.vacuum, levels[b]);
  }
  for (int b = 0; b < 8; ++b)
    if (levels[b] >= 0) CHECK(transition_weight(f.tables, b + 1) == doctest::Approx(brute(b)).epsilon(1e-9));
}

TEST_CASE("reduced elements") {
  std::mt19937_64 rng(12);
  const auto J = testing::random_couplings(rng, 8);
  const auto sp = diagonalize(0.7, J);
  const auto t = build_tables(sp);
  CHECK(reduced_element({3}, {}, 2, sp, t) == doctest::Approx(t.theta(1, 2)));
  CHECK(reduced_element({1, 3}, {1}, 2, sp, t) == doctest::Approx(-t.theta(1, 2)));
  CHECK(std::abs(reduced_element({2, 4, 5, 7}, {7}, 3, sp, t)) ==
        doctest::Approx(std::abs(three_fermion_element(sp, 3, {2, 4, 5}))));
  CHECK(reduced_element({1, 2}, {}, 3, sp, t) == 0.0);
  CHECK(reduced_element({1, 2}, {3}, 3, sp, t) == 0.0);
}

namespace {

struct LeadingOrderTally {
  int compared = 0;
  int within = 0;
  double worst = 0.0;
};

// Compares |<m k| sigma^z_i |m>| from the leading-order rule with brute force for
// m, k among the three lowest modes, over every site in [first_site, last_site].
LeadingOrderTally tally_leading_order(const Fixture& f, int first_site, int last_site) {
  LeadingOrderTally out;
  for (int site = first_site; site <= last_site; ++site) {
    const Eigen::MatrixXd z = sigma_z_eigenbasis(f.exact, site);
    for (int m = 1; m <= 3; ++m)
      for (int k = 1; k <= 3; ++k) {
        if (k == m) continue;
        const int upper = find_level(f.exact, f.vacuum_parity, state_energy(f.sp, {m, k}));
        const int lower = find_level(f.exact, -f.vacuum_parity, state_energy(f.sp, {m}));
        if (upper < 0 || lower < 0) continue;
        const double exact = std::abs(z(upper, lower));
        const double approx = std::abs(reduced_element({m, k}, {m}, site, f.sp, f.tables));
        if (exact < 0.05) continue;  // relative comparison only for sizeable elements
        ++out.compared;
        const double rel = std::abs(approx - exact) / exact;
        out.worst = std::max(out.worst, rel);
        if (rel <= 0.1) ++out.within;
      }
  }
  return out;
}

Fixture asc_fixture(int sector, int spins, double s) {
  const auto sched = bundled_schedule("linear-12ghz");
  std::vector<double> J = build_couplings({spins, sector, 1.0, 0.5});
  const auto v = sched(s);
  for (double& x : J) x *= v.problem;
  return make_fixture(std::move(J), v.driver);
}

}  // namespace

TEST_CASE("leading-order single-fermion difference is exact on the first site") {
  std::mt19937_64 rng(44);
  for (int trial = 0; trial < 4; ++trial) {
    const auto f = make_fixture(testing::random_couplings(rng, 8, 0.2, 0.6), 1.2);
    REQUIRE(f.vacuum >= 0);
    const auto t = tally_leading_order(f, 1, 1);
    CHECK(t.compared > 0);
    CHECK(t.worst < 1e-8);
  }
}

TEST_CASE("leading-order single-fermion differences deep in the ordered regime") {
  const auto f = asc_fixture(2, 7, 0.95);
  REQUIRE(f.vacuum >= 0);
  const auto t = tally_leading_order(f, 1, 7);
  CAPTURE(t.worst);
  CHECK(t.compared >= 10);
  CHECK(t.within == t.compared);
}

// The dropped anticommutator terms are O(1) in the bulk of short chains, so this
// comparison over all sites at the critical point does not hold; it is registered
// as its own ctest entry so that the shortfall stays visible.
TEST_CASE("leading_order_within_10_percent_for_N_le_8" * doctest::test_suite("leading_order")) {
  const auto sched = bundled_schedule("linear-12ghz");
  for (auto [sector, spins] : {std::pair{1, 8}, std::pair{2, 7}, std::pair{3, 4}}) {
    const auto cp = find_critical_point(make_chain(sector, spins, 1.0, 0.5), sched);
    const auto f = asc_fixture(sector, spins, cp.s_star);
    REQUIRE(f.vacuum >= 0);
    const auto t = tally_leading_order(f, 1, spins);
    CAPTURE(sector);
    CAPTURE(t.compared);
    CAPTURE(t.within);
    CAPTURE(t.worst);
    CHECK(t.within == t.compared);
  }
}
