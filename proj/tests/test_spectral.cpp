#include <doctest.h>

#include <functional>
#include <map>
#include <random>

#include "ascqa/errors.hpp"
#include "ascqa/oracle.hpp"
#include "ascqa/spectral.hpp"
#include "ascqa/wick.hpp"
#include "helpers.hpp"

using namespace ascqa;

namespace {

// Meet-in-the-middle recount of non-empty subsets with sum < T.
std::uint64_t mitm_count(std::vector<double> lam, double T) {
  std::vector<double> small;
  for (double x : lam)
    if (x < T) small.push_back(x);
  const std::size_t half = small.size() / 2;
  auto sums = [&](std::size_t from, std::size_t to) {
    std::vector<double> out{0.0};
    for (std::size_t k = from; k < to; ++k) {
      const std::size_t c = out.size();
      for (std::size_t j = 0; j < c; ++j)
        if (out[j] + small[k] < T) out.push_back(out[j] + small[k]);
    }
    std::sort(out.begin(), out.end());
    return out;
  };
  const auto left = sums(0, half), right = sums(half, small.size());
  std::uint64_t total = 0;
  for (double a : left)
    total += static_cast<std::uint64_t>(std::lower_bound(right.begin(), right.end(), T - a) -
                                        right.begin());
  return total - 1;  // empty set
}

}  // namespace

TEST_CASE("uniform chain with a symmetric linear schedule is critical at s = 1/2") {
  const std::vector<double> J(79, 1.0);
  const auto cp = find_critical_point(std::span<const double>(J), AnnealSchedule::linear(2, 2));
  CHECK(cp.s_star == doctest::Approx(0.5).epsilon(0.02));
  CHECK(cp.gap == doctest::Approx(cp.spectrum.lambdas(1)));
}

TEST_CASE("critical point is the global minimum on the grid") {
  const auto spec = make_chain(3, 61, 1.0, 0.5);
  const auto sched = bundled_schedule("linear-unit");
  const auto cp = find_critical_point(spec, sched);
  const auto J = build_couplings(spec);
  for (int k = 0; k <= 200; ++k) {
    const auto sp = spectrum_at(sched, J, k / 200.0);
    CHECK(cp.gap <= sp.lambdas(1) + 1e-12);
  }
  CHECK(cp.s_star > 0.0);
  CHECK(cp.s_star < 1.0);
}

TEST_CASE("long chains are critical near A = sqrt(W1 W2) B") {
  const auto sched = bundled_schedule("linear-12ghz");
  for (int n : {1, 2, 5}) {
    const auto spec = make_chain(n, 175, 1.0, 0.5);
    const auto cp = find_critical_point(spec, sched);
    const auto v = sched(cp.s_star);
    CAPTURE(n);
    CHECK(std::abs(v.driver - std::sqrt(0.5) * v.problem) / v.driver < 0.05);
  }
}

TEST_CASE("k* counts energies strictly below T") {
  const std::vector<double> lam{0.0, 0.2, 0.4, 0.4, 1.0};
  CHECK(k_star(lam, 1e-9) == 1);
  CHECK(k_star(lam, 0.4) == 2);
  CHECK(k_star(lam, 0.41) == 4);
  const std::vector<double> positive{0.5, 0.8};
  CHECK(k_star(positive, 0.1) == 0);
  // Zero-field spectrum: T between 2 J_1 and 2 J_2 gives k* = 2.
  const std::vector<double> J{0.3, 0.5, 0.9};
  const auto sp = diagonalize(0.0, J);
  CHECK(k_star(std::span<const double>(sp.lambdas.data(), 4), 0.8) == 2);
  // Monotone in T.
  int last = 0;
  for (double T = 0.01; T < 3; T += 0.01) {
    const int k = k_star(std::span<const double>(sp.lambdas.data(), 4), T);
    CHECK(k >= last);
    last = k;
  }
}

TEST_CASE("thermal state counting") {
  const std::vector<double> lam{0.1, 0.2, 0.4};
  CHECK(count_thermal_states(lam, 0.35).count == 3);
  CHECK(count_thermal_states(lam, 0.05).count == 0);
  std::mt19937_64 rng(1);
  for (int n = 1; n <= 16; ++n) {
    std::vector<double> x(static_cast<std::size_t>(n));
    for (double& v : x) v = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    CHECK(count_thermal_states(x, 1e6).count == (std::uint64_t{1} << n) - 1);
  }
  const auto capped = count_thermal_states(std::vector<double>(30, 0.01), 1.0, 1000);
  CHECK(capped.overflow);
  CHECK(capped.count == 1000);
}

TEST_CASE("thermal count at the critical point matches a meet-in-the-middle recount") {
  const auto spec = make_chain(5, 175, 1.0, 0.5);
  const auto cp = find_critical_point(spec, bundled_schedule("linear-12ghz"));
  std::vector<double> lam(cp.spectrum.lambdas.data(),
                          cp.spectrum.lambdas.data() + cp.spectrum.lambdas.size());
  const auto count = count_thermal_states(cp, kDeviceTemperature);
  REQUIRE_FALSE(count.overflow);
  CHECK(count.count == mitm_count(lam, kDeviceTemperature));
  CHECK(count.count >= static_cast<std::uint64_t>(k_star(cp, kDeviceTemperature)));
}

TEST_CASE("heuristic success, ratio and Landau-Zener estimate") {
  CHECK(heuristic_success(0.0, 3, 1.0) == 0.0);
  CHECK(heuristic_success(1e9, 0, 1.0) == doctest::Approx(1.0));
  CHECK(heuristic_success(1e-4, 5, 0.6) == doctest::Approx(0.6e-4 / 32).epsilon(0.01));
  CHECK(gap_to_dos_ratio(0.3, 0) == 0.3);
  CHECK(gap_to_dos_ratio(0.15, 4) == doctest::Approx(0.5 * gap_to_dos_ratio(0.3, 4)));
  CHECK(lz_closed_estimate(0.0, 5, 1) == 0.0);
  CHECK(lz_closed_estimate(0.1, 1e9, 1) == doctest::Approx(1.0));
  CHECK(lz_closed_estimate(1e-3, 2.0, 3.0) == doctest::Approx(6e-6).epsilon(0.01));
}

TEST_CASE("vacuum-to-pair elements are annihilated by the Hamiltonian") {
  std::mt19937_64 rng(6);
  const auto J = testing::random_couplings(rng, 25);
  const double gamma = 0.8;
  const auto sp = diagonalize(gamma, J);
  for (int k = 0; k < 6; ++k)
    for (int l = k + 1; l < 6; ++l) {
      double h = 0.0;
      for (int i = 0; i < 25; ++i) h -= gamma * pair_element_sigma_x(sp, k, l, i);
      for (int i = 0; i < 24; ++i) h -= J[static_cast<std::size_t>(i)] * pair_element_zz(sp, k, l, i);
      CHECK(std::abs(h) < 1e-12);
    }
}

TEST_CASE("pair elements of the schedule derivative match brute force") {
  const auto sched = bundled_schedule("linear-unit");
  const auto J = build_couplings({8, 1, 1.0, 0.5});
  for (double s : {0.3, 0.45, 0.6}) {
    const auto sp = spectrum_at(sched, J, s);
    const auto ex = exact_spectrum_at(sched, J, s);
    const auto slope = sched.derivative(s);
    // Brute-force dH/ds in the eigenbasis.
    std::vector<double> scaled = J;
    for (double& x : scaled) x *= slope.problem;
    const Eigen::MatrixXd hd = hamiltonian_matrix(slope.driver, scaled);
    const Eigen::MatrixXd hd_eig = ex.vectors.transpose() * hd * ex.vectors;
    // Vacuum and |1 2> share a parity and are non-degenerate here.
    const auto t = build_tables(sp);
    const int parity = t.g_tilde(7, 7) > 0 ? 1 : -1;
    int vac = -1, pair = -1;
    for (int k = 0; k < 256; ++k) {
      if (ex.parity[k] != parity) continue;
      if (std::abs(ex.energies(k) - sp.ground_energy) < 1e-8) vac = k;
      if (std::abs(ex.energies(k) - state_energy(sp, {1, 2})) < 1e-8) pair = k;
    }
    REQUIRE(vac >= 0);
    REQUIRE(pair >= 0);
    CHECK(std::abs(pair_element_hdot(sp, J, slope, 0, 1)) ==
          doctest::Approx(std::abs(hd_eig(pair, vac))).epsilon(1e-8));
  }
}

TEST_CASE("adiabatic check") {
  const auto spec = make_chain(2, 41, 1.0, 0.5);
  // A constant-rate linear schedule still has nonzero derivatives; a schedule with
  // flat stretches gives zero ratio on the flat part only, so check the linear one.
  const auto report = adiabatic_check(spec, bundled_schedule("linear-12ghz"), 5.0);
  CHECK(report.max_ratio_ns > 0.0);
  CHECK(report.s_at_max > 0.0);
  CHECK(report.satisfied == (5000.0 > report.max_ratio_ns));
  // Zero derivative: sampled schedule that is piecewise constant between end ramps
  // evaluated where both slopes vanish.
  const AnnealSchedule flat({0.0, 0.01, 0.2, 0.4, 0.6, 0.8, 0.99, 1.0},
                            {1.0, 0.7, 0.7, 0.7, 0.7, 0.7, 0.7, 0.0},
                            {0.0, 0.7, 0.7, 0.7, 0.7, 0.7, 0.7, 1.0});
  const auto J = build_couplings(spec);
  const auto sp = spectrum_at(flat, J, 0.5);
  CHECK(pair_element_hdot(sp, J, flat.derivative(0.5), 0, 1) == 0.0);
}

TEST_CASE("spectral sweep row") {
  const auto row = spectral_row(make_chain(4, 61, 1.0, 0.5), bundled_schedule("linear-12ghz"));
  CHECK(row.num_spins == 61);
  CHECK(row.k_star >= 1);
  CHECK(row.heuristic_pg == doctest::Approx(heuristic_success(row.gap, row.k_star, 1 / 1.57)));
}
