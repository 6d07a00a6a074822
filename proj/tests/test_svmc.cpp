#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "ascqa/errors.hpp"
#include "ascqa/svmc.hpp"
#include "helpers.hpp"

using namespace ascqa;

namespace {

RotorState random_rotors(std::mt19937_64& rng, int n_spins) {
  RotorState st;
  st.noisy_couplings = testing::random_couplings(rng, n_spins);
  std::uniform_real_distribution<double> angle(0.0, std::numbers::pi);
  st.theta.resize(static_cast<std::size_t>(n_spins));
  for (double& t : st.theta) t = angle(rng);
  return st;
}

// Reference anneal built from the public single-sweep routine.
double reference_success(const ChainSpec& spec, const AnnealSchedule& sched, const SvmcParams& p) {
  const auto J = build_couplings(spec);
  int successes = 0;
  for (int run = 0; run < p.runs; ++run) {
    auto rng = Xoshiro256pp::for_run(p.seed, static_cast<std::uint64_t>(run));
    std::normal_distribution<double> noise(0.0, p.sigma);
    RotorState st = initial_rotor_state(J);
    for (double& j : st.noisy_couplings) j += noise(rng);
    for (std::int64_t k = 1; k <= p.sweeps; ++k)
      metropolis_sweep(st, static_cast<double>(k) / static_cast<double>(p.sweeps), sched, p.beta, rng);
    const auto spins = project_spins(st);
    successes += std::all_of(spins.begin(), spins.end(), [&](int x) { return x == spins[0]; });
  }
  return static_cast<double>(successes) / p.runs;
}

}  // namespace

TEST_CASE("xoshiro256++ output and per-run streams") {
  Xoshiro256pp g;
  g.state[0] = 1;
  g.state[1] = 2;
  g.state[2] = 3;
  g.state[3] = 4;
  // rotl(s0 + s3, 23) + s0
  CHECK(g() == (std::uint64_t{5} << 23) + 1);

  auto a = Xoshiro256pp::for_run(7, 3), b = Xoshiro256pp::for_run(7, 3);
  auto c = Xoshiro256pp::for_run(7, 4), d = Xoshiro256pp::for_run(8, 3);
  const auto first = a();
  CHECK(first == b());
  CHECK(first != c());
  CHECK(first != d());
  for (int i = 0; i < 1000; ++i) {
    const double u = a.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
  }
}

TEST_CASE("rotor energy at the two limiting configurations") {
  const std::vector<double> J{1.0, 0.5, 0.25, 0.5};
  RotorState st = initial_rotor_state(J);
  const ScheduleValue v{1.5, 2.0};
  CHECK(rotor_energy(st, v) == doctest::Approx(-1.5 * 5).epsilon(1e-14));
  std::fill(st.theta.begin(), st.theta.end(), 0.0);
  CHECK(rotor_energy(st, v) == doctest::Approx(-2.0 * 2.25).epsilon(1e-14));
  std::fill(st.theta.begin(), st.theta.end(), std::numbers::pi);
  CHECK(rotor_energy(st, v) == doctest::Approx(-2.0 * 2.25).epsilon(1e-14));
  const auto sched = AnnealSchedule::linear(2.0, 2.0);
  CHECK(rotor_energy(st, 0.25, sched) == doctest::Approx(rotor_energy(st, {1.5, 0.5})).epsilon(1e-14));
}

TEST_CASE("incremental energy change matches full recomputation") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> angle(0.0, std::numbers::pi);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst_de = 0.0, worst_acc = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 30);
    RotorState st = random_rotors(rng, n);
    const ScheduleValue v{3.0 * u(rng), 3.0 * u(rng)};
    const int site = static_cast<int>(rng() % static_cast<unsigned>(n));
    const double proposal = angle(rng);
    const double before = rotor_energy(st, v);
    const double de = rotor_energy_change(st, site, proposal, v);
    RotorState moved = st;
    moved.theta[site] = proposal;
    const double full = rotor_energy(moved, v) - before;
    worst_de = std::max(worst_de, std::abs(de - full));
    const double beta = 0.75;
    worst_acc = std::max(worst_acc, std::abs(metropolis_acceptance(de, beta) -
                                             std::min(1.0, std::exp(-beta * full))));
  }
  CHECK(worst_de < 1e-12);
  CHECK(worst_acc < 1e-12);
}

TEST_CASE("acceptance limits") {
  CHECK(metropolis_acceptance(-0.3, 0.75) == 1.0);
  CHECK(metropolis_acceptance(0.0, 0.75) == 1.0);
  CHECK(metropolis_acceptance(0.2, 0.75) == doctest::Approx(std::exp(-0.15)));
  CHECK(metropolis_acceptance(1e-3, 1e300) == 0.0);
  CHECK(metropolis_acceptance(1e3, 0.0) == 1.0);

  std::mt19937_64 gen(3);
  RotorState st = random_rotors(gen, 12);
  Xoshiro256pp rng(5);
  const auto stats = metropolis_sweep(st, ScheduleValue{1.0, 1.0}, 0.0, rng);
  CHECK(stats.proposals == 12);
  CHECK(stats.accepted == 12);

  // Single rotor at theta = pi/2 is the strict field minimum: every move is uphill.
  RotorState lone = initial_rotor_state(std::vector<double>{});
  int accepted = 0;
  for (int k = 0; k < 500; ++k) accepted += metropolis_sweep(lone, ScheduleValue{1.0, 0.0}, 1e300, rng).accepted;
  CHECK(accepted == 0);
}

TEST_CASE("single-rotor sweeps sample the Boltzmann distribution") {
  // p(theta) ~ exp(beta A sin theta) on [0, pi]; compare <sin theta>.
  const double beta = 0.8, A = 1.5;
  double num = 0.0, den = 0.0;
  const int grid = 20000;
  for (int i = 0; i < grid; ++i) {
    const double t = (i + 0.5) * std::numbers::pi / grid;
    const double w = std::exp(beta * A * std::sin(t));
    num += std::sin(t) * w;
    den += w;
  }
  const double exact = num / den;
  RotorState st = initial_rotor_state(std::vector<double>{});
  Xoshiro256pp rng(17);
  double sum = 0.0;
  const int samples = 400000;
  for (int k = 0; k < samples; ++k) {
    metropolis_sweep(st, ScheduleValue{A, 0.0}, beta, rng);
    sum += std::sin(st.theta[0]);
  }
  CHECK(sum / samples == doctest::Approx(exact).epsilon(5e-3));
}

TEST_CASE("projection and boundary correlation") {
  RotorState st;
  st.theta = {0.0, std::numbers::pi / 2, std::numbers::pi / 2 + 1e-9, std::numbers::pi};
  st.noisy_couplings = {1.0, 1.0, 1.0};
  CHECK(project_spins(st) == std::vector<int>{1, 1, -1, -1});

  const ChainSpec spec{16, 3, 1.0, 0.5};  // sectors H L H L H; light couplings start at 3, 9
  std::vector<int> up(16, 1), down(16, -1);
  CHECK(boundary_correlation(up, spec) == 1.0);
  CHECK(boundary_correlation(down, spec) == 1.0);
  std::vector<int> walls(16, 1);
  for (int i = 4; i < 10; ++i) walls[i] = -1;  // walls across couplings 3 and 9
  CHECK(boundary_correlation(walls, spec) == -1.0);
  std::vector<int> one_wall(16, 1);
  for (int i = 4; i < 16; ++i) one_wall[i] = -1;  // wall across coupling 3 only
  CHECK(boundary_correlation(one_wall, spec) == 0.0);

  const ChainSpec single{11, 10, 1.0, 0.5};
  CHECK(boundary_correlation(std::vector<int>(11, 1), single) == 1.0);
  CHECK_THROWS_AS(boundary_correlation(up, single), ConstraintError);
}

TEST_CASE("Wilson score interval") {
  auto [lo, hi] = wilson_interval(5, 10);
  CHECK(lo == doctest::Approx(0.2365931).epsilon(1e-6));
  CHECK(hi == doctest::Approx(0.7634069).epsilon(1e-6));
  std::tie(lo, hi) = wilson_interval(0, 10);
  CHECK(lo == 0.0);
  CHECK(hi == doctest::Approx(0.2775328).epsilon(1e-6));
  std::tie(lo, hi) = wilson_interval(10, 10);
  CHECK(hi == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(wilson_interval(0, 0), ConstraintError);
  CHECK_THROWS_AS(wilson_interval(11, 10), ConstraintError);
}

TEST_CASE("annealing is reproducible across seeds, kernels and workers") {
  const ChainSpec spec{16, 5, 1.0, 0.5};
  const auto sched = bundled_schedule("linear-12ghz");
  SvmcParams p;
  p.sweeps = 400;
  p.runs = 37;
  p.seed = 99;
  const auto a = run_svmc(spec, sched, p, 1, SvmcKernel::scalar);
  const auto b = run_svmc(spec, sched, p, 1, SvmcKernel::scalar);
  const auto c = run_svmc(spec, sched, p, 3, SvmcKernel::scalar);
  CHECK(a.successes == b.successes);
  CHECK(a.boundary_correlation == b.boundary_correlation);
  CHECK(a.successes == c.successes);
  CHECK(a.boundary_correlation == c.boundary_correlation);
  CHECK(a.kernel == SvmcKernel::scalar);
  if (avx512_available()) {
    const auto v = run_svmc(spec, sched, p, 2, SvmcKernel::avx512);
    CHECK(v.kernel == SvmcKernel::avx512);
    CHECK(v.successes == a.successes);
    CHECK(v.boundary_correlation == a.boundary_correlation);
  } else {
    CHECK_THROWS_AS(run_svmc(spec, sched, p, 1, SvmcKernel::avx512), ConstraintError);
  }
  p.seed = 100;
  const auto other = run_svmc(spec, sched, p, 1, SvmcKernel::scalar);
  CHECK((other.successes != a.successes || other.boundary_correlation != a.boundary_correlation));

  std::ostringstream os;
  write_svmc_header(os);
  write_svmc_row(os, a);
  CHECK(os.str().rfind("n,N,runs,successes,success_probability,ci_low,ci_high,boundary_correlation\n5,16,37,", 0) == 0);
}

TEST_CASE("batch kernel agrees statistically with the single-sweep routine") {
  const ChainSpec spec{4, 1, 1.0, 0.5};
  const auto sched = AnnealSchedule::linear(2.0, 2.0);
  SvmcParams p;
  p.sweeps = 200;
  p.runs = 600;
  p.beta = 0.75;
  p.sigma = 0.05;
  const double reference = reference_success(spec, sched, p);
  const auto batch = run_svmc(spec, sched, p);
  const double sd = std::sqrt(2.0 * reference * (1.0 - reference) / p.runs);
  CHECK(std::abs(batch.success_probability - reference) < 4.0 * sd + 1e-12);
  CHECK(batch.ci_low <= batch.success_probability);
  CHECK(batch.ci_high >= batch.success_probability);
}

TEST_CASE("ordered limit: a single heavy sector aligns") {
  const ChainSpec spec{11, 10, 1.0, 0.5};
  SvmcParams p;
  p.sweeps = 3000;
  p.runs = 40;
  p.beta = 50.0;
  p.sigma = 0.0;
  const auto r = run_svmc(spec, AnnealSchedule::linear(2.0, 2.0), p);
  CHECK(r.success_probability >= 0.95);
  CHECK(r.boundary_correlation == 1.0);
}

TEST_CASE("parameter checks") {
  SvmcParams p;
  CHECK_NOTHROW(p.validate());
  p.sweeps = 0;
  CHECK_THROWS_AS(p.validate(), ConstraintError);
  p = {};
  p.beta = 0.0;
  CHECK_THROWS_AS(p.validate(), ConstraintError);
  p = {};
  p.sigma = -0.1;
  CHECK_THROWS_AS(p.validate(), ConstraintError);
  p = {};
  p.runs = 0;
  CHECK_THROWS_AS(p.validate(), ConstraintError);
  RotorState bad;
  bad.theta = {0.0, 0.0};
  CHECK_THROWS_AS(rotor_energy(bad, ScheduleValue{1.0, 1.0}), ConstraintError);
  CHECK_THROWS_AS(rotor_energy_change(initial_rotor_state(std::vector<double>{1.0}), 2, 0.0, {}),
                  ConstraintError);
}
