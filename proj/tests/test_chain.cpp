#include <doctest.h>

#include <sstream>

#include "ascqa/chain.hpp"
#include "ascqa/errors.hpp"

using namespace ascqa;

TEST_CASE("couplings for a ten-spin chain with sectors of three") {
  const auto J = build_couplings({10, 3, 1.0, 0.5});
  const std::vector<double> expected{1, 1, 1, 0.5, 0.5, 0.5, 1, 1, 1};
  CHECK(J == expected);
}

TEST_CASE("two spins give a single heavy coupling") {
  CHECK(build_couplings({2, 1, 1.0, 0.5}) == std::vector<double>{1.0});
}

TEST_CASE("176 spins with sectors of five") {
  const ChainSpec spec{176, 5, 1.0, 0.5};
  const auto J = build_couplings(spec);
  REQUIRE(J.size() == 175);
  int heavy_runs = 0, light_runs = 0;
  for (std::size_t i = 0; i < J.size(); i += 5) {
    for (std::size_t k = i; k < i + 5; ++k) REQUIRE(J[k] == J[i]);
    (J[i] == 1.0 ? heavy_runs : light_runs)++;
  }
  CHECK(heavy_runs == 18);
  CHECK(light_runs == 17);
}

TEST_CASE("couplings alternate in runs of n starting heavy") {
  for (int n = 1; n <= 7; ++n)
    for (int b = 0; b < 4; ++b) {
      const ChainSpec spec{1 + n * (2 * b + 1), n, 0.9, 0.3};
      const auto J = build_couplings(spec);
      REQUIRE(static_cast<int>(J.size()) == spec.num_spins - 1);
      for (int i = 0; i < spec.num_couplings(); ++i)
        CHECK(J[static_cast<std::size_t>(i)] == ((i / n) % 2 == 0 ? 0.9 : 0.3));
    }
}

TEST_CASE("invalid chains are rejected with the violated relation") {
  auto message = [](const ChainSpec& s) {
    try {
      validate(s);
    } catch (const ConstraintError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message({11, 3, 1.0, 0.5}).find("mod n") != std::string::npos);
  CHECK(message({7, 3, 1.0, 0.5}).find("odd") != std::string::npos);
  CHECK(message({10, 3, 0.5, 0.5}).find("W1 > W2") != std::string::npos);
  CHECK(message({10, 3, 1.0, 0.0}).find("W2 > 0") != std::string::npos);
  CHECK(message({10, 0, 1.0, 0.5}).find("n >= 1") != std::string::npos);
  CHECK_THROWS_AS(build_couplings({11, 3, 1.0, 0.5}), ConstraintError);
}

TEST_CASE("nearest valid lengths reproduce the sector-size table for target 175") {
  const std::vector<std::pair<int, int>> table{
      {1, 174},  {2, 175},  {3, 172},  {4, 173},  {5, 176},  {6, 175},  {7, 176},  {8, 169},
      {9, 172},  {10, 171}, {12, 181}, {13, 170}, {14, 183}, {16, 177}, {19, 172}, {20, 181}};
  for (const auto& [n, N] : table) {
    CAPTURE(n);
    CHECK(nearest_valid_length(n, 175) == N);
    CHECK(is_valid_length(N, n));
  }
}

TEST_CASE("nearest valid length breaks ties toward the shorter chain") {
  // n = 2: valid lengths 3, 7, 11, ...; target 5 is equidistant from 3 and 7.
  CHECK(nearest_valid_length(2, 5) == 3);
  CHECK(nearest_valid_length(1, 2) == 2);
  CHECK(nearest_valid_length(3, 4) == 4);
  // Brute-force check against a scan of all lengths.
  for (int n = 1; n <= 12; ++n)
    for (int target = n + 1; target <= 120; ++target) {
      int best = -1;
      for (int N = 2; N <= 400; ++N)
        if (is_valid_length(N, n) && (best < 0 || std::abs(N - target) < std::abs(best - target)))
          best = N;
      CAPTURE(n);
      CAPTURE(target);
      CHECK(nearest_valid_length(n, target) == best);
    }
}

TEST_CASE("linear schedule boundary and midpoint values") {
  const auto sched = AnnealSchedule::linear(2.0, 2.0);
  CHECK(sched(0.0).driver == 2.0);
  CHECK(sched(0.0).problem == 0.0);
  CHECK(sched(1.0).driver == 0.0);
  CHECK(sched(1.0).problem == 2.0);
  CHECK(sched(0.5).driver == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sched(0.5).problem == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sched(0.123456).driver == doctest::Approx(2.0 * (1 - 0.123456)).epsilon(1e-12));
  CHECK_THROWS_AS(sched(-0.01), DomainError);
  CHECK_THROWS_AS(sched(1.01), DomainError);
}

TEST_CASE("interpolation is exact at samples and monotone on a refined grid") {
  // A deliberately kinked schedule where a plain cubic spline would overshoot.
  const std::vector<double> s{0.0, 0.1, 0.2, 0.5, 0.55, 1.0};
  const std::vector<double> a{10.0, 9.9, 9.0, 1.0, 0.2, 0.0};
  const std::vector<double> b{0.0, 0.01, 0.02, 3.0, 8.0, 9.0};
  const AnnealSchedule sched(s, a, b);
  for (std::size_t k = 0; k < s.size(); ++k) {
    CHECK(sched(s[k]).driver == a[k]);
    CHECK(sched(s[k]).problem == b[k]);
  }
  double last_a = 1e9, last_b = -1e9;
  for (int k = 0; k <= 10000; ++k) {
    const auto v = sched(k / 10000.0);
    CHECK(v.driver <= last_a + 1e-12);
    CHECK(v.problem >= last_b - 1e-12);
    last_a = v.driver;
    last_b = v.problem;
  }
}

TEST_CASE("schedule validation") {
  CHECK_THROWS_AS(AnnealSchedule({0, 0.5, 1}, {1, 0.5, 0}, {0, 0.5, 1}), ConstraintError);
  CHECK_THROWS_AS(AnnealSchedule({0, 0.3, 0.6, 1}, {1, 0.6, 0.7, 0}, {0, 0.3, 0.6, 1}),
                  ConstraintError);
  CHECK_THROWS_AS(AnnealSchedule({0, 0.3, 0.6, 1}, {1, 0.6, 0.3, 0}, {0, 0.6, 0.3, 1}),
                  ConstraintError);
  CHECK_THROWS_AS(AnnealSchedule({0, 0.3, 0.6, 1}, {1, 0.6, 0.3, 0.1}, {0, 0.3, 0.6, 1}),
                  ConstraintError);
  CHECK_THROWS_AS(AnnealSchedule({0, 0.3, 0.6, 1}, {1, 0.6, 0.3, 0}, {0.1, 0.3, 0.6, 1}),
                  ConstraintError);
  CHECK_THROWS_AS(AnnealSchedule({0.1, 0.3, 0.6, 1}, {1, 0.6, 0.3, 0}, {0, 0.3, 0.6, 1}),
                  ConstraintError);
  CHECK_THROWS_AS(AnnealSchedule({0, 0.6, 0.3, 1}, {1, 0.6, 0.3, 0}, {0, 0.3, 0.6, 1}),
                  ConstraintError);
}

TEST_CASE("schedule files round-trip and report bad rows") {
  const auto sched = AnnealSchedule::linear(12.0, 12.0, 11);
  std::stringstream buffer;
  sched.write(buffer);
  const auto back = AnnealSchedule::parse(buffer);
  REQUIRE(back.s_samples().size() == 11);
  for (int k = 0; k <= 20; ++k) {
    const double s = k / 20.0;
    CHECK(back(s).driver == doctest::Approx(sched(s).driver).epsilon(1e-14));
    CHECK(back(s).problem == doctest::Approx(sched(s).problem).epsilon(1e-14));
  }
  std::stringstream bad("s,A_GHz,B_GHz\n0,1,0\n0.5,x,1\n");
  try {
    AnnealSchedule::parse(bad, "bad.csv");
    FAIL("expected a parse error");
  } catch (const ConstraintError& e) {
    CHECK(std::string(e.what()).find("bad.csv:3") != std::string::npos);
  }
}

TEST_CASE("schedule derivative of a linear schedule") {
  const auto sched = AnnealSchedule::linear(2.0, 3.0);
  for (double s : {0.0, 0.2, 0.537, 1.0}) {
    CHECK(sched.derivative(s).driver == doctest::Approx(-2.0).epsilon(1e-10));
    CHECK(sched.derivative(s).problem == doctest::Approx(3.0).epsilon(1e-10));
  }
}

TEST_CASE("bundled schedules") {
  CHECK(bundled_schedule("linear-unit")(0.25).driver == doctest::Approx(1.5));
  CHECK(bundled_schedule("linear-12ghz")(0.25).problem == doctest::Approx(3.0));
  CHECK_THROWS_AS(bundled_schedule("/nonexistent/schedule.csv"), ConstraintError);
  const auto file = bundled_schedule((data_directory() / "schedules" / "linear_unit.csv").string());
  CHECK(file(0.5).driver == doctest::Approx(1.0).epsilon(1e-12));
}
