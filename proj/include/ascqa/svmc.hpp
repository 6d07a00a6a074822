#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "ascqa/chain.hpp"

namespace ascqa {

/// xoshiro256++ generator. Satisfies UniformRandomBitGenerator.
class Xoshiro256pp {
 public:
  using result_type = std::uint64_t;

  /// State filled from four splitmix64 outputs starting at `seed`.
  explicit Xoshiro256pp(std::uint64_t seed = 0);

  /// Stream for one run: seeded with splitmix64 applied to seed + (run + 1) * golden,
  /// golden = 0x9E3779B97F4A7C15. Independent of how runs are batched or scheduled.
  static Xoshiro256pp for_run(std::uint64_t seed, std::uint64_t run);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();

  std::uint64_t state[4];
};

/// Spin-vector Monte Carlo parameters.
struct SvmcParams {
  std::int64_t sweeps = 120'000;  ///< N_s: anneal steps, one sweep each
  double beta = 0.75;             ///< inverse temperature [1/GHz]
  double sigma = 0.05;            ///< coupler noise standard deviation
  int runs = 500;
  std::uint64_t seed = 1;

  /// Throws ConstraintError unless sweeps, beta, runs are positive and sigma >= 0.
  void validate() const;
};

/// O(2) rotor angles in [0, pi] and the couplings of one noisy realization.
struct RotorState {
  std::vector<double> theta;
  std::vector<double> noisy_couplings;
};

/// All angles pi/2 (the s = 0 minimum) with noise-free couplings.
RotorState initial_rotor_state(std::span<const double> couplings);

/// E = -A(s) sum sin(theta_i) - B(s) sum J_i cos(theta_i) cos(theta_{i+1})  [GHz].
double rotor_energy(const RotorState& state, double s, const AnnealSchedule& schedule);
double rotor_energy(const RotorState& state, ScheduleValue v);

/// Energy change for moving rotor `site` (0-based) to `new_theta`, from the field term
/// and the two adjacent couplings.
double rotor_energy_change(const RotorState& state, int site, double new_theta, ScheduleValue v);

/// Metropolis acceptance min(1, exp(-beta dE)).
double metropolis_acceptance(double delta_e, double beta);

struct SweepStats {
  int proposals = 0;
  int accepted = 0;
};

/// One sweep at fixed s: the sites in a uniformly random order, each proposing an
/// angle uniform on [0, pi] accepted with metropolis_acceptance.
SweepStats metropolis_sweep(RotorState& state, ScheduleValue v, double beta, Xoshiro256pp& rng);
SweepStats metropolis_sweep(RotorState& state, double s, const AnnealSchedule& schedule,
                            double beta, Xoshiro256pp& rng);

/// +1 where cos(theta) >= 0, else -1.
std::vector<int> project_spins(const RotorState& state);

/// Mean over light sectors of s_l s_r, the two spins joined by the first coupling of
/// the sector. 1 when the chain has no light sector.
double boundary_correlation(std::span<const int> spins, const ChainSpec& spec);

/// Wilson score interval for a binomial proportion.
std::pair<double, double> wilson_interval(int successes, int trials,
                                          double z = 1.959963984540054);

enum class SvmcKernel { automatic, scalar, avx512 };

/// True when the AVX-512 batch kernel can run on this machine.
bool avx512_available();

struct SvmcResult {
  ChainSpec chain;
  SvmcParams params;
  int successes = 0;
  double success_probability = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double boundary_correlation = 0.0;  ///< mean over runs
  SvmcKernel kernel = SvmcKernel::scalar;
};

/// Anneals `params.runs` independent noisy realizations: couplings J_i + N(0, sigma^2)
/// drawn once per run, angles start at pi/2, then one sweep at each s_k = k / N_s,
/// k = 1..N_s; the final angles are projected and the run succeeds when all spins
/// agree. Run r uses Xoshiro256pp::for_run(seed, r), so results do not depend on the
/// kernel or on `workers`. Throws ConstraintError when the AVX-512 kernel is requested
/// but unavailable.
SvmcResult run_svmc(const ChainSpec& spec, const AnnealSchedule& schedule,
                    const SvmcParams& params, int workers = 1,
                    SvmcKernel kernel = SvmcKernel::automatic);

/// Header and row for the delimited result table:
/// n,N,runs,successes,success_probability,ci_low,ci_high,boundary_correlation.
void write_svmc_header(std::ostream& os);
void write_svmc_row(std::ostream& os, const SvmcResult& result);

}  // namespace ascqa
