#pragma once

#include <cstdint>
#include <span>

#include <Eigen/Dense>

#include "ascqa/chain.hpp"
#include "ascqa/fermion.hpp"

namespace ascqa {

struct CriticalPointOptions {
  int grid_points = 201;     ///< uniform coarse grid over [0, 1]
  double tolerance = 1e-6;   ///< final bracket width in s
};

/// Location of the minimum of the relevant gap lambda_2(s).
struct CriticalPoint {
  double s_star = 0.0;
  double gap = 0.0;  ///< lambda_2(s_star) [GHz]
  FermionSpectrum spectrum;
  /// More than one local grid minimum within a factor 2 of the global one.
  bool multimodal = false;
  int grid_points = 0;
};

/// Coarse grid search followed by a bracketed 1D minimization (Brent's method,
/// i.e. golden section with parabolic steps) on the neighbouring grid cells.
/// Requires N >= 2.
CriticalPoint find_critical_point(const ChainSpec& spec, const AnnealSchedule& schedule,
                                  const CriticalPointOptions& options = {});
/// Same search for an arbitrary coupling list (N-1 entries).
CriticalPoint find_critical_point(std::span<const double> couplings, const AnnealSchedule& schedule,
                                  const CriticalPointOptions& options = {});

/// Number of single-fermion energies strictly below T (largest k with lambda_k < T).
int k_star(std::span<const double> lambdas, double temperature);
int k_star(const CriticalPoint& cp, double temperature);

struct ThermalCount {
  std::uint64_t count = 0;  ///< exact when !overflow, otherwise a lower bound (== cap)
  bool overflow = false;
};

/// Number of non-empty mode subsets whose energies sum to less than T.
/// Depth-first over ascending energies with pruning; stops at `cap`.
ThermalCount count_thermal_states(std::span<const double> lambdas, double temperature,
                                  std::uint64_t cap = 1'000'000'000ULL);
ThermalCount count_thermal_states(const CriticalPoint& cp, double temperature,
                                  std::uint64_t cap = 1'000'000'000ULL);

/// (1 - exp(-beta gap)) / 2^k*: a relative trend indicator, not a calibrated probability.
double heuristic_success(double gap, int k_star, double beta);

/// gap / 2^k*.
double gap_to_dos_ratio(double gap, int k_star);

/// 1 - exp(-eta gap^2 tf), for comparison only. Units of eta must match gap^2 tf.
double lz_closed_estimate(double gap, double tf, double eta_const);

/// <k l| sigma^x_i |0> for 0-based modes k, l and site i.
double pair_element_sigma_x(const FermionSpectrum& spectrum, int k, int l, int site);
/// <k l| sigma^z_i sigma^z_{i+1} |0> for 0-based modes k, l and site i (coupling i).
double pair_element_zz(const FermionSpectrum& spectrum, int k, int l, int site);

/// <k l| dH/ds |0> with dH/ds = -A'(s) sum sigma^x - B'(s) sum J_i sigma^z sigma^z,
/// 0-based modes.
double pair_element_hdot(const FermionSpectrum& spectrum, std::span<const double> couplings,
                         const ScheduleValue& slope, int k, int l);

struct AdiabaticReport {
  /// max over the grid of |<1 2|dH/ds|0>| / lambda_2^2 [1/GHz = ns]
  double max_ratio_ns = 0.0;
  double s_at_max = 0.0;
  double tf_us = 0.0;
  /// tf exceeds the maximal ratio
  bool satisfied = false;
};

/// Adiabatic-condition ratio on a uniform grid of `grid_points` over [0, 1].
AdiabaticReport adiabatic_check(const ChainSpec& spec, const AnnealSchedule& schedule,
                                double tf_us, int grid_points = 201);

/// One row of a spectral sector-size sweep.
struct SpectralRow {
  int n = 0;
  int num_spins = 0;
  double s_star = 0.0;
  double gap = 0.0;
  int k_star = 0;
  ThermalCount thermal;
  double heuristic_pg = 0.0;
  bool multimodal = false;
};

SpectralRow spectral_row(const ChainSpec& spec, const AnnealSchedule& schedule,
                         double temperature = kDeviceTemperature);

}  // namespace ascqa
