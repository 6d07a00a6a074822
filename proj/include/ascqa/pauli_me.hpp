#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ascqa/bath.hpp"
#include "ascqa/chain.hpp"

namespace ascqa {

enum class TruncationLevel { one_fermion, two_fermion };

std::string to_string(TruncationLevel level);
/// Accepts "one-fermion" / "two-fermion" (also "1" / "2"); throws ConfigError otherwise.
TruncationLevel parse_truncation_level(const std::string& text);

/// Retained states: the vacuum, single-fermion modes 1..k_star and, at the two-fermion
/// level, the k_star (k_star - 1) / 2 pairs built from them.
struct TruncationScheme {
  TruncationLevel level = TruncationLevel::two_fermion;
  int k_star = 1;

  /// Throws ConstraintError unless k_star >= 1.
  void validate() const;
  int state_count() const;
};

/// Position of the pair (i, j), 0-based modes i < j < k, among the pair entries
/// (row-major over i < j). The flat state vector is [p0, p_1..p_k, pairs...].
int pair_offset(int i, int j, int k);

/// Populations of the truncated model at one instant.
struct TruncatedPopulations {
  double t_us = 0.0;
  double s = 0.0;
  double p0 = 0.0;
  std::vector<double> singles;  ///< modes 1..k_star
  std::vector<double> pairs;    ///< pair_offset order; empty at the one-fermion level

  double sum_singles() const;
  double sum_pairs() const;
  double total() const { return p0 + sum_singles() + sum_pairs(); }
  /// Mode 1 is the zero mode of the ordered phase; its population merges with the
  /// ground state at s = 1.
  double success_probability() const;
};

/// Vacuum + singles: dp0/dt = sum_b gamma(lambda_b) M_b p_b - p0 sum_b gamma(-lambda_b) M_b,
/// dp_b/dt = gamma(-lambda_b) M_b p0 - gamma(lambda_b) M_b p_b. Rates in GHz (1/ns).
void rhs_one_fermion(std::span<const double> p, std::span<const double> lambdas,
                     std::span<const double> weights, const BathSpec& bath, std::span<double> dpdt);

/// Vacuum + singles + pairs. A single i is excited to the pair (i, j) at
/// gamma(-lambda_j) M_j and a pair (i, j) relaxes to the single j at gamma(lambda_i) M_i.
void rhs_two_fermion(std::span<const double> p, std::span<const double> lambdas,
                     std::span<const double> weights, const BathSpec& bath, std::span<double> dpdt);

/// Dispatches on the scheme; p and dpdt have scheme.state_count() entries.
void truncated_rhs(const TruncationScheme& scheme, std::span<const double> p,
                   std::span<const double> lambdas, std::span<const double> weights,
                   const BathSpec& bath, std::span<double> dpdt);

/// Single-fermion energies and vacuum-to-mode weights M_b of the lowest `modes` modes,
/// tabulated on an s grid (uniform, optionally refined near one point) and interpolated
/// linearly. Read-only once built.
class SpectrumCache {
 public:
  /// Builds on `points` uniform points over [0, 1] using up to `workers` threads.
  SpectrumCache(std::vector<double> couplings, AnnealSchedule schedule, int modes, int points,
                int workers = 1);

  /// Builds on `points` uniform grid points, then halves the cells inside
  /// [s_focus - half_width, s_focus + half_width] (up to max_points in total) until the
  /// interpolation error at their midpoints is below `tolerance`. The error of an
  /// energy is |delta lambda| / max(lambda, T) and of a weight |delta M| / max(M, mean M),
  /// with T the device temperature. Throws NumericalError when max_points is not enough.
  static SpectrumCache refined(std::vector<double> couplings, AnnealSchedule schedule, int modes,
                               double s_focus, int points = 501, double tolerance = 1e-3,
                               int max_points = 16001, double half_width = 0.05, int workers = 1);

  int modes() const { return modes_; }
  int points() const { return static_cast<int>(grid_.size()); }
  const std::vector<double>& couplings() const { return couplings_; }
  const AnnealSchedule& schedule() const { return schedule_; }

  /// Linear interpolation at s (clamped to [0, 1]) on the possibly non-uniform grid;
  /// both spans have modes() entries.
  void interpolate(double s, std::span<double> lambdas, std::span<double> weights) const;

  /// Largest midpoint interpolation error (metric as in refined()) over cells
  /// intersecting [s_lo, s_hi].
  double interpolation_error(double s_lo, double s_hi, int workers = 1) const;

 private:
  std::vector<double> couplings_;
  AnnealSchedule schedule_;
  int modes_;
  std::vector<double> grid_;
  Eigen::MatrixXd lambdas_;  ///< point x mode
  Eigen::MatrixXd weights_;  ///< point x mode
};

/// Energies and weights of the lowest `modes` modes at one s (clamped to [0, 1]).
void exact_modes_at(std::span<const double> couplings, const AnnealSchedule& schedule, double s,
                    int modes, std::span<double> lambdas, std::span<double> weights);

struct MasterEquationOptions {
  TruncationLevel level = TruncationLevel::two_fermion;
  int k_star = 0;           ///< 0: take k* from the critical point
  int cache_points = 501;
  double cache_tolerance = 1e-3;
  int cache_max_points = 16001;
  int output_points = 201;  ///< trajectory samples, uniform in s
  int workers = 1;          ///< threads for the cache build
  IntegratorOptions integrator;
};

struct MasterEquationResult {
  ChainSpec chain;
  TruncationScheme truncation;
  BathSpec bath;
  double tf_us = 0.0;
  double s_star = 0.0;
  int cache_points = 0;
  std::vector<TruncatedPopulations> trajectory;
  IntegrationStats stats;

  /// p0 + p1 at the end of the anneal.
  double success_probability() const;
};

/// Integrates the truncated model over s in [0, 1] (t = s tf) from the vacuum, with
/// rates from `cache` (which must hold at least scheme.k_star modes).
MasterEquationResult integrate(const SpectrumCache& cache, const BathSpec& bath, double tf_us,
                               const TruncationScheme& scheme, int output_points = 201,
                               const IntegratorOptions& integrator = {});

/// Everything the integration needs that does not depend on the bath or tf: the
/// critical point, k* and a spectrum cache refined around s*. Shareable across
/// truncation levels, couplings to the bath and annealing times.
struct MasterEquationModel {
  ChainSpec chain;
  double s_star = 0.0;
  double gap = 0.0;
  int k_star = 0;  ///< modes held by the cache
  SpectrumCache cache;
};

/// k* comes from options.k_star when positive, otherwise from the single-fermion
/// energies at s* below `temperature` (at least 1).
MasterEquationModel prepare_model(const ChainSpec& spec, const AnnealSchedule& schedule,
                                  double temperature, const MasterEquationOptions& options = {});

/// Integration with a prepared model at the given truncation level.
MasterEquationResult integrate(const MasterEquationModel& model, const BathSpec& bath,
                               double tf_us, TruncationLevel level, int output_points = 201,
                               const IntegratorOptions& integrator = {});

/// Full pipeline: critical point, k* at the bath temperature, refined cache, integration.
MasterEquationResult integrate(const ChainSpec& spec, const AnnealSchedule& schedule,
                               const BathSpec& bath, double tf_us,
                               const MasterEquationOptions& options = {});

double success_probability(const std::vector<TruncatedPopulations>& trajectory);

/// Rows t_us,s,p0,p1,sum_singles,sum_pairs,total with a header line.
void write_trajectory_csv(std::ostream& os, const MasterEquationResult& result);
/// JSON description of the run (chain, bath, truncation, tolerances, outcome).
void write_run_metadata(std::ostream& os, const MasterEquationResult& result,
                        const IntegratorOptions& integrator = {});

}  // namespace ascqa
