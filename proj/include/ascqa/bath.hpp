#pragma once

#include <cstddef>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

namespace ascqa {

/// Ohmic bosonic bath. Energies in angular GHz, beta in 1/GHz.
struct BathSpec {
  double eta_g2 = 1.2e-4;                  ///< dimensionless system-bath coupling
  double omega_c = 8.0 * std::numbers::pi;  ///< UV cutoff [GHz]
  double beta = 1.0 / 1.57;                 ///< inverse temperature [1/GHz], 12 mK

  /// Throws ConstraintError unless omega_c and beta are positive and eta_g2 >= 0
  /// (zero coupling is allowed and switches the dynamics off).
  void validate() const;
};

/// gamma(omega) = 2 pi eta g^2 omega exp(-|omega|/omega_c) / (1 - exp(-beta omega)),
/// with the omega -> 0 limit 2 pi eta g^2 / beta. Positive omega is emission into the
/// bath; gamma(-omega) = exp(-beta omega) gamma(omega).
double ohmic_rate(double omega, const BathSpec& bath);

/// Adaptive Dormand-Prince integration of a population vector with a
/// non-negativity projection after every accepted step.
struct IntegratorOptions {
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double initial_step = 1e-5;
  double min_step = 1e-15;
  std::size_t max_steps = 50'000'000;
};

struct IntegrationStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  double clamped_mass = 0.0;  ///< total negative mass removed by the projection
};

/// dp/dx = f(p, x), written into the third argument.
using PopulationRhs =
    std::function<void(const std::vector<double>& p, std::vector<double>& dpdx, double x)>;
/// Called at x0 and at every point of `outputs` with the state there.
using PopulationObserver = std::function<void(double x, const std::vector<double>& p)>;

/// Integrates from x0 to the last entry of `outputs` (ascending, > x0), landing
/// exactly on every output point. After each accepted step negative entries are set
/// to zero and the removed mass is taken proportionally from the positive entries,
/// so the total is unchanged. Throws NumericalError naming x when the step size
/// underflows or the step budget runs out.
IntegrationStats integrate_populations(const PopulationRhs& rhs, std::vector<double>& p, double x0,
                                       std::span<const double> outputs,
                                       const PopulationObserver& observer,
                                       const IntegratorOptions& options = {});

}  // namespace ascqa
