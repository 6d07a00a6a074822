#include "ascqa/bath.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/numeric/odeint.hpp>

#include "ascqa/errors.hpp"

namespace ascqa {

void BathSpec::validate() const {
  if (!(eta_g2 >= 0.0) || !std::isfinite(eta_g2)) throw ConstraintError("bath eta_g2 must be >= 0");
  if (!(omega_c > 0.0) || !std::isfinite(omega_c)) throw ConstraintError("bath omega_c must be > 0");
  if (!(beta > 0.0) || !std::isfinite(beta)) throw ConstraintError("bath beta must be > 0");
}

double ohmic_rate(double omega, const BathSpec& bath) {
  const double prefactor = 2.0 * std::numbers::pi * bath.eta_g2;
  if (std::abs(omega) < 1e-12) return prefactor / bath.beta;
  // omega / (1 - e^{-beta omega}) written with expm1 for accuracy at small |omega|.
  return prefactor * omega * std::exp(-std::abs(omega) / bath.omega_c) /
         (-std::expm1(-bath.beta * omega));
}

namespace {

// Zero the negative entries and take the removed mass from the positive ones in
// proportion to their size. Returns the removed (absolute) mass.
double project_nonnegative(std::vector<double>& p) {
  double negative = 0.0, positive = 0.0;
  for (double v : p) (v < 0.0 ? negative : positive) += v;
  if (negative == 0.0) return 0.0;
  const double factor = positive > 0.0 ? (positive + negative) / positive : 0.0;
  for (double& v : p) v = v < 0.0 ? 0.0 : v * std::max(factor, 0.0);
  return -negative;
}

}  // namespace

IntegrationStats integrate_populations(const PopulationRhs& rhs, std::vector<double>& p, double x0,
                                       std::span<const double> outputs,
                                       const PopulationObserver& observer,
                                       const IntegratorOptions& options) {
  namespace ode = boost::numeric::odeint;
  using State = std::vector<double>;
  auto stepper = ode::make_controlled(options.abs_tol, options.rel_tol,
                                      ode::runge_kutta_dopri5<State>());
  auto system = [&rhs](const State& y, State& dydx, double x) { rhs(y, dydx, x); };

  IntegrationStats stats;
  double x = x0;
  double dt = options.initial_step;
  if (observer) observer(x, p);
  for (const double target : outputs) {
    if (!(target > x)) {
      if (target == x) {
        if (observer) observer(x, p);
        continue;
      }
      throw ConstraintError("integration output points must be ascending");
    }
    while (x < target) {
      const bool lands = dt >= target - x;
      double h = lands ? target - x : dt;
      const auto result = stepper.try_step(system, p, x, h);
      if (result == ode::success) {
        ++stats.accepted;
        if (lands) x = target;
        const double removed = project_nonnegative(p);
        if (removed > 0.0) {
          stats.clamped_mass += removed;
          stepper.reset();
        }
        // Do not let a shortened landing step shrink the next proposal.
        dt = lands ? std::max(h, dt) : h;
      } else {
        ++stats.rejected;
        dt = h;
        if (dt < options.min_step)
          throw NumericalError("step size underflow at x = " + std::to_string(x));
      }
      if (stats.accepted + stats.rejected > options.max_steps)
        throw NumericalError("step budget exhausted at x = " + std::to_string(x));
    }
    if (observer) observer(x, p);
  }
  return stats;
}

}  // namespace ascqa
