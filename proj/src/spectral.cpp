#include "ascqa/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <boost/math/tools/minima.hpp>

#include "ascqa/errors.hpp"

namespace ascqa {

namespace {

// Second-smallest single-fermion energy at s, from singular values only.
double lambda2_at(const AnnealSchedule& schedule, std::span<const double> couplings, double s) {
  const auto [a, b] = schedule(s);
  std::vector<double> scaled(couplings.begin(), couplings.end());
  for (double& J : scaled) J *= b;
  const auto m = build_matrices(a, scaled);
  const Eigen::MatrixXd C = m.mat_a + m.mat_b;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(C);
  const Eigen::VectorXd& sv = svd.singularValues();
  if (!sv.allFinite()) throw NumericalError("singular values not finite at s = " + std::to_string(s));
  return sv(sv.size() - 2);
}

}  // namespace

CriticalPoint find_critical_point(const ChainSpec& spec, const AnnealSchedule& schedule,
                                  const CriticalPointOptions& options) {
  const auto J = build_couplings(spec);
  return find_critical_point(std::span<const double>(J), schedule, options);
}

CriticalPoint find_critical_point(std::span<const double> J, const AnnealSchedule& schedule,
                                  const CriticalPointOptions& options) {
  if (J.empty()) throw ConstraintError("critical point needs N >= 2");
  if (options.grid_points < 3) throw ConstraintError("critical-point grid needs >= 3 points");
  const int g = options.grid_points;
  std::vector<double> s(g), gap(g);
  for (int k = 0; k < g; ++k) {
    s[k] = static_cast<double>(k) / (g - 1);
    gap[k] = lambda2_at(schedule, J, s[k]);
  }
  const int best = static_cast<int>(std::min_element(gap.begin(), gap.end()) - gap.begin());

  CriticalPoint cp;
  cp.grid_points = g;
  int local_minima = 0;
  for (int k = 0; k < g; ++k) {
    const bool left = k == 0 || gap[k] < gap[k - 1];
    const bool right = k == g - 1 || gap[k] <= gap[k + 1];
    if (left && right && gap[k] <= 2.0 * gap[best]) ++local_minima;
  }
  cp.multimodal = local_minima > 1;

  const double lo = s[std::max(best - 1, 0)];
  const double hi = s[std::min(best + 1, g - 1)];
  // Brent's relative tolerance is 2^(1-bits) times |s|; ask for comfortably below the target.
  const int bits = std::clamp(static_cast<int>(std::ceil(-std::log2(options.tolerance))) + 2, 8, 50);
  const auto [s_min, gap_min] = boost::math::tools::brent_find_minima(
      [&](double x) { return lambda2_at(schedule, J, x); }, lo, hi, bits);
  if (gap_min <= gap[best]) {
    cp.s_star = s_min;
  } else {
    cp.s_star = s[best];
  }
  cp.spectrum = spectrum_at(schedule, J, cp.s_star);
  cp.gap = cp.spectrum.lambdas(1);
  return cp;
}

int k_star(std::span<const double> lambdas, double temperature) {
  if (!(temperature > 0.0)) throw ConstraintError("temperature must be > 0");
  return static_cast<int>(std::lower_bound(lambdas.begin(), lambdas.end(), temperature) -
                          lambdas.begin());
}

int k_star(const CriticalPoint& cp, double temperature) {
  return k_star(std::span<const double>(cp.spectrum.lambdas.data(), cp.spectrum.lambdas.size()),
                temperature);
}

ThermalCount count_thermal_states(std::span<const double> lambdas, double temperature,
                                  std::uint64_t cap) {
  if (!(temperature > 0.0)) throw ConstraintError("temperature must be > 0");
  std::vector<double> sorted(lambdas.begin(), lambdas.end());
  std::sort(sorted.begin(), sorted.end());
  ThermalCount result;
  // Iterative depth-first enumeration: stack of (next index, running energy).
  struct Frame {
    std::size_t next;
    double energy;
  };
  std::vector<Frame> stack{{0, 0.0}};
  while (!stack.empty()) {
    Frame& top = stack.back();
    if (top.next >= sorted.size() || top.energy + sorted[top.next] >= temperature) {
      stack.pop_back();
      continue;
    }
    const double energy = top.energy + sorted[top.next];
    const std::size_t child = top.next + 1;
    ++top.next;
    if (++result.count >= cap) {
      result.overflow = true;
      return result;
    }
    stack.push_back({child, energy});
  }
  return result;
}

ThermalCount count_thermal_states(const CriticalPoint& cp, double temperature, std::uint64_t cap) {
  return count_thermal_states(
      std::span<const double>(cp.spectrum.lambdas.data(), cp.spectrum.lambdas.size()), temperature,
      cap);
}

double heuristic_success(double gap, int k_star, double beta) {
  if (gap < 0.0 || k_star < 0) throw ConstraintError("gap and k* must be non-negative");
  return -std::expm1(-beta * gap) / std::ldexp(1.0, k_star);
}

double gap_to_dos_ratio(double gap, int k_star) {
  if (k_star < 0) throw ConstraintError("k* must be non-negative");
  return gap / std::ldexp(1.0, k_star);
}

double lz_closed_estimate(double gap, double tf, double eta_const) {
  if (gap < 0.0 || tf < 0.0 || eta_const < 0.0)
    throw ConstraintError("Landau-Zener estimate needs non-negative inputs");
  return -std::expm1(-eta_const * gap * gap * tf);
}

double pair_element_sigma_x(const FermionSpectrum& sp, int k, int l, int i) {
  return sp.phi(k, i) * sp.psi(l, i) - sp.phi(l, i) * sp.psi(k, i);
}

double pair_element_zz(const FermionSpectrum& sp, int k, int l, int i) {
  return sp.psi(k, i) * sp.phi(l, i + 1) - sp.psi(l, i) * sp.phi(k, i + 1);
}

double pair_element_hdot(const FermionSpectrum& sp, std::span<const double> couplings,
                         const ScheduleValue& slope, int k, int l) {
  double x = 0.0, zz = 0.0;
  for (int i = 0; i < sp.size(); ++i) x += pair_element_sigma_x(sp, k, l, i);
  for (int i = 0; i + 1 < sp.size(); ++i)
    zz += couplings[static_cast<std::size_t>(i)] * pair_element_zz(sp, k, l, i);
  return -slope.driver * x - slope.problem * zz;
}

AdiabaticReport adiabatic_check(const ChainSpec& spec, const AnnealSchedule& schedule, double tf_us,
                                int grid_points) {
  if (grid_points < 2) throw ConstraintError("adiabatic grid needs >= 2 points");
  if (!(tf_us > 0.0)) throw ConstraintError("anneal time must be > 0");
  const auto J = build_couplings(spec);
  AdiabaticReport report;
  report.tf_us = tf_us;
  for (int k = 0; k < grid_points; ++k) {
    const double s = static_cast<double>(k) / (grid_points - 1);
    const auto sp = spectrum_at(schedule, J, s);
    const double gap = sp.lambdas(1);
    if (!(gap > 0.0)) continue;
    const double ratio =
        std::abs(pair_element_hdot(sp, J, schedule.derivative(s), 0, 1)) / (gap * gap);
    if (ratio > report.max_ratio_ns) {
      report.max_ratio_ns = ratio;
      report.s_at_max = s;
    }
  }
  report.satisfied = tf_us * 1e3 > report.max_ratio_ns;
  return report;
}

SpectralRow spectral_row(const ChainSpec& spec, const AnnealSchedule& schedule, double temperature) {
  const auto cp = find_critical_point(spec, schedule);
  SpectralRow row;
  row.n = spec.sector_size;
  row.num_spins = spec.num_spins;
  row.s_star = cp.s_star;
  row.gap = cp.gap;
  row.k_star = k_star(cp, temperature);
  row.thermal = count_thermal_states(cp, temperature);
  row.heuristic_pg = heuristic_success(cp.gap, row.k_star, 1.0 / temperature);
  row.multimodal = cp.multimodal;
  return row;
}

}  // namespace ascqa
