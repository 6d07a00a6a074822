#include "ascqa/pauli_me.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "ascqa/errors.hpp"
#include "ascqa/fermion.hpp"
#include "ascqa/spectral.hpp"
#include "ascqa/wick.hpp"
#include "detail/parallel.hpp"

namespace ascqa {

using detail::parallel_for;

std::string to_string(TruncationLevel level) {
  return level == TruncationLevel::one_fermion ? "one-fermion" : "two-fermion";
}

TruncationLevel parse_truncation_level(const std::string& text) {
  if (text == "one-fermion" || text == "1") return TruncationLevel::one_fermion;
  if (text == "two-fermion" || text == "2") return TruncationLevel::two_fermion;
  throw ConfigError("unknown truncation level '" + text + "' (one-fermion | two-fermion)");
}

void TruncationScheme::validate() const {
  if (k_star < 1) throw ConstraintError("truncation needs k* >= 1");
}

int TruncationScheme::state_count() const {
  const int pairs = level == TruncationLevel::two_fermion ? k_star * (k_star - 1) / 2 : 0;
  return 1 + k_star + pairs;
}

int pair_offset(int i, int j, int k) { return i * (2 * k - i - 1) / 2 + (j - i - 1); }

double TruncatedPopulations::sum_singles() const {
  return std::accumulate(singles.begin(), singles.end(), 0.0);
}

double TruncatedPopulations::sum_pairs() const {
  return std::accumulate(pairs.begin(), pairs.end(), 0.0);
}

double TruncatedPopulations::success_probability() const {
  return p0 + (singles.empty() ? 0.0 : singles.front());
}

namespace {

void check_sizes(std::size_t k, std::size_t lambdas, std::size_t weights) {
  if (lambdas < k || weights < k) throw ConstraintError("fewer energies/weights than retained modes");
}

}  // namespace

void rhs_one_fermion(std::span<const double> p, std::span<const double> lambdas,
                     std::span<const double> weights, const BathSpec& bath,
                     std::span<double> dpdt) {
  if (p.size() < 2 || dpdt.size() != p.size()) throw ConstraintError("population size mismatch");
  const std::size_t k = p.size() - 1;
  check_sizes(k, lambdas.size(), weights.size());
  double d0 = 0.0;
  for (std::size_t b = 0; b < k; ++b) {
    const double up = ohmic_rate(-lambdas[b], bath) * weights[b];
    const double down = ohmic_rate(lambdas[b], bath) * weights[b];
    const double flow = up * p[0] - down * p[1 + b];
    dpdt[1 + b] = flow;
    d0 -= flow;
  }
  dpdt[0] = d0;
}

void rhs_two_fermion(std::span<const double> p, std::span<const double> lambdas,
                     std::span<const double> weights, const BathSpec& bath,
                     std::span<double> dpdt) {
  if (dpdt.size() != p.size()) throw ConstraintError("population size mismatch");
  // Solve 1 + k + k(k-1)/2 = size for k.
  const auto size = static_cast<int>(p.size());
  int k = 1;
  while (1 + k + k * (k - 1) / 2 < size) ++k;
  if (1 + k + k * (k - 1) / 2 != size) throw ConstraintError("population size is not 1 + k + k(k-1)/2");
  check_sizes(static_cast<std::size_t>(k), lambdas.size(), weights.size());

  std::vector<double> up(static_cast<std::size_t>(k)), down(static_cast<std::size_t>(k));
  for (int b = 0; b < k; ++b) {
    up[b] = ohmic_rate(-lambdas[b], bath) * weights[b];
    down[b] = ohmic_rate(lambdas[b], bath) * weights[b];
  }
  std::fill(dpdt.begin(), dpdt.end(), 0.0);
  const double* single = p.data() + 1;
  const double* pair = p.data() + 1 + k;
  double* dsingle = dpdt.data() + 1;
  double* dpair = dpdt.data() + 1 + k;
  for (int b = 0; b < k; ++b) {
    const double flow = up[b] * p[0] - down[b] * single[b];
    dsingle[b] += flow;
    dpdt[0] -= flow;
  }
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j) {
      const int q = pair_offset(i, j, k);
      // |i> -> |ij> by exciting j, |j> -> |ij> by exciting i, and the reverse relaxations.
      const double from_i = up[j] * single[i] - down[j] * pair[q];
      const double from_j = up[i] * single[j] - down[i] * pair[q];
      dsingle[i] -= from_i;
      dsingle[j] -= from_j;
      dpair[q] += from_i + from_j;
    }
}

void truncated_rhs(const TruncationScheme& scheme, std::span<const double> p,
                   std::span<const double> lambdas, std::span<const double> weights,
                   const BathSpec& bath, std::span<double> dpdt) {
  if (static_cast<int>(p.size()) != scheme.state_count())
    throw ConstraintError("population size does not match the truncation");
  if (scheme.level == TruncationLevel::one_fermion)
    rhs_one_fermion(p, lambdas, weights, bath, dpdt);
  else
    rhs_two_fermion(p, lambdas, weights, bath, dpdt);
}

void exact_modes_at(std::span<const double> couplings, const AnnealSchedule& schedule, double s,
                    int modes, std::span<double> lambdas, std::span<double> weights) {
  const auto sp = spectrum_at(schedule, couplings, std::clamp(s, 0.0, 1.0));
  if (modes > sp.size()) throw ConstraintError("more modes requested than spins");
  const Eigen::VectorXd m = transition_weights(build_tables(sp));
  for (int b = 0; b < modes; ++b) {
    lambdas[b] = sp.lambdas(b);
    weights[b] = m(b);
  }
}

namespace {

double midpoint_error(std::span<const double> exact_l, std::span<const double> exact_m,
                      std::span<const double> approx_l, std::span<const double> approx_m) {
  const double mean_m =
      std::accumulate(exact_m.begin(), exact_m.end(), 0.0) / static_cast<double>(exact_m.size());
  double worst = 0.0;
  for (std::size_t b = 0; b < exact_l.size(); ++b) {
    worst = std::max(worst, std::abs(approx_l[b] - exact_l[b]) /
                                std::max(exact_l[b], kDeviceTemperature));
    worst = std::max(worst, std::abs(approx_m[b] - exact_m[b]) / std::max(exact_m[b], mean_m));
  }
  return worst;
}

}  // namespace

SpectrumCache::SpectrumCache(std::vector<double> couplings, AnnealSchedule schedule, int modes,
                             int points, int workers)
    : couplings_(std::move(couplings)), schedule_(std::move(schedule)), modes_(modes) {
  if (modes < 1 || modes > static_cast<int>(couplings_.size()) + 1)
    throw ConstraintError("cache modes must lie in 1..N");
  if (points < 2) throw ConstraintError("cache needs >= 2 grid points");
  grid_.resize(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) grid_[i] = static_cast<double>(i) / (points - 1);
  lambdas_.resize(points, modes);
  weights_.resize(points, modes);
  parallel_for(points, workers, [&](int i) {
    std::vector<double> l(static_cast<std::size_t>(modes_)), m(l.size());
    exact_modes_at(couplings_, schedule_, grid_[i], modes_, l, m);
    lambdas_.row(i) = Eigen::Map<const Eigen::RowVectorXd>(l.data(), modes_);
    weights_.row(i) = Eigen::Map<const Eigen::RowVectorXd>(m.data(), modes_);
  });
}

SpectrumCache SpectrumCache::refined(std::vector<double> couplings, AnnealSchedule schedule,
                                     int modes, double s_focus, int points, double tolerance,
                                     int max_points, double half_width, int workers) {
  SpectrumCache cache(std::move(couplings), std::move(schedule), modes, points, workers);
  const double lo = s_focus - half_width, hi = s_focus + half_width;
  for (;;) {
    // Midpoints of the cells inside the window: the error probes, and the new grid
    // points if the error is too large.
    std::vector<int> cells;
    for (int c = 0; c + 1 < cache.points(); ++c)
      if (cache.grid_[c + 1] > lo && cache.grid_[c] < hi) cells.push_back(c);
    const auto count = static_cast<int>(cells.size());
    Eigen::MatrixXd mid_l(count, modes), mid_m(count, modes);
    std::vector<double> errors(static_cast<std::size_t>(count));
    parallel_for(count, workers, [&](int q) {
      const int c = cells[q];
      const double mid = 0.5 * (cache.grid_[c] + cache.grid_[c + 1]);
      std::vector<double> el(static_cast<std::size_t>(modes)), em(el.size()), al(el.size()),
          am(el.size());
      exact_modes_at(cache.couplings_, cache.schedule_, mid, modes, el, em);
      cache.interpolate(mid, al, am);
      errors[q] = midpoint_error(el, em, al, am);
      mid_l.row(q) = Eigen::Map<const Eigen::RowVectorXd>(el.data(), modes);
      mid_m.row(q) = Eigen::Map<const Eigen::RowVectorXd>(em.data(), modes);
    });
    const double err = errors.empty() ? 0.0 : *std::max_element(errors.begin(), errors.end());
    if (err <= tolerance) return cache;
    const int next = cache.points() + count;
    if (next > max_points) {
      std::ostringstream os;
      os << "spectrum cache needs refinement beyond " << max_points << " points near s = "
         << s_focus << " (interpolation error " << err << ")";
      throw NumericalError(os.str());
    }
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(next));
    Eigen::MatrixXd l(next, modes), m(next, modes);
    int q = 0, row = 0;
    for (int c = 0; c < cache.points(); ++c) {
      grid.push_back(cache.grid_[c]);
      l.row(row) = cache.lambdas_.row(c);
      m.row(row++) = cache.weights_.row(c);
      if (q < count && cells[q] == c) {
        grid.push_back(0.5 * (cache.grid_[c] + cache.grid_[c + 1]));
        l.row(row) = mid_l.row(q);
        m.row(row++) = mid_m.row(q++);
      }
    }
    cache.grid_ = std::move(grid);
    cache.lambdas_ = std::move(l);
    cache.weights_ = std::move(m);
  }
}

void SpectrumCache::interpolate(double s, std::span<double> lambdas,
                                std::span<double> weights) const {
  const double x = std::clamp(s, 0.0, 1.0);
  const auto it = std::upper_bound(grid_.begin() + 1, grid_.end() - 1, x);
  const auto cell = static_cast<Eigen::Index>(it - grid_.begin()) - 1;
  const double w = (x - grid_[cell]) / (grid_[cell + 1] - grid_[cell]);
  for (int b = 0; b < modes_; ++b) {
    lambdas[b] = (1.0 - w) * lambdas_(cell, b) + w * lambdas_(cell + 1, b);
    weights[b] = (1.0 - w) * weights_(cell, b) + w * weights_(cell + 1, b);
  }
}

double SpectrumCache::interpolation_error(double s_lo, double s_hi, int workers) const {
  std::vector<int> cells;
  for (int c = 0; c + 1 < points(); ++c)
    if (grid_[c + 1] > s_lo && grid_[c] < s_hi) cells.push_back(c);
  std::vector<double> errors(cells.size(), 0.0);
  parallel_for(static_cast<int>(cells.size()), workers, [&](int q) {
    const int c = cells[q];
    const double mid = 0.5 * (grid_[c] + grid_[c + 1]);
    std::vector<double> el(static_cast<std::size_t>(modes_)), em(el.size()), al(el.size()),
        am(el.size());
    exact_modes_at(couplings_, schedule_, mid, modes_, el, em);
    interpolate(mid, al, am);
    errors[q] = midpoint_error(el, em, al, am);
  });
  return errors.empty() ? 0.0 : *std::max_element(errors.begin(), errors.end());
}

double MasterEquationResult::success_probability() const {
  return ascqa::success_probability(trajectory);
}

double success_probability(const std::vector<TruncatedPopulations>& trajectory) {
  if (trajectory.empty() || trajectory.back().s < 1.0)
    throw ConstraintError("success probability needs a trajectory that reaches s = 1");
  return trajectory.back().success_probability();
}

MasterEquationResult integrate(const SpectrumCache& cache, const BathSpec& bath, double tf_us,
                               const TruncationScheme& scheme, int output_points,
                               const IntegratorOptions& integrator) {
  bath.validate();
  scheme.validate();
  if (!(tf_us > 0.0) || !std::isfinite(tf_us)) throw ConstraintError("anneal time must be > 0");
  if (scheme.k_star > cache.modes()) throw ConstraintError("cache holds fewer modes than k*");
  if (output_points < 2) throw ConstraintError("trajectory needs >= 2 output points");

  const int k = scheme.k_star;
  const double tf_ns = tf_us * 1e3;
  std::vector<double> lam(static_cast<std::size_t>(cache.modes()));
  std::vector<double> wts(lam.size());
  const PopulationRhs rhs = [&](const std::vector<double>& p, std::vector<double>& dpds, double s) {
    cache.interpolate(s, lam, wts);
    truncated_rhs(scheme, p, lam, wts, bath, dpds);
    for (double& v : dpds) v *= tf_ns;
  };

  MasterEquationResult out;
  out.truncation = scheme;
  out.bath = bath;
  out.tf_us = tf_us;
  out.cache_points = cache.points();
  const PopulationObserver observe = [&](double s, const std::vector<double>& p) {
    TruncatedPopulations tp;
    tp.s = s;
    tp.t_us = s * tf_us;
    tp.p0 = p[0];
    tp.singles.assign(p.begin() + 1, p.begin() + 1 + k);
    tp.pairs.assign(p.begin() + 1 + k, p.end());
    out.trajectory.push_back(std::move(tp));
  };

  std::vector<double> p(static_cast<std::size_t>(scheme.state_count()), 0.0);
  p[0] = 1.0;
  std::vector<double> outputs(static_cast<std::size_t>(output_points - 1));
  for (int i = 1; i < output_points; ++i)
    outputs[i - 1] = i == output_points - 1 ? 1.0 : static_cast<double>(i) / (output_points - 1);
  out.stats = integrate_populations(rhs, p, 0.0, outputs, observe, integrator);
  return out;
}

MasterEquationModel prepare_model(const ChainSpec& spec, const AnnealSchedule& schedule,
                                  double temperature, const MasterEquationOptions& options) {
  validate(spec);
  if (!(temperature > 0.0)) throw ConstraintError("temperature must be > 0");
  const auto couplings = build_couplings(spec);
  const auto cp = find_critical_point(spec, schedule);
  const int modes = options.k_star > 0 ? options.k_star : std::max(1, k_star(cp, temperature));
  TruncationScheme{options.level, modes}.validate();
  if (modes > spec.num_spins) throw ConstraintError("k* exceeds the number of spins");
  auto cache = SpectrumCache::refined(couplings, schedule, modes, cp.s_star, options.cache_points,
                                      options.cache_tolerance, options.cache_max_points, 0.05,
                                      options.workers);
  return MasterEquationModel{spec, cp.s_star, cp.gap, modes, std::move(cache)};
}

MasterEquationResult integrate(const MasterEquationModel& model, const BathSpec& bath,
                               double tf_us, TruncationLevel level, int output_points,
                               const IntegratorOptions& integrator) {
  auto out = integrate(model.cache, bath, tf_us, TruncationScheme{level, model.k_star},
                       output_points, integrator);
  out.chain = model.chain;
  out.s_star = model.s_star;
  return out;
}

MasterEquationResult integrate(const ChainSpec& spec, const AnnealSchedule& schedule,
                               const BathSpec& bath, double tf_us,
                               const MasterEquationOptions& options) {
  bath.validate();
  const auto model = prepare_model(spec, schedule, 1.0 / bath.beta, options);
  return integrate(model, bath, tf_us, options.level, options.output_points, options.integrator);
}

void write_trajectory_csv(std::ostream& os, const MasterEquationResult& result) {
  os << "t_us,s,p0,p1,sum_singles,sum_pairs,total\n";
  os.precision(12);
  for (const auto& row : result.trajectory)
    os << row.t_us << ',' << row.s << ',' << row.p0 << ','
       << (row.singles.empty() ? 0.0 : row.singles.front()) << ',' << row.sum_singles() << ','
       << row.sum_pairs() << ',' << row.total() << '\n';
}

void write_run_metadata(std::ostream& os, const MasterEquationResult& result,
                        const IntegratorOptions& integrator) {
  nlohmann::json meta;
  meta["chain"] = {{"num_spins", result.chain.num_spins},
                   {"sector_size", result.chain.sector_size},
                   {"heavy", result.chain.heavy},
                   {"light", result.chain.light}};
  meta["bath"] = {{"eta_g2", result.bath.eta_g2},
                  {"omega_c", result.bath.omega_c},
                  {"beta", result.bath.beta}};
  meta["truncation"] = {{"level", to_string(result.truncation.level)},
                        {"k_star", result.truncation.k_star},
                        {"states", result.truncation.state_count()}};
  meta["tolerances"] = {{"rel", integrator.rel_tol}, {"abs", integrator.abs_tol}};
  meta["tf_us"] = result.tf_us;
  meta["s_star"] = result.s_star;
  meta["cache_points"] = result.cache_points;
  meta["steps"] = {{"accepted", result.stats.accepted},
                   {"rejected", result.stats.rejected},
                   {"clamped_mass", result.stats.clamped_mass}};
  if (!result.trajectory.empty() && result.trajectory.back().s >= 1.0) {
    meta["success_probability"] = result.success_probability();
    meta["final_total"] = result.trajectory.back().total();
  }
  os << meta.dump(2) << '\n';
}

}  // namespace ascqa
