#include "ascqa/chain.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

// Boost 1.74's pchip header calls isnan unqualified.
using std::isnan;
#include <boost/math/interpolators/pchip.hpp>

#include "ascqa/errors.hpp"

namespace ascqa {

namespace {

std::string describe(const ChainSpec& spec) {
  std::ostringstream os;
  os << "(N=" << spec.num_spins << ", n=" << spec.sector_size << ", W1=" << spec.heavy
     << ", W2=" << spec.light << ")";
  return os.str();
}

}  // namespace

bool is_valid_length(int num_spins, int sector_size) {
  if (sector_size < 1 || num_spins < 2) return false;
  const int links = num_spins - 1;
  return links % sector_size == 0 && (links / sector_size) % 2 == 1;
}

void validate(const ChainSpec& spec) {
  const auto where = describe(spec);
  if (spec.sector_size < 1) throw ConstraintError("sector size n >= 1 violated " + where);
  if (spec.num_spins < 2) throw ConstraintError("chain length N >= 2 violated " + where);
  if (!(spec.light > 0.0)) throw ConstraintError("W2 > 0 violated " + where);
  if (!(spec.heavy > spec.light)) throw ConstraintError("W1 > W2 violated " + where);
  if ((spec.num_spins - 1) % spec.sector_size != 0)
    throw ConstraintError("(N-1) mod n == 0 violated " + where);
  if (((spec.num_spins - 1) / spec.sector_size) % 2 != 1)
    throw ConstraintError("(N-1)/n odd violated " + where);
}

std::vector<double> build_couplings(const ChainSpec& spec) {
  validate(spec);
  std::vector<double> J(spec.num_couplings());
  for (int i = 0; i < spec.num_couplings(); ++i) {
    const int sector = i / spec.sector_size;  // 0-based; sector 0 is heavy
    J[i] = sector % 2 == 0 ? spec.heavy : spec.light;
  }
  return J;
}

int nearest_valid_length(int sector_size, int target) {
  if (sector_size < 1) throw ConstraintError("sector size n >= 1 violated");
  if (target < sector_size + 1) throw ConstraintError("target length must be >= n+1");
  // Valid lengths are 1 + n(2b+1); the nearest lies within one period 2n of the target.
  const int period = 2 * sector_size;
  const int b = std::max(0, (target - 1 - sector_size) / period);
  int best = 1 + sector_size * (2 * b + 1);
  for (int cand = best; cand <= target + period; cand += period) {
    if (std::abs(cand - target) < std::abs(best - target)) best = cand;
  }
  return best;
}

ChainSpec make_chain(int sector_size, int target, double heavy, double light) {
  ChainSpec spec{nearest_valid_length(sector_size, target), sector_size, heavy, light};
  validate(spec);
  return spec;
}

struct AnnealSchedule::Interpolants {
  boost::math::interpolators::pchip<std::vector<double>> driver;
  boost::math::interpolators::pchip<std::vector<double>> problem;
};

AnnealSchedule::AnnealSchedule(std::vector<double> s, std::vector<double> driver,
                               std::vector<double> problem)
    : s_(std::move(s)), driver_(std::move(driver)), problem_(std::move(problem)) {
  const std::size_t n = s_.size();
  if (driver_.size() != n || problem_.size() != n)
    throw ConstraintError("schedule columns have different lengths");
  if (n < 4) throw ConstraintError("schedule needs at least 4 samples");
  if (s_.front() != 0.0) throw ConstraintError("schedule must start at s=0");
  if (s_.back() != 1.0) throw ConstraintError("schedule must end at s=1");
  for (std::size_t k = 1; k < n; ++k) {
    if (!(s_[k] > s_[k - 1])) throw ConstraintError("schedule s must be strictly increasing");
    if (driver_[k] > driver_[k - 1]) throw ConstraintError("schedule A(s) must be non-increasing");
    if (problem_[k] < problem_[k - 1])
      throw ConstraintError("schedule B(s) must be non-decreasing");
  }
  const double scale = std::max(driver_.front(), problem_.back());
  if (std::abs(driver_.back()) > 1e-9 * scale) throw ConstraintError("schedule needs A(1)=0");
  if (std::abs(problem_.front()) > 1e-9 * scale) throw ConstraintError("schedule needs B(0)=0");
  driver_.back() = 0.0;
  problem_.front() = 0.0;

  auto centered = [&](const std::vector<double>& y) {
    std::vector<double> d(n);
    d[0] = (y[1] - y[0]) / (s_[1] - s_[0]);
    d[n - 1] = (y[n - 1] - y[n - 2]) / (s_[n - 1] - s_[n - 2]);
    for (std::size_t k = 1; k + 1 < n; ++k) d[k] = (y[k + 1] - y[k - 1]) / (s_[k + 1] - s_[k - 1]);
    return d;
  };
  driver_slope_ = centered(driver_);
  problem_slope_ = centered(problem_);

  auto x1 = s_, x2 = s_, a = driver_, b = problem_;
  interp_ = std::make_shared<const Interpolants>(
      Interpolants{{std::move(x1), std::move(a)}, {std::move(x2), std::move(b)}});
}

AnnealSchedule AnnealSchedule::linear(double a0, double b0, int samples) {
  if (samples < 4) throw ConstraintError("schedule needs at least 4 samples");
  if (!(a0 > 0.0) || !(b0 > 0.0)) throw ConstraintError("linear schedule amplitudes must be > 0");
  std::vector<double> s(samples), a(samples), b(samples);
  for (int k = 0; k < samples; ++k) {
    s[k] = static_cast<double>(k) / (samples - 1);
    a[k] = a0 * (1.0 - s[k]);
    b[k] = b0 * s[k];
  }
  s.back() = 1.0;
  return AnnealSchedule(std::move(s), std::move(a), std::move(b));
}

AnnealSchedule AnnealSchedule::parse(std::istream& in, std::string_view origin) {
  std::string line;
  if (!std::getline(in, line)) throw ConstraintError(std::string(origin) + ": empty schedule file");
  std::vector<double> s, a, b;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double x, y, z;
    if (!(row >> x >> y >> z))
      throw ConstraintError(std::string(origin) + ":" + std::to_string(lineno) +
                            ": expected s,A_GHz,B_GHz");
    s.push_back(x);
    a.push_back(y);
    b.push_back(z);
  }
  try {
    return AnnealSchedule(std::move(s), std::move(a), std::move(b));
  } catch (const ConstraintError& e) {
    throw ConstraintError(std::string(origin) + ": " + e.what());
  }
}

AnnealSchedule AnnealSchedule::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConstraintError("cannot open schedule file " + path.string());
  return parse(in, path.string());
}

ScheduleValue AnnealSchedule::operator()(double s) const {
  if (!(s >= 0.0 && s <= 1.0)) throw DomainError("schedule evaluated outside [0,1]");
  // Exact at the samples, and keep the interpolant from overshooting the boundary values.
  const auto it = std::lower_bound(s_.begin(), s_.end(), s);
  if (it != s_.end() && *it == s) {
    const auto k = static_cast<std::size_t>(it - s_.begin());
    return {driver_[k], problem_[k]};
  }
  return {std::max(0.0, interp_->driver(s)), std::max(0.0, interp_->problem(s))};
}

ScheduleValue AnnealSchedule::derivative(double s) const {
  if (!(s >= 0.0 && s <= 1.0)) throw DomainError("schedule evaluated outside [0,1]");
  auto hi = static_cast<std::size_t>(std::upper_bound(s_.begin(), s_.end(), s) - s_.begin());
  hi = std::clamp<std::size_t>(hi, 1, s_.size() - 1);
  const std::size_t lo = hi - 1;
  const double w = (s - s_[lo]) / (s_[hi] - s_[lo]);
  return {(1 - w) * driver_slope_[lo] + w * driver_slope_[hi],
          (1 - w) * problem_slope_[lo] + w * problem_slope_[hi]};
}

void AnnealSchedule::write(std::ostream& out) const {
  out << "s,A_GHz,B_GHz\n" << std::setprecision(17);
  for (std::size_t k = 0; k < s_.size(); ++k)
    out << s_[k] << ',' << driver_[k] << ',' << problem_[k] << '\n';
}

std::filesystem::path data_directory() {
  if (const char* env = std::getenv("ASCQA_DATA_DIR")) return env;
  return ASCQA_DATA_DIR;
}

AnnealSchedule bundled_schedule(std::string_view name) {
  if (name == "linear-unit") return AnnealSchedule::linear(2.0, 2.0);
  if (name == "linear-12ghz") return AnnealSchedule::linear(12.0, 12.0);
  return AnnealSchedule::load(std::filesystem::path(name));
}

}  // namespace ascqa
