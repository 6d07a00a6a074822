#pragma once

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ascqa {

/// Alternating-sectors chain: `num_spins` spins joined by num_spins-1 ferromagnetic
/// couplings, grouped into runs of `sector_size`. Odd-numbered sectors (counting from 1)
/// carry `heavy`, even-numbered ones `light`.
struct ChainSpec {
  int num_spins = 0;
  int sector_size = 0;
  double heavy = 1.0;
  double light = 0.5;

  int num_couplings() const { return num_spins - 1; }
  int num_sectors() const { return sector_size > 0 ? (num_spins - 1) / sector_size : 0; }

  friend bool operator==(const ChainSpec&, const ChainSpec&) = default;
};

/// Throws ConstraintError naming the first violated relation.
void validate(const ChainSpec& spec);

/// True when (N-1) is a positive multiple of n with an odd quotient.
bool is_valid_length(int num_spins, int sector_size);

/// Coupling strengths J_0..J_{N-2}; J_i = heavy when ceil((i+1)/n) is odd.
std::vector<double> build_couplings(const ChainSpec& spec);

/// Valid chain length closest to `target`; ties resolve to the shorter chain.
int nearest_valid_length(int sector_size, int target);

/// Convenience: the chain with sector size n and length nearest to `target`.
ChainSpec make_chain(int sector_size, int target, double heavy, double light);

struct ScheduleValue {
  double driver = 0.0;   ///< A(s), transverse-field strength [GHz]
  double problem = 0.0;  ///< B(s), Ising strength [GHz]
};

/// Tabulated annealing schedule with monotone piecewise-cubic (PCHIP) interpolation.
///
/// Samples must start at s=0 and end at s=1 with strictly increasing s, A
/// non-increasing with A(1)=0 and B non-decreasing with B(0)=0. At least four
/// samples are required by the interpolant.
class AnnealSchedule {
 public:
  AnnealSchedule(std::vector<double> s, std::vector<double> driver, std::vector<double> problem);

  /// A(s) = a0 (1-s), B(s) = b0 s sampled on `samples` uniform points.
  static AnnealSchedule linear(double a0, double b0, int samples = 101);

  /// Reads `s,A_GHz,B_GHz` rows after one header line.
  static AnnealSchedule parse(std::istream& in, std::string_view origin = "<stream>");
  static AnnealSchedule load(const std::filesystem::path& path);

  /// Interpolated (A, B). Exact at sample points. Throws DomainError outside [0, 1].
  ScheduleValue operator()(double s) const;

  /// (A'(s), B'(s)) from centered differences of the samples (one-sided at the
  /// ends), linearly interpolated between samples.
  ScheduleValue derivative(double s) const;

  std::span<const double> s_samples() const { return s_; }
  std::span<const double> driver_samples() const { return driver_; }
  std::span<const double> problem_samples() const { return problem_; }

  void write(std::ostream& out) const;

 private:
  struct Interpolants;
  std::vector<double> s_, driver_, problem_;
  std::vector<double> driver_slope_, problem_slope_;
  std::shared_ptr<const Interpolants> interp_;
};

/// Energy of 12 mK in angular GHz (hbar = k_B = 1).
inline constexpr double kDeviceTemperature = 1.57;

/// Directory holding the bundled schedule files.
std::filesystem::path data_directory();

/// Bundled schedules: "linear-unit" (A0=B0=2 GHz) and "linear-12ghz" (A0=B0=12 GHz).
/// Any other name is treated as a file path.
AnnealSchedule bundled_schedule(std::string_view name);

}  // namespace ascqa
