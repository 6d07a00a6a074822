#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "ascqa/bath.hpp"
#include "ascqa/chain.hpp"
#include "ascqa/pauli_me.hpp"
#include "ascqa/svmc.hpp"

namespace ascqa {

enum class Mode { spectral, master_eq, svmc, adiabatic, oracle_validate };

/// "spectral", "master-eq", "svmc", "adiabatic", "oracle-validate".
std::string to_string(Mode mode);
/// Throws ConfigError for an unknown name.
Mode parse_mode(std::string_view text);

/// A sector-size sweep in one analysis mode.
///
/// Read from sectioned key = value text:
///
///   [experiment]  mode, output, seed, workers
///   [chain]       W1, W2, target_N, n            (n: list such as "1-10, 12, 16")
///   [schedule]    file (bundled name or path, relative to the config file), temperature
///   [bath]        eta_g2, omega_c, temperature
///   [master_eq]   tf_us (list), levels (list), k_star, cache_points, cache_tolerance,
///                 cache_max_points, output_points, rel_tol, abs_tol, trajectories
///   [svmc]        sweeps, beta, sigma, runs, kernel
///   [adiabatic]   tf_us (list), grid_points
///
/// Every key is optional; a mode needs its own section ([master_eq] also needs [bath]).
struct ExperimentConfig {
  Mode mode = Mode::spectral;
  std::filesystem::path output_dir = "results";
  std::uint64_t seed = 1;
  int workers = 0;  ///< 0: available parallelism

  double heavy = 1.0;
  double light = 0.5;
  int target_spins = 175;
  std::vector<int> sector_sizes{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 12, 13, 14, 16, 19, 20};

  std::string schedule = "linear-12ghz";
  double temperature = kDeviceTemperature;  ///< threshold for k* and thermal counts [GHz]

  BathSpec bath;
  std::vector<double> tf_us{5.0};
  std::vector<TruncationLevel> levels{TruncationLevel::two_fermion};
  MasterEquationOptions master;
  bool write_trajectories = false;

  SvmcParams svmc;
  SvmcKernel svmc_kernel = SvmcKernel::automatic;

  std::vector<double> adiabatic_tf_us{5.0};
  int adiabatic_grid = 201;

  std::vector<std::string> sections;   ///< sections present in the source
  std::map<std::string, int> key_lines;  ///< "section.key" -> line in the source
  std::string source;                  ///< raw configuration text
  std::filesystem::path base_dir;      ///< directory relative paths resolve against
  std::vector<std::string> overrides;  ///< command-line overrides, recorded in the manifest

  /// Throws ConfigError when a value is out of range, the mode's section is missing,
  /// or the schedule cannot be found.
  void validate() const;
  AnnealSchedule load_schedule() const;
};

/// Parses configuration text; errors carry the offending line.
ExperimentConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});
/// Reads and parses a file. Throws ConfigError when it cannot be read.
ExperimentConfig load_config(const std::filesystem::path& path);

/// "1-4, 7" -> {1, 2, 3, 4, 7}. Throws ConfigError (without a line).
std::vector<int> parse_int_list(std::string_view text);

/// Outcome of one sector size.
struct PointStatus {
  int n = 0;
  int num_spins = 0;
  bool ok = true;
  std::string error;
  double seconds = 0.0;
};

struct SweepReport {
  Mode mode = Mode::spectral;
  std::filesystem::path results;   ///< the result table
  std::filesystem::path manifest;
  std::vector<std::filesystem::path> extra_files;
  std::vector<PointStatus> points;
  bool checks_passed = true;  ///< oracle-validate: all equivalence checks passed
  double wall_seconds = 0.0;

  int failures() const;
};

/// `<mode>_<W1>_<W2>_<N>` with N the target length, e.g. "spectral_1_0.5_175".
std::string result_stem(const ExperimentConfig& config);

/// Runs the sweep, writes `<stem>.csv` (one row per sector size, in list order) and
/// `<stem>.manifest.json` into the output directory. A failure at one n is recorded
/// in the manifest and the sweep continues.
SweepReport run_sweep(const ExperimentConfig& config);

/// Lower-case hex SHA-256 of a byte string.
std::string sha256_hex(std::string_view bytes);

}  // namespace ascqa
