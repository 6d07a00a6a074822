#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ascqa/errors.hpp"
#include "ascqa/experiment.hpp"

namespace {

enum ExitCode { kSuccess = 0, kConfigError = 1, kNumericalFailure = 2, kPartialFailure = 3 };

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sector-size sweeps for alternating-sectors Ising chains"};
  std::string config_path, mode, out_dir;
  int workers = -1;
  std::uint64_t seed = 0;
  app.add_option("--config", config_path, "Experiment configuration file")->required();
  app.add_option("--mode", mode, "spectral | master-eq | svmc | adiabatic | oracle-validate");
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--workers", workers, "Worker threads (0: available parallelism)")
      ->check(CLI::NonNegativeNumber);
  auto* seed_option = app.add_option("--seed", seed, "Random seed");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kSuccess : kConfigError;
  }

  ascqa::ExperimentConfig config;
  try {
    config = ascqa::load_config(config_path);
    if (!mode.empty()) {
      config.mode = ascqa::parse_mode(mode);
      config.overrides.push_back("mode=" + mode);
    }
    if (!out_dir.empty()) {
      config.output_dir = out_dir;
      config.overrides.push_back("output=" + out_dir);
    }
    if (workers >= 0) {
      config.workers = workers;
      config.overrides.push_back("workers=" + std::to_string(workers));
    }
    if (*seed_option) {
      config.seed = seed;
      config.overrides.push_back("seed=" + std::to_string(seed));
    }
    config.validate();
  } catch (const ascqa::ConfigError& e) {
    std::cerr << config_path << ": " << e.what() << '\n';
    return kConfigError;
  }

  try {
    const auto report = ascqa::run_sweep(config);
    std::cout << "wrote " << report.results.string() << " and " << report.manifest.string() << " ("
              << report.wall_seconds << " s)\n";
    if (config.mode == ascqa::Mode::oracle_validate) {
      std::cout << (report.checks_passed ? "oracle checks passed\n" : "oracle checks FAILED\n");
      return report.checks_passed ? kSuccess : kNumericalFailure;
    }
    const int failures = report.failures();
    for (const auto& p : report.points)
      if (!p.ok) std::cerr << "n=" << p.n << ": " << p.error << '\n';
    if (failures == 0) return kSuccess;
    return failures == static_cast<int>(report.points.size()) ? kNumericalFailure : kPartialFailure;
  } catch (const ascqa::ConfigError& e) {
    std::cerr << config_path << ": " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumericalFailure;
  }
}
