#include "ascqa/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <Eigen/Core>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <boost/version.hpp>
#include <json.hpp>
#include <openssl/evp.h>
#include <openssl/opensslv.h>

#include "ascqa/errors.hpp"
#include "ascqa/spectral.hpp"
#include "ascqa/validation.hpp"
#include "detail/parallel.hpp"

namespace ascqa {

namespace {

using Clock = std::chrono::steady_clock;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) return parts;
    start = pos + 1;
  }
}

// Compact decimal form: 1 -> "1", 0.5 -> "0.5".
std::string compact(double x) {
  std::ostringstream os;
  os << std::setprecision(12) << x;
  return os.str();
}

// Keys accepted in each section.
const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"experiment", {"mode", "output", "seed", "workers"}},
      {"chain", {"W1", "W2", "target_N", "n"}},
      {"schedule", {"file", "temperature"}},
      {"bath", {"eta_g2", "omega_c", "temperature"}},
      {"master_eq",
       {"tf_us", "levels", "k_star", "cache_points", "cache_tolerance", "cache_max_points",
        "output_points", "rel_tol", "abs_tol", "trajectories"}},
      {"svmc", {"sweeps", "beta", "sigma", "runs", "kernel"}},
      {"adiabatic", {"tf_us", "grid_points"}},
  };
  return keys;
}

// Reads typed values out of the parsed tree, reporting errors at the key's line.
class Reader {
 public:
  Reader(const boost::property_tree::ptree& tree, const std::map<std::string, int>& lines)
      : tree_(tree), lines_(lines) {}

  int line(const std::string& key) const {
    const auto it = lines_.find(key);
    return it == lines_.end() ? 0 : it->second;
  }

  bool read(const std::string& key, std::string& out) const {
    const auto value = tree_.get_optional<std::string>(boost::property_tree::ptree::path_type(key, '.'));
    if (!value) return false;
    out = std::string(trim(*value));
    return true;
  }

  void read(const std::string& key, double& out) const {
    std::string text;
    if (!read(key, text)) return;
    out = to_double(key, text);
  }

  template <class Int>
    requires std::is_integral_v<Int>
  void read(const std::string& key, Int& out) const {
    std::string text;
    if (!read(key, text)) return;
    Int value{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size())
      throw ConfigError(key + ": expected an integer, got '" + text + "'", line(key));
    out = value;
  }

  void read(const std::string& key, bool& out) const {
    std::string text;
    if (!read(key, text)) return;
    if (text == "true" || text == "yes" || text == "1") out = true;
    else if (text == "false" || text == "no" || text == "0") out = false;
    else throw ConfigError(key + ": expected true or false, got '" + text + "'", line(key));
  }

  void read_list(const std::string& key, std::vector<double>& out) const {
    std::string text;
    if (!read(key, text)) return;
    out.clear();
    for (auto part : split(text, ',')) out.push_back(to_double(key, std::string(part)));
  }

  double to_double(const std::string& key, const std::string& text) const {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value))
      throw ConfigError(key + ": expected a number, got '" + text + "'", line(key));
    return value;
  }

 private:
  const boost::property_tree::ptree& tree_;
  const std::map<std::string, int>& lines_;
};

bool is_bundled(const std::string& name) { return name == "linear-unit" || name == "linear-12ghz"; }

std::filesystem::path schedule_path(const ExperimentConfig& c) {
  std::filesystem::path p(c.schedule);
  if (p.is_relative() && !c.base_dir.empty()) p = c.base_dir / p;
  return p;
}

}  // namespace

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::spectral: return "spectral";
    case Mode::master_eq: return "master-eq";
    case Mode::svmc: return "svmc";
    case Mode::adiabatic: return "adiabatic";
    case Mode::oracle_validate: return "oracle-validate";
  }
  return "unknown";
}

Mode parse_mode(std::string_view text) {
  for (Mode m : {Mode::spectral, Mode::master_eq, Mode::svmc, Mode::adiabatic, Mode::oracle_validate})
    if (to_string(m) == text) return m;
  throw ConfigError("unknown mode '" + std::string(text) +
                    "' (spectral, master-eq, svmc, adiabatic, oracle-validate)");
}

std::vector<int> parse_int_list(std::string_view text) {
  std::vector<int> out;
  auto to_int = [&](std::string_view s) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
      throw ConfigError("expected an integer list, got '" + std::string(text) + "'");
    return v;
  };
  for (auto part : split(text, ',')) {
    const auto dash = part.find('-', 1);
    if (dash == std::string_view::npos) {
      out.push_back(to_int(part));
      continue;
    }
    const int lo = to_int(trim(part.substr(0, dash))), hi = to_int(trim(part.substr(dash + 1)));
    if (hi < lo) throw ConfigError("descending range '" + std::string(part) + "'");
    for (int v = lo; v <= hi; ++v) out.push_back(v);
  }
  return out;
}

ExperimentConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  ExperimentConfig c;
  c.source = std::string(text);
  c.base_dir = base_dir;

  // Syntax: the INI reader reports malformed lines and duplicate keys.
  boost::property_tree::ptree tree;
  {
    std::istringstream in(c.source);
    try {
      boost::property_tree::ini_parser::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
      throw ConfigError(e.message(), static_cast<int>(e.line()));
    }
  }

  // Line of every section and key, for error messages and the unknown-key check.
  {
    std::istringstream in(c.source);
    std::string raw, section;
    int number = 0;
    while (std::getline(in, raw)) {
      ++number;
      const auto line = trim(raw);
      if (line.empty() || line.front() == ';' || line.front() == '#') continue;
      if (line.front() == '[') {
        section = std::string(trim(line.substr(1, line.find(']') - 1)));
        if (!known_keys().contains(section))
          throw ConfigError("unknown section [" + section + "]", number);
        c.sections.push_back(section);
        continue;
      }
      const auto key = std::string(trim(line.substr(0, line.find('='))));
      if (section.empty()) throw ConfigError("key '" + key + "' outside a section", number);
      if (!known_keys().at(section).contains(key))
        throw ConfigError("unknown key '" + key + "' in [" + section + "]", number);
      c.key_lines[section + "." + key] = number;
    }
  }

  const Reader r(tree, c.key_lines);
  std::string text_value;
  if (r.read("experiment.mode", text_value)) {
    try {
      c.mode = parse_mode(text_value);
    } catch (const ConfigError& e) {
      throw ConfigError(e.what(), r.line("experiment.mode"));
    }
  }
  if (r.read("experiment.output", text_value)) c.output_dir = text_value;
  r.read("experiment.seed", c.seed);
  r.read("experiment.workers", c.workers);

  r.read("chain.W1", c.heavy);
  r.read("chain.W2", c.light);
  r.read("chain.target_N", c.target_spins);
  if (r.read("chain.n", text_value)) {
    try {
      c.sector_sizes = parse_int_list(text_value);
    } catch (const ConfigError& e) {
      throw ConfigError(std::string("n: ") + e.what(), r.line("chain.n"));
    }
  }

  r.read("schedule.file", c.schedule);
  r.read("schedule.temperature", c.temperature);

  r.read("bath.eta_g2", c.bath.eta_g2);
  r.read("bath.omega_c", c.bath.omega_c);
  double bath_temperature = 1.0 / c.bath.beta;
  r.read("bath.temperature", bath_temperature);
  if (!(bath_temperature > 0.0))
    throw ConfigError("bath temperature must be > 0", r.line("bath.temperature"));
  c.bath.beta = 1.0 / bath_temperature;

  r.read_list("master_eq.tf_us", c.tf_us);
  if (r.read("master_eq.levels", text_value)) {
    c.levels.clear();
    for (auto part : split(text_value, ',')) {
      try {
        c.levels.push_back(parse_truncation_level(std::string(part)));
      } catch (const ConfigError& e) {
        throw ConfigError(e.what(), r.line("master_eq.levels"));
      }
    }
  }
  r.read("master_eq.k_star", c.master.k_star);
  r.read("master_eq.cache_points", c.master.cache_points);
  r.read("master_eq.cache_tolerance", c.master.cache_tolerance);
  r.read("master_eq.cache_max_points", c.master.cache_max_points);
  r.read("master_eq.output_points", c.master.output_points);
  r.read("master_eq.rel_tol", c.master.integrator.rel_tol);
  r.read("master_eq.abs_tol", c.master.integrator.abs_tol);
  r.read("master_eq.trajectories", c.write_trajectories);

  r.read("svmc.sweeps", c.svmc.sweeps);
  r.read("svmc.beta", c.svmc.beta);
  r.read("svmc.sigma", c.svmc.sigma);
  r.read("svmc.runs", c.svmc.runs);
  if (r.read("svmc.kernel", text_value)) {
    if (text_value == "auto") c.svmc_kernel = SvmcKernel::automatic;
    else if (text_value == "scalar") c.svmc_kernel = SvmcKernel::scalar;
    else if (text_value == "avx512") c.svmc_kernel = SvmcKernel::avx512;
    else throw ConfigError("svmc.kernel: expected auto, scalar or avx512", r.line("svmc.kernel"));
  }

  r.read_list("adiabatic.tf_us", c.adiabatic_tf_us);
  r.read("adiabatic.grid_points", c.adiabatic_grid);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read configuration file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path.parent_path());
}

void ExperimentConfig::validate() const {
  auto line = [&](const std::string& key) {
    const auto it = key_lines.find(key);
    return it == key_lines.end() ? 0 : it->second;
  };
  auto require = [&](bool ok, const std::string& what, const std::string& key) {
    if (!ok) throw ConfigError(what, line(key));
  };
  auto has_section = [&](const std::string& name) {
    return std::find(sections.begin(), sections.end(), name) != sections.end();
  };

  require(workers >= 0, "workers must be >= 0", "experiment.workers");
  require(!output_dir.empty(), "output directory must not be empty", "experiment.output");
  if (mode == Mode::oracle_validate) return;

  require(heavy > 0.0, "W1 must be > 0", "chain.W1");
  require(light > 0.0, "W2 must be > 0", "chain.W2");
  require(target_spins >= 2, "target_N must be >= 2", "chain.target_N");
  require(!sector_sizes.empty(), "n list is empty", "chain.n");
  for (int n : sector_sizes) require(n >= 1, "sector sizes must be >= 1", "chain.n");
  require(temperature > 0.0, "temperature must be > 0", "schedule.temperature");
  if (!is_bundled(schedule))
    require(std::filesystem::exists(schedule_path(*this)),
            "schedule file not found: " + schedule_path(*this).string(), "schedule.file");

  switch (mode) {
    case Mode::master_eq:
      require(has_section("master_eq"), "mode master-eq needs a [master_eq] section", "");
      require(has_section("bath"), "mode master-eq needs a [bath] section", "");
      require(!tf_us.empty(), "tf_us list is empty", "master_eq.tf_us");
      for (double tf : tf_us) require(tf > 0.0, "tf_us must be > 0", "master_eq.tf_us");
      require(!levels.empty(), "levels list is empty", "master_eq.levels");
      require(bath.eta_g2 >= 0.0, "eta_g2 must be >= 0", "bath.eta_g2");
      require(bath.omega_c > 0.0, "omega_c must be > 0", "bath.omega_c");
      require(master.k_star >= 0, "k_star must be >= 0", "master_eq.k_star");
      require(master.cache_points >= 2, "cache_points must be >= 2", "master_eq.cache_points");
      require(master.cache_tolerance > 0.0, "cache_tolerance must be > 0", "master_eq.cache_tolerance");
      require(master.cache_max_points >= master.cache_points,
              "cache_max_points must be >= cache_points", "master_eq.cache_max_points");
      require(master.output_points >= 2, "output_points must be >= 2", "master_eq.output_points");
      require(master.integrator.rel_tol > 0.0, "rel_tol must be > 0", "master_eq.rel_tol");
      require(master.integrator.abs_tol > 0.0, "abs_tol must be > 0", "master_eq.abs_tol");
      break;
    case Mode::svmc:
      require(has_section("svmc"), "mode svmc needs an [svmc] section", "");
      require(svmc.sweeps >= 1, "sweeps must be >= 1", "svmc.sweeps");
      require(svmc.beta > 0.0, "beta must be > 0", "svmc.beta");
      require(svmc.sigma >= 0.0, "sigma must be >= 0", "svmc.sigma");
      require(svmc.runs >= 1, "runs must be >= 1", "svmc.runs");
      require(svmc_kernel != SvmcKernel::avx512 || avx512_available(),
              "the AVX-512 kernel is not supported on this machine", "svmc.kernel");
      break;
    case Mode::adiabatic:
      require(has_section("adiabatic"), "mode adiabatic needs an [adiabatic] section", "");
      require(!adiabatic_tf_us.empty(), "tf_us list is empty", "adiabatic.tf_us");
      for (double tf : adiabatic_tf_us) require(tf > 0.0, "tf_us must be > 0", "adiabatic.tf_us");
      require(adiabatic_grid >= 3, "grid_points must be >= 3", "adiabatic.grid_points");
      break;
    case Mode::spectral:
    case Mode::oracle_validate:
      break;
  }
}

AnnealSchedule ExperimentConfig::load_schedule() const {
  try {
    return is_bundled(schedule) ? bundled_schedule(schedule) : AnnealSchedule::load(schedule_path(*this));
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    const auto it = key_lines.find("schedule.file");
    throw ConfigError(std::string("schedule: ") + e.what(), it == key_lines.end() ? 0 : it->second);
  }
}

int SweepReport::failures() const {
  return static_cast<int>(std::count_if(points.begin(), points.end(), [](const auto& p) { return !p.ok; }));
}

std::string result_stem(const ExperimentConfig& c) {
  return to_string(c.mode) + "_" + compact(c.heavy) + "_" + compact(c.light) + "_" +
         std::to_string(c.target_spins);
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1)
    throw NumericalError("SHA-256 digest failed");
  std::ostringstream os;
  for (unsigned int i = 0; i < length; ++i)
    os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  return os.str();
}

namespace {

// One row per sector size, formatted independently so that points can run in parallel.
using PointBody = std::function<std::string(const ChainSpec& spec, PointStatus& status,
                                            std::vector<std::filesystem::path>& extra)>;

std::string format_row(std::initializer_list<std::string> fields) {
  std::string row;
  for (const auto& f : fields) {
    if (!row.empty()) row += ',';
    row += f;
  }
  return row + '\n';
}

std::string num(double x) {
  std::ostringstream os;
  os << std::setprecision(12) << x;
  return os.str();
}

// Runs `body` for every sector size on `workers` threads; rows are collected per
// index and the failures isolated.
std::vector<std::string> sweep_points(const ExperimentConfig& c, int workers, const PointBody& body,
                                      SweepReport& report) {
  const auto count = static_cast<int>(c.sector_sizes.size());
  std::vector<std::string> rows(static_cast<std::size_t>(count));
  std::vector<std::vector<std::filesystem::path>> extras(static_cast<std::size_t>(count));
  report.points.assign(static_cast<std::size_t>(count), {});
  detail::parallel_for(count, workers, [&](int idx) {
    auto& status = report.points[static_cast<std::size_t>(idx)];
    status.n = c.sector_sizes[static_cast<std::size_t>(idx)];
    const auto start = Clock::now();
    try {
      const auto spec = make_chain(status.n, c.target_spins, c.heavy, c.light);
      status.num_spins = spec.num_spins;
      rows[static_cast<std::size_t>(idx)] = body(spec, status, extras[static_cast<std::size_t>(idx)]);
    } catch (const std::exception& e) {
      status.ok = false;
      status.error = e.what();
      rows[static_cast<std::size_t>(idx)].clear();
    }
    status.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  });
  for (auto& e : extras) report.extra_files.insert(report.extra_files.end(), e.begin(), e.end());
  return rows;
}

nlohmann::json versions() {
  return {{"ascqa", ASCQA_VERSION},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                        "." + std::to_string(EIGEN_MINOR_VERSION)},
          {"boost", std::to_string(BOOST_VERSION / 100000) + "." +
                        std::to_string(BOOST_VERSION / 100 % 1000) + "." +
                        std::to_string(BOOST_VERSION % 100)},
          {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
          {"openssl", OPENSSL_VERSION_TEXT},
          {"compiler", __VERSION__}};
}

}  // namespace

SweepReport run_sweep(const ExperimentConfig& c) {
  c.validate();
  const auto start = Clock::now();
  SweepReport report;
  report.mode = c.mode;
  const int workers =
      c.workers > 0 ? c.workers : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::filesystem::create_directories(c.output_dir);
  const std::string stem = result_stem(c);
  report.results = c.output_dir / (stem + ".csv");
  report.manifest = c.output_dir / (stem + ".manifest.json");

  std::string header;
  std::vector<std::string> rows;
  nlohmann::json checks = nlohmann::json::array();

  if (c.mode == Mode::oracle_validate) {
    header = "check,worst,tolerance,chains,compared,seconds,passed\n";
    for (const auto& check : oracle_validation(c.seed)) {
      rows.push_back(format_row({check.name, num(check.worst), num(check.tolerance),
                                 std::to_string(check.chains), std::to_string(check.compared),
                                 num(check.seconds), check.passed() ? "true" : "false"}));
      report.checks_passed = report.checks_passed && check.passed();
      checks.push_back({{"name", check.name}, {"worst", check.worst}, {"passed", check.passed()}});
    }
  } else {
    const auto schedule = c.load_schedule();
    switch (c.mode) {
      case Mode::spectral:
        header = "n,N,sStar,gap_GHz,kStar,totalThermalStates,heuristicPG\n";
        rows = sweep_points(c, workers, [&](const ChainSpec& spec, PointStatus&, auto&) {
          const auto row = spectral_row(spec, schedule, c.temperature);
          return format_row({std::to_string(row.n), std::to_string(row.num_spins), num(row.s_star),
                             num(row.gap), std::to_string(row.k_star),
                             std::to_string(row.thermal.count) + (row.thermal.overflow ? "+" : ""),
                             num(row.heuristic_pg)});
        }, report);
        break;
      case Mode::master_eq:
        header =
            "n,N,tf_us,level,k_star,s_star,gap_GHz,P_G,p0,cache_points,accepted_steps,"
            "rejected_steps,clamped_mass\n";
        rows = sweep_points(c, workers, [&](const ChainSpec& spec, PointStatus&, auto& extra) {
          auto options = c.master;
          options.workers = 1;
          const auto model = prepare_model(spec, schedule, 1.0 / c.bath.beta, options);
          std::string out;
          for (double tf : c.tf_us)
            for (auto level : c.levels) {
              const auto r = integrate(model, c.bath, tf, level, options.output_points, options.integrator);
              out += format_row({std::to_string(spec.sector_size), std::to_string(spec.num_spins),
                                 num(tf), to_string(level), std::to_string(model.k_star),
                                 num(model.s_star), num(model.gap), num(r.success_probability()),
                                 num(r.trajectory.back().p0), std::to_string(model.cache.points()),
                                 std::to_string(r.stats.accepted), std::to_string(r.stats.rejected),
                                 num(r.stats.clamped_mass)});
              if (c.write_trajectories) {
                const auto path = c.output_dir / (stem + "_n" + std::to_string(spec.sector_size) + "_" +
                                                  to_string(level) + "_tf" + compact(tf) + ".csv");
                std::ofstream f(path);
                write_trajectory_csv(f, r);
                if (!f) throw std::runtime_error("cannot write " + path.string());
                extra.push_back(path);
              }
            }
          return out;
        }, report);
        break;
      case Mode::svmc: {
        std::ostringstream h;
        write_svmc_header(h);
        header = h.str();
        // Runs inside one sector size are spread over the workers.
        rows = sweep_points(c, 1, [&](const ChainSpec& spec, PointStatus&, auto&) {
          auto params = c.svmc;
          params.seed = c.seed;
          std::ostringstream row;
          write_svmc_row(row, run_svmc(spec, schedule, params, workers, c.svmc_kernel));
          return row.str();
        }, report);
        break;
      }
      case Mode::adiabatic:
        header = "n,N,tf_us,max_ratio_ns,s_at_max,satisfied\n";
        rows = sweep_points(c, workers, [&](const ChainSpec& spec, PointStatus&, auto&) {
          std::string out;
          for (double tf : c.adiabatic_tf_us) {
            const auto a = adiabatic_check(spec, schedule, tf, c.adiabatic_grid);
            out += format_row({std::to_string(spec.sector_size), std::to_string(spec.num_spins),
                               num(tf), num(a.max_ratio_ns), num(a.s_at_max),
                               a.satisfied ? "true" : "false"});
          }
          return out;
        }, report);
        break;
      case Mode::oracle_validate:
        break;
    }
  }

  {
    std::ofstream out(report.results, std::ios::binary);
    out << header;
    for (const auto& row : rows) out << row;
    if (!out) throw std::runtime_error("cannot write " + report.results.string());
  }
  report.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();

  std::string hashed = c.source;
  for (const auto& o : c.overrides) hashed += "\n#override " + o;
  nlohmann::json manifest;
  manifest["mode"] = to_string(c.mode);
  manifest["config_sha256"] = sha256_hex(hashed);
  manifest["overrides"] = c.overrides;
  manifest["versions"] = versions();
  manifest["wall_time_s"] = report.wall_seconds;
  manifest["workers"] = workers;
  manifest["seed"] = c.seed;
  manifest["results"] = report.results.filename().string();
  nlohmann::json extra = nlohmann::json::array();
  for (const auto& p : report.extra_files) extra.push_back(p.filename().string());
  manifest["extra_files"] = extra;
  nlohmann::json points = nlohmann::json::array();
  for (const auto& p : report.points) {
    nlohmann::json entry{{"n", p.n}, {"N", p.num_spins}, {"ok", p.ok}, {"seconds", p.seconds}};
    if (!p.ok) entry["error"] = p.error;
    points.push_back(entry);
  }
  manifest["points"] = points;
  manifest["failures"] = report.failures();
  if (c.mode == Mode::oracle_validate) {
    manifest["checks"] = checks;
    manifest["checks_passed"] = report.checks_passed;
  }
  std::ofstream out(report.manifest, std::ios::binary);
  out << manifest.dump(2) << '\n';
  if (!out) throw std::runtime_error("cannot write " + report.manifest.string());
  return report;
}

}  // namespace ascqa
