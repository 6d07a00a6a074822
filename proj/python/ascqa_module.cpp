#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "ascqa/bath.hpp"
#include "ascqa/chain.hpp"
#include "ascqa/errors.hpp"
#include "ascqa/fermion.hpp"
#include "ascqa/oracle.hpp"
#include "ascqa/pauli_me.hpp"
#include "ascqa/spectral.hpp"
#include "ascqa/svmc.hpp"
#include "ascqa/validation.hpp"

namespace py = pybind11;
using namespace ascqa;

namespace {

using Couplings = std::vector<double>;

py::dict trajectory_dict(const MasterEquationResult& r) {
  std::vector<double> t, s, p0, p1, singles, pairs;
  for (const auto& row : r.trajectory) {
    t.push_back(row.t_us);
    s.push_back(row.s);
    p0.push_back(row.p0);
    p1.push_back(row.singles.empty() ? 0.0 : row.singles.front());
    singles.push_back(row.sum_singles());
    pairs.push_back(row.sum_pairs());
  }
  py::dict d;
  d["t_us"] = t;
  d["s"] = s;
  d["p0"] = p0;
  d["p1"] = p1;
  d["sum_singles"] = singles;
  d["sum_pairs"] = pairs;
  return d;
}

}  // namespace

PYBIND11_MODULE(_ascqa, m) {
  m.doc() = "Alternating-sectors Ising chains: free fermions, master equations and SVMC";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  m.attr("DEVICE_TEMPERATURE") = kDeviceTemperature;

  py::class_<ChainSpec>(m, "ChainSpec")
      .def(py::init([](int num_spins, int sector_size, double heavy, double light) {
             ChainSpec spec{num_spins, sector_size, heavy, light};
             validate(spec);
             return spec;
           }),
           py::arg("num_spins"), py::arg("sector_size"), py::arg("heavy") = 1.0, py::arg("light") = 0.5)
      .def_readonly("num_spins", &ChainSpec::num_spins)
      .def_readonly("sector_size", &ChainSpec::sector_size)
      .def_readonly("heavy", &ChainSpec::heavy)
      .def_readonly("light", &ChainSpec::light)
      .def("couplings", [](const ChainSpec& s) { return build_couplings(s); })
      .def("__repr__", [](const ChainSpec& s) {
        return "ChainSpec(num_spins=" + std::to_string(s.num_spins) + ", sector_size=" +
               std::to_string(s.sector_size) + ")";
      });
  m.def("make_chain", &make_chain, py::arg("sector_size"), py::arg("target") = 175, py::arg("heavy") = 1.0,
        py::arg("light") = 0.5, "Valid chain with N closest to the target");
  m.def("is_valid_length", &is_valid_length, py::arg("num_spins"), py::arg("sector_size"));

  py::class_<AnnealSchedule>(m, "AnnealSchedule")
      .def_static("linear", &AnnealSchedule::linear, py::arg("a0"), py::arg("b0"), py::arg("samples") = 101)
      .def_static("load", &AnnealSchedule::load, py::arg("path"))
      .def_static("bundled", &bundled_schedule, py::arg("name"))
      .def("__call__", [](const AnnealSchedule& sch, double s) {
        const auto v = sch(s);
        return py::make_tuple(v.driver, v.problem);
      });

  py::class_<FermionSpectrum>(m, "FermionSpectrum")
      .def_readonly("lambdas", &FermionSpectrum::lambdas)
      .def_readonly("phi", &FermionSpectrum::phi)
      .def_readonly("psi", &FermionSpectrum::psi)
      .def_readonly("ground_energy", &FermionSpectrum::ground_energy);
  m.def("diagonalize", [](double gamma, const Couplings& j) { return diagonalize(gamma, j); },
        py::arg("gamma"), py::arg("couplings"));
  m.def("spectrum_at",
        [](const AnnealSchedule& sch, const Couplings& j, double s) { return spectrum_at(sch, j, s); },
        py::arg("schedule"), py::arg("couplings"), py::arg("s"));
  m.def("exact_energies", [](double gamma, const Couplings& j) { return exact_spectrum(gamma, j).energies; },
        py::arg("gamma"), py::arg("couplings"), "Dense 2^N spectrum (N <= 12), ascending");
  m.def("fermionic_energies",
        [](double gamma, const Couplings& j) { return fermionic_many_body_energies(diagonalize(gamma, j)); },
        py::arg("gamma"), py::arg("couplings"), "All 2^N many-body energies from the fermion modes");

  py::class_<SpectralRow>(m, "SpectralRow")
      .def_readonly("n", &SpectralRow::n)
      .def_readonly("num_spins", &SpectralRow::num_spins)
      .def_readonly("s_star", &SpectralRow::s_star)
      .def_readonly("gap", &SpectralRow::gap)
      .def_readonly("k_star", &SpectralRow::k_star)
      .def_readonly("heuristic_pg", &SpectralRow::heuristic_pg);
  m.def("spectral_row", &spectral_row, py::arg("spec"), py::arg("schedule"),
        py::arg("temperature") = kDeviceTemperature);

  py::class_<BathSpec>(m, "BathSpec")
      .def(py::init([](double eta_g2, double omega_c, double temperature) {
             BathSpec b;
             b.eta_g2 = eta_g2;
             b.omega_c = omega_c;
             b.beta = 1.0 / temperature;
             return b;
           }),
           py::arg("eta_g2") = BathSpec{}.eta_g2, py::arg("omega_c") = BathSpec{}.omega_c,
           py::arg("temperature") = 1.0 / BathSpec{}.beta)
      .def_readonly("eta_g2", &BathSpec::eta_g2)
      .def_readonly("omega_c", &BathSpec::omega_c)
      .def_readonly("beta", &BathSpec::beta);
  m.def("ohmic_rate", &ohmic_rate, py::arg("omega"), py::arg("bath"));

  m.def(
      "master_equation",
      [](const ChainSpec& spec, const AnnealSchedule& sch, const BathSpec& bath, double tf_us,
         const std::string& level, int k_star) {
        MasterEquationOptions o;
        o.level = parse_truncation_level(level);
        o.k_star = k_star;
        const auto r = integrate(spec, sch, bath, tf_us, o);
        py::dict d;
        d["success_probability"] = r.success_probability();
        d["k_star"] = r.truncation.k_star;
        d["s_star"] = r.s_star;
        d["trajectory"] = trajectory_dict(r);
        return d;
      },
      py::arg("spec"), py::arg("schedule"), py::arg("bath") = BathSpec{}, py::arg("tf_us") = 5.0,
      py::arg("level") = "two-fermion", py::arg("k_star") = 0,
      "Truncated master equation from the vacuum; k_star = 0 takes it from the bath temperature");
  m.def(
      "exact_master_equation",
      [](const Couplings& j, const AnnealSchedule& sch, const BathSpec& bath, double tf_us) {
        const auto r = exact_master_equation(j, sch, bath, tf_us);
        py::dict d;
        d["vacuum"] = r.vacuum;
        d["ground_pair"] = r.ground_pair;
        d["total"] = r.total;
        d["populations"] = r.populations;
        return d;
      },
      py::arg("couplings"), py::arg("schedule"), py::arg("bath") = BathSpec{}, py::arg("tf_us") = 5.0);

  py::class_<SvmcResult>(m, "SvmcResult")
      .def_readonly("successes", &SvmcResult::successes)
      .def_readonly("success_probability", &SvmcResult::success_probability)
      .def_readonly("ci_low", &SvmcResult::ci_low)
      .def_readonly("ci_high", &SvmcResult::ci_high)
      .def_readonly("boundary_correlation", &SvmcResult::boundary_correlation);
  m.def(
      "run_svmc",
      [](const ChainSpec& spec, const AnnealSchedule& sch, std::int64_t sweeps, double beta, double sigma,
         int runs, std::uint64_t seed, int workers) {
        SvmcParams p;
        p.sweeps = sweeps;
        p.beta = beta;
        p.sigma = sigma;
        p.runs = runs;
        p.seed = seed;
        py::gil_scoped_release release;
        return run_svmc(spec, sch, p, workers);
      },
      py::arg("spec"), py::arg("schedule"), py::arg("sweeps") = SvmcParams{}.sweeps,
      py::arg("beta") = SvmcParams{}.beta, py::arg("sigma") = SvmcParams{}.sigma,
      py::arg("runs") = SvmcParams{}.runs, py::arg("seed") = SvmcParams{}.seed, py::arg("workers") = 1);
  m.def("wilson_interval", &wilson_interval, py::arg("successes"), py::arg("trials"),
        py::arg("z") = 1.959963984540054);

  m.def(
      "oracle_validation",
      [](std::uint64_t seed) {
        py::list out;
        for (const auto& c : oracle_validation(seed)) {
          py::dict d;
          d["check"] = c.name;
          d["worst"] = c.worst;
          d["tolerance"] = c.tolerance;
          d["passed"] = c.passed();
          out.append(d);
        }
        return out;
      },
      py::arg("seed") = 2024);
}
