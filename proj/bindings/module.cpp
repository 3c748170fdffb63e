#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <vector>

#include "xylocc/convertibility.hpp"
#include "xylocc/eigensolve.hpp"
#include "xylocc/entanglement.hpp"
#include "xylocc/fermion_oracle.hpp"
#include "xylocc/grids.hpp"
#include "xylocc/model.hpp"
#include "xylocc/scaling.hpp"
#include "xylocc/version.hpp"

namespace py = pybind11;

namespace {

xylocc::ChainParams make_params(int n, double gamma, double g) {
  return {n, gamma, g};
}

py::dict ground_state_py(int n, double gamma, double g,
                         const std::string& cache_dir) {
  xylocc::SolveOptions opts;
  opts.cache_dir = cache_dir;
  const auto gs =
      xylocc::ground_state(xylocc::build_hamiltonian(make_params(n, gamma, g)),
                           opts);
  py::dict out;
  out["energy"] = gs.energy;
  out["gap"] = gs.gap;
  out["degenerate"] = gs.degenerate;
  out["parity"] = gs.parity == xylocc::Parity::even ? "even" : "odd";
  out["from_cache"] = gs.from_cache;
  out["vector"] =
      std::vector<double>(gs.vector.data(), gs.vector.data() + gs.vector.size());
  return out;
}

std::vector<double> spectrum_py(int n, double gamma, double g, int l,
                                const std::string& cache_dir) {
  xylocc::SolveOptions opts;
  opts.cache_dir = cache_dir;
  const auto gs = xylocc::ground_state(
      xylocc::build_hamiltonian(make_params(n, gamma, g)), opts);
  return xylocc::entanglement_spectrum(gs.vector,
                                       xylocc::Bipartition::contiguous(n, l))
      .eigenvalues;
}

double renyi_py(const std::vector<double>& eigenvalues, double alpha) {
  xylocc::EntanglementSpectrum spec{eigenvalues};
  return xylocc::renyi_entropy(spec, alpha);
}

py::dict derivative_py(int n, double gamma, double g, int l, double alpha,
                       double delta) {
  xylocc::DerivativeOptions opts;
  opts.delta = delta;
  const auto res = xylocc::dS_dg(make_params(n, gamma, g),
                                 xylocc::Bipartition::contiguous(n, l), alpha,
                                 opts);
  py::dict out;
  out["value"] = res.value;
  out["sign"] = xylocc::to_string(res.sign);
  out["degenerate"] = res.degenerate;
  return out;
}

std::string verdict_py(int n, double gamma, double g, int l,
                       const std::vector<double>& alphas) {
  const auto map =
      xylocc::sign_map(gamma, xylocc::Bipartition::contiguous(n, l), {g},
                       alphas.empty() ? xylocc::default_alpha_grid() : alphas);
  return xylocc::to_string(map.verdicts[0]);
}

std::vector<double> fermion_spectrum_py(int n, double gamma, double g, int l) {
  const auto corr = xylocc::correlation_matrix(make_params(n, gamma, g));
  return xylocc::block_spectrum(corr, xylocc::Bipartition::contiguous(n, l))
      .eigenvalues;
}

py::dict fit_py(const std::vector<std::pair<double, double>>& points) {
  std::vector<xylocc::FitPoint> fp;
  fp.reserve(points.size());
  for (const auto& [n, g] : points) fp.push_back({n, g});
  const auto fit = xylocc::fit_exponential(fp);
  py::dict out;
  out["a"] = fit.a;
  out["b"] = fit.b;
  out["c"] = fit.c;
  out["rms_residual"] = fit.rms_residual;
  out["iterations"] = fit.iterations;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() =
      "Ground states, entanglement spectra and local-convertibility "
      "classification for transverse-field XY chains";
  m.attr("__version__") = xylocc::kVersion;

  m.def("ground_state", &ground_state_py, py::arg("n"), py::arg("gamma"),
        py::arg("g"), py::arg("cache_dir") = "",
        "Lowest eigenstate of the periodic chain: energy, gap, parity and "
        "the amplitude vector");
  m.def("entanglement_spectrum", &spectrum_py, py::arg("n"), py::arg("gamma"),
        py::arg("g"), py::arg("l"), py::arg("cache_dir") = "",
        "Descending reduced-density-matrix eigenvalues for the first l sites "
        "of the ground state");
  m.def("renyi_entropy", &renyi_py, py::arg("eigenvalues"), py::arg("alpha"),
        "Renyi entropy in bits of an eigenvalue list");
  m.def("ds_dg", &derivative_py, py::arg("n"), py::arg("gamma"), py::arg("g"),
        py::arg("l"), py::arg("alpha"), py::arg("delta") = 1e-4,
        "Central-difference field derivative of S_alpha with its sign");
  m.def("verdict", &verdict_py, py::arg("n"), py::arg("gamma"), py::arg("g"),
        py::arg("l"), py::arg("alphas") = std::vector<double>{},
        "Convertibility verdict at one field value from the sign pattern "
        "over alpha");
  m.def("fermion_block_spectrum", &fermion_spectrum_py, py::arg("n"),
        py::arg("gamma"), py::arg("g"), py::arg("l"),
        "Block entanglement spectrum from the free-fermion correlation "
        "matrix (independent of exact diagonalization)");
  m.def("fit_exponential", &fit_py, py::arg("points"),
        "Fit (n, g) pairs to a*exp(-n/b) + c");
  m.def("aqc_schedule_to_g",
        py::overload_cast<double>(&xylocc::aqc_schedule_to_g), py::arg("s"),
        "Annealing schedule parameter to transverse field: g = 2(1-s)/s");
  m.def("default_alpha_grid", &xylocc::default_alpha_grid,
        py::arg("lo") = 0.01, py::arg("hi") = 100.0, py::arg("n") = 60,
        py::arg("sentinels") = true);
}
