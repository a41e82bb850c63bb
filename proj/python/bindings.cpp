#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "primeorbits/cli.hpp"
#include "primeorbits/counting.hpp"
#include "primeorbits/errors.hpp"
#include "primeorbits/probes.hpp"
#include "primeorbits/thermo.hpp"
#include "primeorbits/transfer.hpp"
#include "primeorbits/zeta.hpp"

namespace py = pybind11;
using namespace primeorbits;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Periodic orbits, dimension and zeta functions of hyperbolic rational maps";
  m.attr("__version__") = kVersion;

  static py::exception<Error> error(m, "PrimeOrbitsError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      error((std::string(to_string(e.kind())) + ": " + e.what()).c_str());
    }
  });

  py::class_<RationalMap>(m, "RationalMap")
      .def_static("quadratic", &RationalMap::quadratic, py::arg("c"))
      .def_static("polynomial", &RationalMap::polynomial, py::arg("coeffs"))
      .def_static("from_json", &RationalMap::from_json)
      .def_static("builtin", [](const std::string& name) {
        auto f = builtin_map(name);
        if (!f) throw py::value_error("unknown built-in map " + name);
        return *f;
      })
      .def("__call__", &RationalMap::operator())
      .def("derivative", &RationalMap::derivative)
      .def_property_readonly("degree", &RationalMap::degree)
      .def("to_json", &RationalMap::to_json)
      .def("hash", &RationalMap::hash);
  m.def("builtin_map_names", &builtin_map_names);

  py::class_<CodingScheme>(m, "CodingScheme")
      .def_property_readonly("alphabet_size", &CodingScheme::alphabet_size)
      .def_property_readonly("is_full_shift", [](const CodingScheme& c) { return c.kind() == CodingKind::FullShift; })
      .def("anchor", &CodingScheme::anchor)
      .def("describe", &CodingScheme::describe);
  m.def("detect_full_shift", &detect_full_shift);
  m.def("builtin_coding", &builtin_coding);

  py::class_<PrimitiveOrbit>(m, "PrimitiveOrbit")
      .def_readonly("period", &PrimitiveOrbit::period)
      .def_readonly("point", &PrimitiveOrbit::point)
      .def_readonly("multiplier", &PrimitiveOrbit::multiplier)
      .def_readonly("abs_multiplier", &PrimitiveOrbit::abs_multiplier)
      .def_readonly("holonomy", &PrimitiveOrbit::holonomy)
      .def_readonly("holonomy_angle", &PrimitiveOrbit::holonomy_angle);

  py::class_<OrbitDatabase>(m, "OrbitDatabase")
      .def_static(
          "build",
          [](const RationalMap& f, int n_max, const std::string& backend) {
            return OrbitDatabase::build(f, n_max, backend_from_string(backend));
          },
          py::arg("map"), py::arg("n_max"), py::arg("backend") = "symbolic")
      .def_static("load", &OrbitDatabase::load)
      .def("save", &OrbitDatabase::save)
      .def_property_readonly("n_max", &OrbitDatabase::n_max)
      .def_property_readonly("orbits", &OrbitDatabase::orbits)
      .def_property_readonly("kappa", &OrbitDatabase::kappa)
      .def_property_readonly("c0", &OrbitDatabase::c0)
      .def_property_readonly("horizon", &OrbitDatabase::horizon)
      .def("raw_count", &OrbitDatabase::raw_count)
      .def("primitive_count", &OrbitDatabase::primitive_count)
      .def("query_Nt", &OrbitDatabase::query_Nt)
      .def("csv", &OrbitDatabase::csv);
  m.def("necklace_count", &necklace_count);

  m.def("pressure_n", &pressure_n);
  m.def("delta_n", &delta_n);
  m.def(
      "estimate_delta",
      [](const OrbitDatabase& db, int n_min, int n_max) { return estimate_delta(db, n_min, n_max).delta; },
      py::arg("db"), py::arg("n_min"), py::arg("n_max"));
  m.def(
      "estimate_delta_eigen",
      [](const RationalMap& f, const CodingScheme& c, int depth) {
        return estimate_delta_eigen(TransferOperator(f, c, depth)).delta;
      },
      py::arg("map"), py::arg("coding"), py::arg("depth") = 10);
  m.def("li", &li);

  m.def("Z_n", &Z_n);
  m.def(
      "log_zeta",
      [](const OrbitDatabase& db, cplx s, int ell, int n_max) { return log_zeta_truncated(db, s, ell, n_max).log_zeta; },
      py::arg("db"), py::arg("s"), py::arg("ell") = 0, py::arg("n_max"));
  m.def("inverse_zeta_cycle", &inverse_zeta_cycle);

  py::class_<CountReport>(m, "CountReport")
      .def_readonly("t", &CountReport::t)
      .def_readonly("N_t", &CountReport::N_t)
      .def_readonly("li", &CountReport::li)
      .def_readonly("rel_error", &CountReport::rel_error)
      .def_readonly("beta_hat", &CountReport::beta_hat)
      .def_readonly("max_rel_error_top", &CountReport::max_rel_error_top);
  m.def("parse_t_grid", &parse_t_grid);
  m.def("count_report", &count_report);
  m.def(
      "weyl_sums",
      [](const OrbitDatabase& db, int ell_max, std::vector<double> t) {
        const auto w = weyl_report(db, ell_max, std::move(t));
        py::dict out;
        for (int ell = -ell_max; ell <= ell_max; ++ell) out[py::int_(ell)] = w.at(ell);
        return out;
      },
      py::arg("db"), py::arg("ell_max"), py::arg("t"));

  m.def(
      "nli_min_singular_value",
      [](const RationalMap& f, const CodingScheme& c, std::vector<int> w1, std::vector<int> w2) {
        return nli_probe(f, c, {std::move(w1)}, {std::move(w2)}, default_nli_grid(f, c)).min_singular_value;
      },
      py::arg("map"), py::arg("coding"), py::arg("word1") = std::vector<int>{0, 0, 0},
      py::arg("word2") = std::vector<int>{0, 1, 1});

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args, bool write) {
        std::ostringstream out, err;
        const auto r = run_cli(args, out, err, write);
        return py::make_tuple(r.exit_code, out.str(), err.str(), r.digests);
      },
      py::arg("args"), py::arg("write") = true);
}
