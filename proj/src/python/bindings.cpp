#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fbreg/cli/config.hpp"
#include "fbreg/cli/runner.hpp"
#include "fbreg/error.hpp"
#include "fbreg/grid.hpp"
#include "fbreg/kernel.hpp"
#include "fbreg/metrics.hpp"
#include "fbreg/profiles.hpp"

namespace py = pybind11;

namespace {

py::array_t<double> grid_values(const fbreg::GridFunction& g) {
  std::vector<py::ssize_t> shape(g.extents().begin(), g.extents().end());
  py::array_t<double> out(shape);
  std::copy(g.values().begin(), g.values().end(), out.mutable_data());
  return out;
}

fbreg::KernelSpec kernel_from(const std::string& text) {
  return fbreg::cli::build_kernel(fbreg::cli::parse_config(text).kernel);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Nonlocal obstacle problems: exponents, grid files and the experiment runner.";

  py::register_exception<fbreg::Error>(m, "FbregError", PyExc_RuntimeError);

  py::class_<fbreg::KernelSpec>(m, "Kernel")
      .def_property_readonly("s", &fbreg::KernelSpec::s)
      .def_property_readonly("dim", &fbreg::KernelSpec::dim)
      .def_property_readonly("symmetric", &fbreg::KernelSpec::symmetric)
      .def_property_readonly("drift", &fbreg::KernelSpec::drift);

  m.def("fractional_laplacian", &fbreg::fractional_laplacian, py::arg("dim"), py::arg("s"),
        py::arg("drift") = std::vector<double>{});
  m.def("kernel_from_config", &kernel_from, py::arg("text"),
        "Kernel described by the [kernel] section of a config.");

  m.def(
      "symbol",
      [](const fbreg::KernelSpec& k, std::vector<double> e, double magnitude) {
        const auto sym = fbreg::symbol(k, e, magnitude);
        return py::make_tuple(sym.A, sym.B);
      },
      py::arg("kernel"), py::arg("e"), py::arg("magnitude") = 1.0, "(A, B) at magnitude * e");
  m.def(
      "gamma_critical",
      [](const fbreg::KernelSpec& k, std::vector<double> e, double v) {
        return fbreg::gamma_critical(k, e, v);
      },
      py::arg("kernel"), py::arg("e"), py::arg("v"));
  m.def(
      "gamma_elliptic",
      [](const fbreg::KernelSpec& k, std::vector<double> e) { return fbreg::gamma_elliptic(k, e); },
      py::arg("kernel"), py::arg("e"));
  m.def("gamma_drift", &fbreg::gamma_drift, py::arg("b_norm"));

  m.def(
      "fit_power_law",
      [](std::vector<double> x, std::vector<double> y) {
        const auto f = fbreg::fit_power_law(x, y);
        return py::make_tuple(f.slope, f.r2);
      },
      py::arg("x"), py::arg("y"), "(slope, r2) of log y against log x");

  py::class_<fbreg::GridFunction>(m, "Grid")
      .def_property_readonly("values", &grid_values)
      .def_property_readonly("h", &fbreg::GridFunction::h)
      .def_property_readonly("dt", &fbreg::GridFunction::dt)
      .def_property_readonly("s", &fbreg::GridFunction::s)
      .def_property_readonly("origin", &fbreg::GridFunction::origin)
      .def_property_readonly("extents", &fbreg::GridFunction::extents)
      .def_property_readonly("has_time", &fbreg::GridFunction::has_time);
  m.def(
      "read_grid", [](const std::string& path) { return fbreg::read_grid(path); },
      py::arg("path"));
  m.def(
      "holder_seminorm",
      [](const fbreg::GridFunction& g, double beta, double s) {
        return fbreg::parabolic_holder_seminorm(g, beta, s).value;
      },
      py::arg("grid"), py::arg("beta"), py::arg("s"));

  m.def(
      "canonical_config",
      [](const std::string& text) {
        return fbreg::cli::serialize_config(fbreg::cli::parse_config(text));
      },
      py::arg("text"), "Parse a config and return its canonical text.");
  m.def(
      "config_hash",
      [](const std::string& text) {
        return fbreg::cli::config_hash(fbreg::cli::parse_config(text));
      },
      py::arg("text"));
  m.def(
      "run",
      [](const std::string& text, const std::string& out_dir) {
        const auto r = fbreg::cli::run(fbreg::cli::parse_config(text), {out_dir});
        py::dict d;
        d["summary"] = r.summary;
        d["base"] = r.base;
        d["csv"] = r.csv;
        d["files"] = r.files;
        return d;
      },
      py::arg("text"), py::arg("out_dir") = ".",
      "Run a config; returns summary, base name, CSV text and written files.");
}
