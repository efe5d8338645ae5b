#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "occutime/bessel.hpp"
#include "occutime/chain.hpp"
#include "occutime/closed_form.hpp"
#include "occutime/error.hpp"
#include "occutime/simulate.hpp"
#include "occutime/spectral.hpp"
#include "occutime/transforms.hpp"

namespace py = pybind11;
using namespace occutime;

namespace {

std::vector<double> grid_or_default(std::optional<std::vector<double>> grid,
                                    double t, std::size_t points) {
  return grid ? *grid : cosine_grid(t, points);
}

py::array_t<double> as_array(const std::vector<double>& v) {
  return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Occupation-time laws of continuous-time Markov chains";

  static PyObject* error_type =
      PyErr_NewException("occutime.OccutimeError", PyExc_RuntimeError, nullptr);
  m.attr("OccutimeError") = py::reinterpret_borrow<py::object>(error_type);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::reinterpret_borrow<py::object>(error_type)(e.what());
      exc.attr("code") = std::string(to_string(e.code()));
      PyErr_SetObject(error_type, exc.ptr());
    }
  });

  m.def("bessel_i", py::overload_cast<int, double>(&bessel_i), py::arg("n"),
        py::arg("z"));
  m.def("bessel_i_scaled", py::overload_cast<int, double>(&bessel_i_scaled),
        py::arg("n"), py::arg("z"), "exp(-z) I_n(z)");

  py::class_<GeneratorMatrix>(m, "Generator")
      .def(py::init(&GeneratorMatrix::validate), py::arg("rates"))
      .def_static("two_state", &two_state_generator, py::arg("lam"), py::arg("mu"))
      .def_static("three_state", &three_state_generator, py::arg("gamma1"),
                  py::arg("gamma2"), py::arg("beta1"), py::arg("beta2"))
      .def_static(
          "equal_rate",
          [](double r, std::size_t n) {
            return truncate_birth_death(BirthDeathSpec::equal_rate(r), n);
          },
          py::arg("r"), py::arg("n") = 400)
      .def_static(
          "birth_death",
          [](std::vector<double> birth, std::vector<double> death, std::size_t n) {
            return truncate_birth_death(
                BirthDeathSpec::from_lists(std::move(birth), std::move(death), n), n);
          },
          py::arg("birth"), py::arg("death"), py::arg("n"))
      .def_property_readonly("size", &GeneratorMatrix::size)
      .def_property_readonly("rates", &GeneratorMatrix::rates)
      .def("exit_rate", &GeneratorMatrix::exit_rate, py::arg("state"))
      .def("__len__", &GeneratorMatrix::size);

  py::class_<OccupationDensity>(m, "Density")
      .def_readonly("t", &OccupationDensity::t)
      .def_readonly("atom", &OccupationDensity::atom_at_t)
      .def_property_readonly("grid", [](const OccupationDensity& d) { return as_array(d.grid); })
      .def_property_readonly("values", [](const OccupationDensity& d) { return as_array(d.values); })
      .def("__call__", &OccupationDensity::continuous_at, py::arg("x"))
      .def("cdf", &OccupationDensity::cdf, py::arg("x"))
      .def("mass", &OccupationDensity::mass)
      .def("mean", &OccupationDensity::mean)
      .def("trapezoid_mass", &OccupationDensity::trapezoid_mass);

  m.def("h", &h_value, py::arg("q"), py::arg("s"));
  m.def("excursion", &excursion_value, py::arg("q"), py::arg("s"));
  m.def("h_equal_rate", &h_equal_rate, py::arg("r"), py::arg("s"));
  m.def("h_three_state", &h_three_state, py::arg("gamma1"), py::arg("gamma2"),
        py::arg("beta1"), py::arg("beta2"), py::arg("s"), py::arg("exit_rate") = 0.0);
  m.def("occupation_mean", &occupation_mean, py::arg("q"), py::arg("t"));
  m.def("cosine_grid", [](double t, std::size_t n) { return as_array(cosine_grid(t, n)); },
        py::arg("t"), py::arg("n"));

  m.def("two_state_density_at", &two_state_density_at, py::arg("lam"),
        py::arg("mu"), py::arg("t"), py::arg("x"));
  m.def("two_state_density",
        py::overload_cast<double, double, double, std::size_t>(&two_state_density),
        py::arg("lam"), py::arg("mu"), py::arg("t"),
        py::arg("points") = kDefaultGridPoints);
  m.def("equal_rate_density_at", &equal_rate_bd_density_at, py::arg("r"),
        py::arg("t"), py::arg("x"));
  m.def("equal_rate_density",
        py::overload_cast<double, double, std::size_t>(&equal_rate_bd_density),
        py::arg("r"), py::arg("t"), py::arg("points") = kDefaultGridPoints);
  m.def(
      "density_via_inversion",
      [](const GeneratorMatrix& q, double t, std::optional<std::vector<double>> grid,
         std::size_t points, int nodes) {
        return density_via_inversion(q, t, grid_or_default(grid, t, points), nodes);
      },
      py::arg("q"), py::arg("t"), py::arg("grid") = py::none(),
      py::arg("points") = kDefaultGridPoints, py::arg("nodes") = kDefaultTalbotNodes);

  m.def("invert_laplace", &invert_laplace, py::arg("transform"), py::arg("t"),
        py::arg("nodes") = kDefaultTalbotNodes,
        py::call_guard<py::gil_scoped_release>());
  m.def(
      "laplace_f0",
      [](const GeneratorMatrix& q, Complex s1, double x) {
        return laplace_f0(make_h_evaluator(q), s1, x);
      },
      py::arg("q"), py::arg("s1"), py::arg("x"));
  m.def(
      "fourier_laplace_f0",
      [](const GeneratorMatrix& q, Complex s1, double s2) {
        return fourier_laplace_f0(make_h_evaluator(q), s1, s2);
      },
      py::arg("q"), py::arg("s1"), py::arg("s2"));
  m.def(
      "survival_transform",
      [](const GeneratorMatrix& q, Complex s1, double x) {
        return survival_transform(make_h_evaluator(q), s1, x);
      },
      py::arg("q"), py::arg("s1"), py::arg("x"));

  py::class_<SimulationResult>(m, "Simulation")
      .def_property_readonly("samples", [](const SimulationResult& r) { return as_array(r.samples); })
      .def_readonly("n", &SimulationResult::n)
      .def_readonly("seed", &SimulationResult::seed)
      .def_readonly("t", &SimulationResult::t)
      .def_readonly("atom_fraction", &SimulationResult::atom_fraction)
      .def_readonly("mean", &SimulationResult::mean)
      .def_readonly("variance", &SimulationResult::variance)
      .def_readonly("histogram", &SimulationResult::histogram)
      .def("standard_error", &SimulationResult::standard_error);
  m.def(
      "monte_carlo",
      [](const GeneratorMatrix& q, double t, std::size_t n, std::uint64_t seed,
         std::size_t start, unsigned workers) {
        return monte_carlo(q, start, t, n, seed, workers);
      },
      py::arg("q"), py::arg("t"), py::arg("n"), py::arg("seed"),
      py::arg("start") = 0, py::arg("workers") = 0,
      py::call_guard<py::gil_scoped_release>());
  m.def("ks_distance", &ks_distance, py::arg("sample"), py::arg("density"));
  m.def("ks_two_sample", &ks_two_sample, py::arg("a"), py::arg("b"));

  py::class_<SpectralData>(m, "SpectralMeasure")
      .def_readonly("support", &SpectralData::support)
      .def_readonly("weights", &SpectralData::weights)
      .def_readonly("moments", &SpectralData::moments)
      .def_readonly("support_bound", &SpectralData::support_bound)
      .def("cauchy", &cauchy_transform, py::arg("s"));
  m.def(
      "spectral_measure",
      [](double r, std::size_t n, std::size_t moment_order) {
        return discrete_spectral_measure(BirthDeathSpec::equal_rate(r), n, moment_order);
      },
      py::arg("r"), py::arg("n"), py::arg("moment_order") = 12,
      "Spectral measure of the n-level equal-rate truncation.");
  m.def("moments", &moments, py::arg("q"), py::arg("jmax"));

  py::class_<BesselSeries>(m, "BesselSeries")
      .def(py::init<const GeneratorMatrix&, std::size_t>(), py::arg("q"),
           py::arg("order") = kDefaultSeriesOrder)
      .def("survival", &BesselSeries::survival, py::arg("t"), py::arg("x"))
      .def("density", &BesselSeries::density, py::arg("t"), py::arg("x"))
      .def_property_readonly("order", &BesselSeries::order);
}
