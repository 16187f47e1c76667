#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dyadic/bilinear.hpp"
#include "dyadic/errors.hpp"
#include "dyadic/grid_field.hpp"
#include "dyadic/harness.hpp"
#include "dyadic/littlewood_paley.hpp"
#include "dyadic/serialize.hpp"
#include "dyadic/spaces.hpp"

namespace py = pybind11;
using namespace dyadic;

namespace {

using CArray = py::array_t<cplx, py::array::c_style | py::array::forcecast>;

std::vector<py::ssize_t> shape_of(const Grid& g) {
  if (g.dim() == 1) return {g.resolution()};
  return {g.resolution(), g.resolution()};
}

CArray to_array(const Grid& g, std::span<const cplx> values) {
  CArray out(shape_of(g));
  std::copy(values.begin(), values.end(), out.mutable_data());
  return out;
}

std::vector<cplx> from_array(const Grid& g, const CArray& a) {
  if (static_cast<std::size_t>(a.size()) != g.size()) {
    throw PreconditionError("array has " + std::to_string(a.size()) + " entries, grid needs " +
                            std::to_string(g.size()));
  }
  return {a.data(), a.data() + a.size()};
}

}  // namespace

PYBIND11_MODULE(_dyadic, m) {
  m.doc() = "Littlewood-Paley blocks, function-space norms and bilinear multipliers on periodic grids";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<PreconditionError>(m, "PreconditionError", base.ptr());
  py::register_exception<NumericDomainError>(m, "NumericDomainError", base.ptr());
  py::register_exception<StructuralError>(m, "StructuralError", base.ptr());
  py::register_exception<ConvergenceError>(m, "ConvergenceError", base.ptr());

  py::class_<Grid>(m, "Grid")
      .def(py::init<int, int>(), py::arg("dim"), py::arg("resolution"))
      .def_property_readonly("dim", &Grid::dim)
      .def_property_readonly("resolution", &Grid::resolution)
      .def_property_readonly("j_max", &Grid::j_max)
      .def("__len__", &Grid::size)
      .def("__eq__", [](const Grid& a, const Grid& b) { return a == b; })
      .def("__repr__", [](const Grid& g) {
        return "Grid(dim=" + std::to_string(g.dim()) + ", resolution=" + std::to_string(g.resolution()) + ")";
      });

  py::class_<Field>(m, "Field")
      .def_static("from_samples",
                  [](const Grid& g, const CArray& a) { return Field::from_samples(g, from_array(g, a)); })
      .def_static("from_spectrum",
                  [](const Grid& g, const CArray& a) { return Field::from_spectrum(g, from_array(g, a)); })
      .def_static("mode",
                  [](const Grid& g, std::vector<int> k, cplx amp) {
                    IVec kv{0, 0};
                    for (std::size_t i = 0; i < k.size() && i < 2; ++i) kv[i] = k[i];
                    return Field::mode(g, kv, amp);
                  },
                  py::arg("grid"), py::arg("k"), py::arg("amplitude") = cplx{1.0, 0.0})
      .def_static("zero", &Field::zero)
      .def_static("from_json", [](const std::string& s) { return field_from_json(nlohmann::json::parse(s)); })
      .def_property_readonly("grid", &Field::grid)
      .def_property_readonly("samples", [](const Field& f) { return to_array(f.grid(), f.samples()); })
      .def_property_readonly("spectrum", [](const Field& f) { return to_array(f.grid(), f.spectrum()); })
      .def("refined", &Field::refined)
      .def("without_mean", &Field::without_mean)
      .def("to_json", [](const Field& f) { return field_to_json(f).dump(); })
      .def("__add__", [](const Field& a, const Field& b) { return a + b; })
      .def("__sub__", [](const Field& a, const Field& b) { return a - b; })
      .def("__rmul__", [](const Field& f, cplx c) { return c * f; });

  m.def("random_band_limited", &random_band_limited, py::arg("grid"), py::arg("radius_lo"),
        py::arg("radius_hi"), py::arg("seed"), py::arg("mean_zero") = true);
  m.def("l2_norm", &l2_norm);
  m.def("d_s", &d_s, py::arg("f"), py::arg("s"));
  m.def("j_s", &j_s, py::arg("f"), py::arg("s"));
  m.def("dilate_dyadic", &dilate_dyadic, py::arg("f"), py::arg("k"));

  py::class_<LPFamily>(m, "LPFamily")
      .def(py::init([](const Grid& g, double steepness) { return LPFamily::make({steepness}, g); }),
           py::arg("grid"), py::arg("steepness") = 0.5)
      .def_property_readonly("j_max", &LPFamily::j_max)
      .def("psi", &LPFamily::psi)
      .def("phi", &LPFamily::phi);
  m.def("delta_j", &delta_j, py::arg("f"), py::arg("j"), py::arg("family"));
  m.def("s_j", &s_j, py::arg("f"), py::arg("j"), py::arg("family"));

  m.def("norm",
        [](const Field& f, const std::string& space) {
          return dyadic::norm(f, harness::parse_space(space), LPFamily::make({}, f.grid()));
        },
        py::arg("f"), py::arg("space"), "Norm of f in a space literal such as \"TL(p=2, q=2, s=1)\".");
  m.def("apply_direct",
        [](const std::string& symbol, const Field& f, const Field& g) {
          return apply_direct(make_symbol(symbol), f, g);
        },
        py::arg("symbol"), py::arg("f"), py::arg("g"));
  m.def("paraproduct_coefficients",
        [](const std::string& symbol, const Grid& grid, int a_max, std::optional<int> decay) {
          const auto fam = LPFamily::make({}, grid);
          return coefficients_to_json(build_paraproduct(make_symbol(symbol), fam, decay, a_max)).dump();
        },
        py::arg("symbol"), py::arg("grid"), py::arg("a_max") = 4, py::arg("decay") = py::none());
  m.def("derivative_budget",
        [](int n, double p1, double p2, double p, double q, double tau1, double tau2) {
          return derivative_budget_value(n, p1, p2, p, q, tau1, tau2, BudgetSetting::tl);
        },
        py::arg("n"), py::arg("p1"), py::arg("p2"), py::arg("p"), py::arg("q"), py::arg("tau1") = 1.0,
        py::arg("tau2") = 1.0);

  m.def("run_config",
        [](const std::string& text, std::optional<std::uint64_t> seed, std::optional<int> grid,
           std::optional<int> dim) {
          std::vector<std::string> out;
          for (const auto& spec : harness::parse_config(text, {seed, grid, dim})) {
            py::gil_scoped_release release;
            out.push_back(harness::run(spec).to_json().dump());
          }
          return out;
        },
        py::arg("text"), py::arg("seed") = py::none(), py::arg("grid") = py::none(),
        py::arg("dim") = py::none(), "Run every experiment in a YAML config; returns JSON reports.");
}
