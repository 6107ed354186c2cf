#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>

#include "holodyn/error.hpp"
#include "report_json.hpp"

namespace py = pybind11;
using namespace holodyn;

namespace {

// Results travel as JSON and come out as plain dicts and lists.
py::object to_python(const Json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

Json from_python(const py::object& o) {
  return Json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

TruncatedGerm germ_from_terms(std::size_t dim, int trunc, const std::vector<std::tuple<std::size_t, std::vector<int>, cplx>>& terms) {
  std::vector<GermTerm> t;
  for (const auto& [j, alpha, v] : terms) t.push_back({j, MultiIndex(alpha), v});
  return make_germ(dim, trunc, t);
}

MultiplierTuple tuple_from(const std::vector<cplx>& values, const std::optional<std::vector<std::optional<std::pair<int, int>>>>& angles) {
  MultiplierTuple m = MultiplierTuple::from_values(values);
  if (angles) {
    if (angles->size() != values.size()) fail(ErrorKind::DimensionMismatch, "exact_angles needs one entry per multiplier");
    for (std::size_t i = 0; i < values.size(); ++i)
      if ((*angles)[i]) m.exact_angles[i] = Angle{(*angles)[i]->first, (*angles)[i]->second}.reduced();
  }
  return m;
}

DoubleDouble theta_from(const py::object& theta) {
  if (py::isinstance<py::str>(theta)) return parse_theta(theta.cast<std::string>());
  return DoubleDouble(theta.cast<double>());
}

OrbitParams orbit_params(int n_max, double r_escape, double r_attract, int s_confirm) {
  OrbitParams p;
  p.n_max = n_max;
  p.r_escape = r_escape;
  p.r_attract = r_attract;
  p.s_confirm = s_confirm;
  return p;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Formal germs, normal forms, small divisors, parabolic and blow-up tools, orbit sampling";
  m.attr("__version__") = HOLODYN_VERSION;

  static py::exception<DomainError> error(m, "HolodynError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const DomainError& e) {
      py::object exc = py::reinterpret_borrow<py::object>(error.ptr())(e.what());
      exc.attr("kind") = std::string(error_kind_name(e.kind()));
      PyErr_SetObject(error.ptr(), exc.ptr());
    }
  });

  py::class_<TruncatedGerm>(m, "Germ")
      .def(py::init(&germ_from_terms), py::arg("dim"), py::arg("trunc"), py::arg("terms"),
           "terms: (component, alpha, coefficient) with 0-based components")
      .def_static("from_json", [](const py::object& o) { return germ_from_json(from_python(o)); })
      .def_static("read", [](const std::string& path) { return read_germ(path); })
      .def("to_json", [](const TruncatedGerm& f) { return to_python(germ_to_json(f)); })
      .def_property_readonly("dim", &TruncatedGerm::dim)
      .def_property_readonly("trunc", &TruncatedGerm::trunc)
      .def("coeff", [](const TruncatedGerm& f, std::size_t j, const std::vector<int>& alpha) {
        return f.component(j).coeff(MultiIndex(alpha));
      })
      .def("__call__", [](const TruncatedGerm& f, const std::vector<cplx>& z) { return f.evaluate(z); })
      .def("restricted", &TruncatedGerm::restricted)
      .def("with_exact_angles", [](const TruncatedGerm& f, const std::vector<std::optional<std::pair<int, int>>>& a) {
        std::vector<std::optional<Angle>> angles;
        for (const auto& x : a) angles.emplace_back(x ? std::optional<Angle>(Angle{x->first, x->second}) : std::nullopt);
        return f.with_exact_angles(std::move(angles));
      })
      .def("__repr__", [](const TruncatedGerm& f) {
        return "<Germ dim=" + std::to_string(f.dim()) + " trunc=" + std::to_string(f.trunc()) + ">";
      });

  m.def("compose", py::overload_cast<const TruncatedGerm&, const TruncatedGerm&>(&compose), py::arg("outer"), py::arg("inner"));
  m.def("invert", &invert);
  m.def("multipliers", [](const TruncatedGerm& f) { return multipliers(f).values; });

  m.def(
      "poincare_dulac", [](const TruncatedGerm& f) {
        const auto r = poincare_dulac(f);
        py::dict d = to_python(cli::normalization_to_json(r));
        d["normal_form_germ"] = r.normal_form;
        d["conjugacy_germ"] = r.conjugacy;
        return d;
      },
      "Normal form G, conjugacy H with F∘H = H∘G, residual and resonant support");
  m.def("linearize_formal", [](const TruncatedGerm& f) -> py::object {
    auto r = linearize_formal(f);
    if (auto* h = std::get_if<TruncatedGerm>(&r)) return py::cast(*h);
    return py::none();
  });

  m.def(
      "find_resonances",
      [](const std::vector<cplx>& values, int degree, const std::optional<std::vector<std::optional<std::pair<int, int>>>>& angles) {
        return to_python(cli::resonance_table_to_json(find_resonances(tuple_from(values, angles), degree)));
      },
      py::arg("values"), py::arg("degree"), py::arg("exact_angles") = py::none());

  m.def(
      "continued_fraction",
      [](const py::object& theta, int depth) { return to_python(cli::continued_fraction_to_json(continued_fraction(theta_from(theta), depth))); },
      py::arg("theta"), py::arg("depth") = 30, "theta as a float or a string (decimal or p/q)");
  m.def(
      "brjuno_sum_cf",
      [](const py::object& theta, int depth, bool weak) { return to_python(cli::brjuno_to_json(brjuno_sum_cf(theta_from(theta), depth, weak))); },
      py::arg("theta"), py::arg("depth") = 30, py::arg("weak") = false);
  m.def("sigma_sequence", &sigma_sequence, py::arg("d"), py::arg("n"));

  m.def("attracting_directions", [](const TruncatedGerm& f) {
    const auto ds = attracting_directions_1d(f);
    return py::make_tuple(ds.k, ds.a, ds.attracting, ds.repelling);
  });
  m.def(
      "petal_membership", [](cplx z, int k, int j, double radius, double theta) { return petal_membership(z, {k, j, radius, theta}); },
      py::arg("z"), py::arg("k"), py::arg("j"), py::arg("radius"), py::arg("theta"));
  m.def("petal_radius", &petal_radius);
  m.def(
      "fatou_coordinate",
      [](const TruncatedGerm& f, cplx z, int n_max, double tol) {
        const auto v = fatou_coordinate(f, z, n_max, tol);
        return py::make_tuple(v.value, v.error);
      },
      py::arg("germ"), py::arg("z"), py::arg("n_max") = 100000, py::arg("tol") = kTolAbel);
  m.def("characteristic_directions", [](const TruncatedGerm& f) { return to_python(cli::chardir_to_json(characteristic_directions(f))); });

  m.def(
      "lift_germ",
      [](const TruncatedGerm& f, const std::vector<std::size_t>& center, std::size_t chart) {
        return lift_germ(f, make_chart(f.dim(), center, chart));
      },
      py::arg("germ"), py::arg("center"), py::arg("chart"), "center and chart are 0-based coordinate indices");

  m.def(
      "leau_fatou_asymptotics",
      [](const std::function<cplx(cplx)>& f, cplx z0, int k, int n_max) {
        const auto e = leau_fatou_asymptotics(f, z0, k, n_max);
        return py::dict(py::arg("v_last") = e.v_last, py::arg("v_mean") = e.v_mean, py::arg("direction") = e.direction,
                        py::arg("spread") = e.spread);
      },
      py::arg("f"), py::arg("z0"), py::arg("k"), py::arg("n_max"));
  m.def(
      "iterate_orbit",
      [](const TruncatedGerm& f, const std::vector<cplx>& z0, int n_max, double r_escape, double r_attract, int s_confirm, bool points) {
        auto p = orbit_params(n_max, r_escape, r_attract, s_confirm);
        p.keep_points = points;
        return to_python(cli::orbit_to_json(iterate_orbit(as_point_map(f), z0, p), points));
      },
      py::arg("germ"), py::arg("z0"), py::arg("n_max") = 1000, py::arg("r_escape") = 100.0, py::arg("r_attract") = 1e-8,
      py::arg("s_confirm") = 3, py::arg("points") = false);
  m.def(
      "basin_grid",
      [](const TruncatedGerm& f, std::array<double, 4> window, int nx, int ny, std::size_t axis, std::vector<cplx> fixed, int n_max,
         double r_escape, double r_attract, int s_confirm, unsigned threads) {
        SliceSpec slice;
        slice.axis = axis;
        slice.fixed = fixed.empty() ? Point(f.dim(), 0.0) : std::move(fixed);
        BasinGrid g;
        {
          py::gil_scoped_release release;
          g = basin_grid(as_point_map(f), window, nx, ny, slice, orbit_params(n_max, r_escape, r_attract, s_confirm), {}, threads);
        }
        py::array_t<std::uint8_t> codes({ny, nx});
        py::array_t<int> steps({ny, nx});
        std::memcpy(codes.mutable_data(), g.cells.data(), g.cells.size());
        std::memcpy(steps.mutable_data(), g.steps.data(), g.steps.size() * sizeof(int));
        return py::make_tuple(codes, steps);
      },
      py::arg("germ"), py::arg("window"), py::arg("nx"), py::arg("ny"), py::arg("axis") = 0, py::arg("fixed") = std::vector<cplx>{},
      py::arg("n_max") = 1000, py::arg("r_escape") = 100.0, py::arg("r_attract") = 1e-8, py::arg("s_confirm") = 3,
      py::arg("threads") = 0u,
      "Codes: 0 escaped, 1 attracted, 2 undecided; row 0 is the top of the window");
}
