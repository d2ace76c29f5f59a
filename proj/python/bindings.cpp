#include <pybind11/eigen.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "certsurf/config.hpp"
#include "certsurf/export.hpp"
#include "certsurf/parser.hpp"
#include "certsurf/surface.hpp"
#include "certsurf/verify.hpp"

namespace py = pybind11;
using namespace certsurf;

namespace {

AnalyticSystem make_system(const std::vector<std::string>& equations, const std::vector<std::string>& variables) {
  RunConfig cfg;
  cfg.equations = equations;
  cfg.variables = variables;
  return cfg.build_system();
}

IntervalBox box_from_pairs(const std::vector<std::pair<double, double>>& sides) {
  IntervalBox b(sides.size());
  for (std::size_t i = 0; i < sides.size(); ++i) b[i] = Interval(sides[i].first, sides[i].second);
  return b;
}

py::list box_pairs(const IntervalBox& b) {
  py::list out;
  for (std::size_t i = 0; i < b.size(); ++i) out.append(py::make_tuple(b[i].lo(), b[i].hi()));
  return out;
}

py::dict record_dict(const BoxRecord& r) {
  py::dict d;
  d["id"] = r.id;
  d["V"] = r.V;
  d["box"] = box_pairs(r.local);
  d["center"] = Eigen::VectorXd(r.V * r.center());
  d["r"] = r.test.base_radii.maxCoeff();
  d["fiber_radius"] = r.test.fiber_radius;
  d["norm_K"] = r.norm_K;
  d["margin"] = r.margin;
  d["initial"] = r.color == ColorTag::initial;
  return d;
}

struct SurfaceResult {
  BoxFile file;
  SurfaceStats stats;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Certified interval box approximations (C++ core)";
  py::register_exception<Error>(m, "CertificationError");
  // Bad input is a ValueError, not a certification failure.
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ParseError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const ConfigError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  py::class_<Interval>(m, "Interval")
      .def(py::init<double>())
      .def(py::init<double, double>())
      .def_property_readonly("lo", &Interval::lo)
      .def_property_readonly("hi", &Interval::hi)
      .def("mid", &Interval::mid)
      .def("rad", &Interval::rad)
      .def("width", &Interval::width)
      .def("contains", &Interval::contains)
      .def(py::self + py::self)
      .def(py::self - py::self)
      .def(py::self * py::self)
      .def(py::self / py::self)
      .def(-py::self)
      .def("sqrt", [](const Interval& x) { return sqrt(x); })
      .def("__repr__", [](const Interval& x) {
        std::ostringstream s;
        s.precision(17);
        s << "Interval(" << x.lo() << ", " << x.hi() << ")";
        return s.str();
      });

  m.def(
      "parse_system",
      [](const std::string& source) {
        ParsedSystem ps = parse_system(source);
        std::vector<std::string> eqs;
        for (const auto& e : ps.equations) eqs.push_back(to_string(e, ps.variables));
        return py::make_tuple(ps.variables, eqs);
      },
      py::arg("source"), "Variables (in order) and printed equations of a system.");

  m.def(
      "krawczyk_test",
      [](const std::vector<std::string>& equations, const Eigen::VectorXd& center, const Eigen::VectorXd& base_radii,
         double fiber_radius, const Eigen::MatrixXd& A, double rho, const std::vector<std::string>& variables) {
        AnalyticSystem sys = make_system(equations, variables);
        KrawczykInput in;
        in.center = center;
        in.base_radii = base_radii;
        in.fiber_radius = fiber_radius;
        in.A = A;
        in.rho = rho;
        KrawczykCertificate c = krawczyk_test(sys, in);
        py::dict d;
        d["passed"] = c.passed;
        d["norm_K"] = c.norm_K;
        d["margin"] = c.margin;
        d["K"] = box_pairs(c.K);
        d["error"] = c.error;
        return d;
      },
      py::arg("equations"), py::arg("center"), py::arg("base_radii"), py::arg("fiber_radius"), py::arg("A"),
      py::arg("rho"), py::arg("variables") = std::vector<std::string>{},
      "Runs the interval Krawczyk test in world coordinates (last n-d coordinates are the fiber).");

  m.def(
      "graph_approximation",
      [](const std::vector<std::string>& equations, const std::vector<std::pair<double, double>>& base, double rho,
         int sheets, std::optional<std::vector<std::pair<double, double>>> fiber,
         std::optional<Eigen::VectorXd> seed, const std::vector<std::string>& variables) {
        AnalyticSystem sys = make_system(equations, variables);
        GraphOptions opt;
        opt.sheets = sheets;
        if (fiber) opt.fiber_search = box_from_pairs(*fiber);
        opt.fiber_seed = seed;
        py::list out;
        for (const auto& s : graph_approximation(sys, box_from_pairs(base), rho, opt)) {
          py::dict d;
          d["base"] = box_pairs(s.base);
          d["fiber"] = box_pairs(s.fiber);
          d["sheet"] = s.sheet_id;
          d["norm_K"] = s.certificate.norm_K;
          out.append(d);
        }
        return out;
      },
      py::arg("equations"), py::arg("base"), py::arg("rho"), py::arg("sheets") = 1, py::arg("fiber") = py::none(),
      py::arg("seed") = py::none(), py::arg("variables") = std::vector<std::string>{});

  py::class_<SurfaceResult>(m, "SurfaceResult")
      .def_property_readonly("truncated", [](const SurfaceResult& r) { return r.file.truncated; })
      .def_property_readonly("count", [](const SurfaceResult& r) { return r.file.records.size(); })
      .def_property_readonly("iterations", [](const SurfaceResult& r) { return r.stats.iterations; })
      .def_property_readonly("boxes",
                             [](const SurfaceResult& r) {
                               py::list out;
                               for (const auto& rec : r.file.records) out.append(record_dict(rec));
                               return out;
                             })
      .def("write_json", [](const SurfaceResult& r, const std::string& path) { write_json(r.file, path); })
      .def("write_obj", [](const SurfaceResult& r, const std::string& path) { write_obj(r.file, path); })
      .def("verify", [](const SurfaceResult& r) { return verify_box_file(r.file).ok(); });

  m.def(
      "approximate_surface",
      [](const std::vector<std::string>& equations, const Eigen::VectorXd& start, double r, double rho,
         std::optional<std::vector<std::pair<double, double>>> domain, std::optional<std::size_t> max_boxes,
         const std::vector<std::string>& variables) {
        AnalyticSystem sys = make_system(equations, variables);
        SurfaceOptions opt;
        opt.r = r;
        opt.rho = rho;
        if (domain) opt.domain = box_from_pairs(*domain);
        opt.max_boxes = max_boxes;
        SurfaceRun run = [&] {
          py::gil_scoped_release release;
          return certified_surface_approximation(sys, start, opt);
        }();
        return SurfaceResult{to_box_file(run), run.stats};
      },
      py::arg("equations"), py::arg("start"), py::arg("r") = 0.1, py::arg("rho") = 0.125,
      py::arg("domain") = py::none(), py::arg("max_boxes") = py::none(),
      py::arg("variables") = std::vector<std::string>{});

  m.def(
      "read_boxes",
      [](const std::string& path) {
        BoxFile f = read_json_file(path);
        py::list out;
        for (const auto& rec : f.records) out.append(record_dict(rec));
        return out;
      },
      py::arg("path"));

  m.def(
      "verify",
      [](const std::string& path) {
        VerifyReport rep = verify_box_file(read_json_file(path));
        py::list bad;
        for (const auto& c : rep.checks)
          if (!c.ok) bad.append(py::make_tuple(c.id, c.reason));
        return py::make_tuple(rep.ok(), bad);
      },
      py::arg("path"), "Re-runs every certificate in a box file; returns (ok, [(id, reason), ...]).");
}
