#include <optional>
#include <string>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "warpgeo/charts.hpp"
#include "warpgeo/connect.hpp"
#include "warpgeo/serialize.hpp"
#include "warpgeo/task.hpp"

namespace py = pybind11;
using namespace warpgeo;

namespace {

py::object to_python(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

Mat stack(const std::vector<Vec>& rows) {
    if (rows.empty()) return Mat(0, 0);
    Mat m(static_cast<Eigen::Index>(rows.size()), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
    return m;
}

IntegratorConfig integrator(int steps, double tolerance) {
    IntegratorConfig cfg{steps, tolerance};
    cfg.validate();
    return cfg;
}

std::optional<dsl::Expr> parse_optional(const std::optional<std::string>& f) {
    if (!f) return std::nullopt;
    return dsl::parse(*f, 1);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Riemannian geodesics of warped products g1 - k g2";

    static py::exception<Error> base(m, "WarpgeoError");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::object exc = py::reinterpret_borrow<py::object>(base.ptr())(e.what());
            exc.attr("kind") = e.kind();
            exc.attr("validation") = e.is_validation();
            exc.attr("payload") = to_python(to_json(e));
            PyErr_SetObject(base.ptr(), exc.ptr());
        }
    });

    py::class_<dsl::Expr>(m, "Expression")
        .def_property_readonly("dim", &dsl::Expr::dim)
        .def("value", [](const dsl::Expr& e, const std::vector<double>& p) { return e.value(p); })
        .def("gradient",
             [](const dsl::Expr& e, const std::vector<double>& p) {
                 const auto j = e.eval2(p);
                 Vec g(e.dim());
                 for (int i = 0; i < e.dim(); ++i) g[i] = j.d(i);
                 return g;
             })
        .def("hessian",
             [](const dsl::Expr& e, const std::vector<double>& p) {
                 const auto j = e.eval2(p);
                 Mat h(e.dim(), e.dim());
                 for (int a = 0; a < e.dim(); ++a)
                     for (int b = 0; b < e.dim(); ++b) h(a, b) = j.dd(a, b);
                 return h;
             })
        .def("__str__", &dsl::Expr::print);
    m.def("parse", [](const std::string& text, int dim) { return dsl::parse(text, dim); }, py::arg("text"),
          py::arg("dim"));

    py::class_<MetricChart>(m, "MetricChart")
        .def_property_readonly("name", &MetricChart::name)
        .def_property_readonly("dim", &MetricChart::dim)
        .def("metric", &MetricChart::metric_at, py::arg("p"))
        .def("contains", &MetricChart::contains, py::arg("p"))
        .def("sectional_curvature", &sectional_curvature, py::arg("p"), py::arg("e1"), py::arg("e2"));
    m.def("euclidean", &charts::euclidean, py::arg("dim"));
    m.def("poincare_half_space", &charts::poincare_half_space, py::arg("dim") = 2);
    m.def("poincare_ball", &charts::poincare_ball, py::arg("dim") = 2);
    m.def("sphere", &charts::sphere, py::arg("dim"), py::arg("radius") = 1.0);
    m.def("weighted_line", [](const std::string& f) { return charts::weighted_line(dsl::parse(f, 1)); },
          py::arg("f"));

    py::class_<WarpField>(m, "WarpField")
        .def(py::init([](const std::string& k, int dim, double k0, std::optional<double> K0) {
                 return WarpField::from_expression(dsl::parse(k, dim), k0, K0);
             }),
             py::arg("k"), py::arg("dim"), py::arg("k0"), py::arg("K0") = std::nullopt)
        .def_static("constant", &WarpField::constant, py::arg("dim"), py::arg("c"))
        .def_property_readonly("dim", &WarpField::dim)
        .def_property_readonly("k0", &WarpField::k0)
        .def_property_readonly("K0", &WarpField::K0)
        .def_property_readonly("k1", [](const WarpField& w) { return admissible_range(w).k1; })
        .def("value", &WarpField::value_at, py::arg("p"))
        .def("differential", &WarpField::differential_at, py::arg("p"));
    m.def("conformal_metric", &conformal_metric, py::arg("g1"), py::arg("w"), py::arg("r"));
    m.def(
        "sectional_curvature_Gr",
        [](const MetricChart& g1, const WarpField& w, double r, const Vec& p, const Vec& e1, const Vec& e2) {
            const auto [u, v] = orthonormalize(g1, p, e1, e2);
            return sectional_curvature_Gr(g1, w, r, p, {p, u}, {p, v});
        },
        py::arg("g1"), py::arg("w"), py::arg("r"), py::arg("p"), py::arg("e1"), py::arg("e2"));

    py::class_<Curve>(m, "Curve")
        .def_property_readonly("span", &Curve::span)
        .def_property_readonly("params", &Curve::params)
        .def_property_readonly("points", [](const Curve& c) { return stack(c.points()); })
        .def_property_readonly("velocities", [](const Curve& c) { return stack(c.velocities()); })
        .def("point_at", &Curve::point_at, py::arg("t"))
        .def("velocity_at", &Curve::velocity_at, py::arg("t"))
        .def("__len__", &Curve::size);

    m.def(
        "integrate_geodesic",
        [](const MetricChart& chart, const Vec& p0, const Vec& v0, int steps, double span) {
            return integrate_geodesic(chart, p0, v0, integrator(steps, 1e-5), span);
        },
        py::arg("chart"), py::arg("p0"), py::arg("v0"), py::arg("steps") = 1024, py::arg("span") = 1.0);
    m.def(
        "integrate_g_geodesic_oracle",
        [](const MetricChart& g1, const MetricChart& g2, const WarpField& w, const Vec& x0, const Vec& y0,
           const Vec& X, const Vec& Y, int steps) {
            const auto pair = integrate_g_geodesic_oracle(g1, g2, w, x0, y0, X, Y, integrator(steps, 1e-5));
            return py::make_tuple(pair.first, pair.second);
        },
        py::arg("g1"), py::arg("g2"), py::arg("w"), py::arg("x0"), py::arg("y0"), py::arg("X_tilde"),
        py::arg("Y_tilde"), py::arg("steps") = 1024);
    m.def(
        "residual_g_system",
        [](const MetricChart& g1, const MetricChart& g2, const WarpField& w, const Curve& gamma, const Curve& tau) {
            const auto r = residual_g_system(g1, g2, w, gamma, tau);
            return py::make_tuple(r.base, r.fiber);
        },
        py::arg("g1"), py::arg("g2"), py::arg("w"), py::arg("gamma"), py::arg("tau"));

    py::class_<RiemannianGeodesic>(m, "RiemannianGeodesic")
        .def_readonly("r", &RiemannianGeodesic::r)
        .def_readonly("mu", &RiemannianGeodesic::mu)
        .def_readonly("nu", &RiemannianGeodesic::nu)
        .def_readonly("gamma", &RiemannianGeodesic::gamma)
        .def_readonly("tau", &RiemannianGeodesic::tau)
        .def_readonly("a_r", &RiemannianGeodesic::a_r)
        .def_readonly("b_r", &RiemannianGeodesic::b_r)
        .def_readonly("X_tilde", &RiemannianGeodesic::X_tilde)
        .def_readonly("Y_tilde", &RiemannianGeodesic::Y_tilde)
        .def_property_readonly("residual", [](const RiemannianGeodesic& g) { return g.residual.max(); })
        .def("to_dict", [](const RiemannianGeodesic& g) { return to_python(to_json(g)); });
    m.def(
        "construct_riemannian_geodesic",
        [](const MetricChart& g1, const MetricChart& g2, const WarpField& w, double r, const Vec& x0, const Vec& X,
           const Vec& y0, const Vec& Y, int steps) {
            return construct_riemannian_geodesic(g1, g2, w, r, x0, X, y0, Y, integrator(steps, 1e-5));
        },
        py::arg("g1"), py::arg("g2"), py::arg("w"), py::arg("r"), py::arg("x0"), py::arg("X"), py::arg("y0"),
        py::arg("Y"), py::arg("steps") = 1024);
    m.def("classify_riemannian", &classify_riemannian, py::arg("g1"), py::arg("g2"), py::arg("w"), py::arg("x0"),
          py::arg("X_tilde"), py::arg("y0"), py::arg("Y_tilde"));

    py::class_<ShootingReport>(m, "ShootingReport")
        .def_readonly("method", &ShootingReport::method)
        .def_readonly("r", &ShootingReport::r)
        .def_readonly("beta", &ShootingReport::beta)
        .def_readonly("target_beta", &ShootingReport::target_beta)
        .def_readonly("endpoint_error", &ShootingReport::endpoint_error)
        .def_readonly("geodesic", &ShootingReport::geodesic)
        .def("to_dict", [](const ShootingReport& s) { return to_python(to_json(s)); });
    m.def(
        "beta_of_r",
        [](const MetricChart& g1, const WarpField& w, const Vec& x0, const Vec& x1, double r, int steps) {
            return to_python(to_json(beta_of_r(g1, w, x0, x1, r, integrator(steps, 1e-5))));
        },
        py::arg("g1"), py::arg("w"), py::arg("x0"), py::arg("x1"), py::arg("r"), py::arg("steps") = 1024);
    m.def(
        "connect_points",
        [](const MetricChart& g1, const MetricChart& g2, const WarpField& w, const Vec& x0, const Vec& y0,
           const Vec& x1, const Vec& y1, int steps) {
            return connect_points(g1, g2, w, x0, y0, x1, y1, integrator(steps, 1e-5));
        },
        py::arg("g1"), py::arg("g2"), py::arg("w"), py::arg("x0"), py::arg("y0"), py::arg("x1"), py::arg("y1"),
        py::arg("steps") = 1024);
    m.def(
        "flrw_connect",
        [](const WarpField& w, double t0, double t1, const MetricChart& g2, const Vec& y0, const Vec& y1,
           const std::optional<std::string>& f, int steps) {
            return flrw_connect(w, parse_optional(f), t0, t1, g2, y0, y1, integrator(steps, 1e-5));
        },
        py::arg("w"), py::arg("t0"), py::arg("t1"), py::arg("g2"), py::arg("y0"), py::arg("y1"),
        py::arg("f") = std::nullopt, py::arg("steps") = 1024);

    m.def(
        "run_task",
        [](const std::string& config) { return to_python(run_task(parse_task_config(config)).report); },
        py::arg("config"), "Runs a task configuration given as JSON text and returns its report.");
}
