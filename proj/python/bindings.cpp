#include <pybind11/complex.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "skewcert/cli.hpp"
#include "skewcert/expansion.hpp"
#include "skewcert/generators.hpp"
#include "skewcert/model_io.hpp"
#include "skewcert/render.hpp"
#include "skewcert/verifier.hpp"

namespace py = pybind11;
using namespace skewcert;

namespace {

WeightedComponent weighted(std::size_t n, const std::vector<std::pair<VertexIndex, VertexIndex>>& edges,
                           std::vector<double> weights) {
    for (const auto& [a, b] : edges) {
        if (a >= n || b >= n) throw py::value_error("edge endpoint out of range");
    }
    return make_weighted(Digraph::from_edges(n, edges), std::move(weights));
}

py::dict tier_dict(const TierOutcome& t) {
    py::dict d;
    d["tier"] = t.tier;
    d["component"] = t.component_id;
    d["vertices"] = t.vertex_count;
    d["edges"] = t.edge_count;
    d["max_L"] = t.max_L ? py::cast(*t.max_L) : py::none();
    d["L"] = t.certificate ? py::cast(t.certificate->L) : py::none();
    d["reason"] = t.reason;
    return d;
}

py::dict condition_dict(const ConditionOutcome& c) {
    static const char* names[] = {"validated", "vacuous", "failed"};
    py::dict d;
    d["status"] = names[static_cast<int>(c.status)];
    d["reason"] = c.reason;
    py::list tiers;
    for (const auto& t : c.tiers) tiers.append(tier_dict(t));
    d["tiers"] = tiers;
    return d;
}

}  // namespace

PYBIND11_MODULE(_skewcert, m) {
    m.doc() = "Box-chain models and Axiom A certificates for quadratic skew products";

    py::class_<Interval>(m, "Interval")
        .def(py::init<double, double>())
        .def(py::init<double>())
        .def_property_readonly("lo", &Interval::lo)
        .def_property_readonly("hi", &Interval::hi)
        .def("contains", py::overload_cast<double>(&Interval::contains, py::const_))
        .def("width", &Interval::width)
        .def(py::self + py::self)
        .def(py::self - py::self)
        .def(py::self * py::self)
        .def(-py::self)
        .def("__repr__", [](const Interval& x) {
            std::ostringstream s;
            s << x;
            return s.str();
        });
    m.def("sqr", &sqr);
    m.def("sqrt", py::overload_cast<const Interval&>(&skewcert::sqrt));

    py::class_<SkewMap>(m, "SkewMap")
        .def(py::init([](Complex a, Complex b, Complex c, Complex e) { return SkewMap{a, b, c, e}; }), py::arg("a") = 0.0,
             py::arg("b") = 0.0, py::arg("c") = 0.0, py::arg("e") = 0.0)
        .def_readwrite("a", &SkewMap::a)
        .def_readwrite("b", &SkewMap::b)
        .def_readwrite("c", &SkewMap::c)
        .def_readwrite("e", &SkewMap::e)
        .def("__repr__", [](const SkewMap& s) { return to_string(s); });
    m.def("parse_map", &parse_map_spec);
    m.def("escape_radii", [](const SkewMap& s, double margin) {
        const EscapeRadii r = escape_radii(s, margin);
        return py::make_tuple(r.r1, r.r2);
    }, py::arg("map"), py::arg("margin") = 0.1);

    py::class_<VerifyConfig>(m, "VerifyConfig")
        .def(py::init<>())
        .def_property("base_levels", [](const VerifyConfig& c) { return py::make_tuple(c.base.start, c.base.max); },
                      [](VerifyConfig& c, std::pair<int, int> r) { c.base = {r.first, r.second}; })
        .def_property("fiber_levels", [](const VerifyConfig& c) { return py::make_tuple(c.fiber.start, c.fiber.max); },
                      [](VerifyConfig& c, std::pair<int, int> r) { c.fiber = {r.first, r.second}; })
        .def_readwrite("L_base", &VerifyConfig::L_base)
        .def_readwrite("L_fiber", &VerifyConfig::L_fiber)
        .def_readwrite("delta", &VerifyConfig::delta)
        .def_readwrite("margin", &VerifyConfig::margin)
        .def_readwrite("R1", &VerifyConfig::R1)
        .def_readwrite("R2", &VerifyConfig::R2)
        .def_readwrite("max_boxes", &VerifyConfig::max_boxes)
        .def_readwrite("max_seconds", &VerifyConfig::max_seconds)
        .def_readwrite("threads", &VerifyConfig::threads);

    py::class_<AxiomAReport>(m, "AxiomAReport")
        .def_readonly("verified", &AxiomAReport::verified)
        .def_readonly("blocking", &AxiomAReport::blocking)
        .def_readonly("peak_boxes", &AxiomAReport::peak_boxes)
        .def_property_readonly("condition1", [](const AxiomAReport& r) { return condition_dict(r.condition1); })
        .def_property_readonly("condition2", [](const AxiomAReport& r) { return condition_dict(r.condition2); })
        .def_property_readonly("condition3", [](const AxiomAReport& r) { return condition_dict(r.condition3); })
        .def_property_readonly("base_model", [](const AxiomAReport& r) { return r.base_model; })
        .def_property_readonly("fiber_model", [](const AxiomAReport& r) { return r.fiber_model; })
        .def("text", &format_report);
    m.def("verify_axiom_a", &verify_axiom_a, py::call_guard<py::gil_scoped_release>());

    py::class_<ChainModel>(m, "ChainModel")
        .def_property_readonly("fibered", &ChainModel::is_fibered)
        .def_property_readonly("box_count", &ChainModel::box_count)
        .def_property_readonly("edge_count", &ChainModel::edge_count)
        .def_property_readonly("component_sizes", [](const ChainModel& cm) {
            std::vector<std::pair<std::size_t, std::size_t>> out;
            for (const auto& c : cm.components) out.emplace_back(c.vertex_count(), c.edge_count());
            return out;
        })
        .def_property_readonly("map", [](const ChainModel& cm) { return cm.provenance.map; })
        .def("serialize", &serialize_model)
        .def("__eq__", [](const ChainModel& a, const ChainModel& b) { return a == b; });
    m.def("parse_model", &parse_model);
    m.def("build_models", [](const SkewMap& s, const VerifyConfig& cfg) {
        BuiltModels b = build_models(s, cfg);
        return py::make_tuple(b.base, b.fiber);
    });

    m.def("solve_metric", [](std::size_t n, const std::vector<std::pair<VertexIndex, VertexIndex>>& edges,
                             std::vector<double> weights, double L) -> py::object {
        const MetricSolution sol = solve_metric(weighted(n, edges, std::move(weights)), L);
        if (sol.ok()) return py::cast(sol.phi);
        return py::none();
    }, "phi with phi[j] * w[k] >= L * phi[k] on every edge (k, j), or None");
    m.def("max_feasible_L", [](std::size_t n, const std::vector<std::pair<VertexIndex, VertexIndex>>& edges,
                               std::vector<double> weights) {
        return max_feasible_L(weighted(n, edges, std::move(weights)));
    });
    m.def("validate_certificate", [](std::size_t n, const std::vector<std::pair<VertexIndex, VertexIndex>>& edges,
                                     std::vector<double> weights, double L, const std::vector<double>& phi) {
        return validate_certificate(weighted(n, edges, std::move(weights)), L, phi);
    });

    m.def("gen_prop31", [](Complex c, double sigma) {
        const Prop31Result r = gen_prop31(c, sigma);
        return py::make_tuple(r.map, r.params.R, r.params.S);
    });
    m.def("gen_interpolating", &gen_interpolating);

    m.def("render_fiber", [](const ChainModel& cm, Complex z, int width, int height) {
        RenderSpec spec;
        spec.z_point = z;
        spec.width = width;
        spec.height = height;
        const FiberImage img = render_fiber(cm, spec);
        return py::make_tuple(py::bytes(img.ppm()), img.components);
    }, py::arg("model"), py::arg("z"), py::arg("width") = 256, py::arg("height") = 256);

    m.def("run_cli", [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = run_cli(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
    });

    py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);
    py::register_exception<RenderError>(m, "RenderError", PyExc_ValueError);
    py::register_exception<GeneratorError>(m, "GeneratorError", PyExc_RuntimeError);
    py::register_exception<ZeroWeightError>(m, "ZeroWeightError", PyExc_ValueError);
}
