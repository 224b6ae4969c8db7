#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "geohull/io.hpp"
#include "geohull/measure.hpp"
#include "geohull/montecarlo.hpp"

namespace py = pybind11;
using namespace geohull;

namespace {

Geometry make_geometry(const std::string& kind, int dim) {
    Space s;
    if (kind == "spherical")
        s = Space::Spherical;
    else if (kind == "hyperbolic")
        s = Space::Hyperbolic;
    else if (kind == "euclidean")
        s = Space::Euclidean;
    else
        throw std::invalid_argument("geometry must be spherical|hyperbolic|euclidean");
    return Geometry{s, dim};
}

py::dict summary_to_dict(const EstimatorSummary& s) {
    py::dict d;
    d["model"] = s.model;
    d["statistic"] = s.statistic;
    d["n"] = s.n;
    d["mean"] = s.mean;
    d["var"] = s.variance;
    d["stderr_mean"] = s.stderr_mean;
    d["stderr_var"] = s.stderr_var;
    d["replications"] = s.replications;
    d["seed"] = s.seed;
    return d;
}

}  // namespace

PYBIND11_MODULE(_geohull, m) {
    m.doc() = "Random polytopes in spherical, hyperbolic and Euclidean convex bodies";

    py::class_<Geometry>(m, "Geometry")
        .def(py::init(&make_geometry), py::arg("kind"), py::arg("dim"))
        .def_property_readonly("dim", [](const Geometry& g) { return g.dim; })
        .def_property_readonly("kind", [](const Geometry& g) {
            switch (g.kind) {
                case Space::Spherical: return "spherical";
                case Space::Hyperbolic: return "hyperbolic";
                default: return "euclidean";
            }
        });

    py::class_<GeodesicPolytope>(m, "GeodesicPolytope")
        .def_property_readonly("f0", &GeodesicPolytope::f0)
        .def_property_readonly("num_facets", &GeodesicPolytope::num_facets)
        .def_property_readonly("chart_vertices", [](const GeodesicPolytope& p) { return p.chart_vertices; })
        .def_property_readonly("facets", [](const GeodesicPolytope& p) { return p.facets; })
        .def("ambient_vertex", &GeodesicPolytope::ambient_vertex)
        .def("volume", [](const GeodesicPolytope& p) { return polytope_volume(p).value; });

    py::class_<ConvexBody>(m, "ConvexBody")
        .def_property_readonly("geometry", &ConvexBody::geom)
        .def("contains", &ConvexBody::contains)
        .def("volume", [](const ConvexBody& b) { return body_volume(b); });

    m.def("gnomonic_forward", &gnomonic_forward, py::arg("geometry"), py::arg("x"));
    m.def("gnomonic_inverse", &gnomonic_inverse, py::arg("geometry"), py::arg("p"));
    m.def("chart_density", &chart_density, py::arg("geometry"), py::arg("p"));
    m.def("geodesic_distance", &geodesic_distance, py::arg("geometry"), py::arg("x"), py::arg("y"));
    m.def("geodesic_ball_volume", &geodesic_ball_volume, py::arg("geometry"), py::arg("r"));

    m.def("make_ball", &make_ball, py::arg("geometry"), py::arg("center"), py::arg("radius"));
    m.def(
        "make_chart_polytope",
        [](const Geometry& g, const std::vector<Vec>& verts) { return make_chart_polytope(g, verts); },
        py::arg("geometry"), py::arg("vertices"));
    m.def("body_from_json", [](const std::string& text) { return body_from_json(nlohmann::json::parse(text)); });

    m.def("convex_hull", &convex_hull, py::arg("geometry"), py::arg("points"));
    m.def(
        "sample_uniform",
        [](const ConvexBody& body, long long n, std::uint64_t seed) {
            PhiloxRng rng(seed);
            return sample_uniform(body, n, rng);
        },
        py::arg("body"), py::arg("n"), py::arg("seed"));
    m.def(
        "sample_circumscribed",
        [](const ConvexBody& body, long long n, std::uint64_t seed) {
            PhiloxRng rng(seed);
            return sample_circumscribed(body, n, rng);
        },
        py::arg("body"), py::arg("n"), py::arg("seed"));

    m.def(
        "cap_volume",
        [](const ConvexBody& body, const Vec& normal, double offset) {
            return cap_volume(body, CapCut{normal, offset});
        },
        py::arg("body"), py::arg("normal"), py::arg("offset"));
    m.def(
        "cap_offset_for_volume",
        [](const ConvexBody& body, const Vec& normal, double target) {
            return cap_offset_for_volume(body, normal, target);
        },
        py::arg("body"), py::arg("normal"), py::arg("target"));
    m.def("floating_body", &floating_body_2d, py::arg("body"), py::arg("t"), py::arg("n_dirs") = 2048);
    m.def("wet_part_volume", &wet_part_volume, py::arg("body"), py::arg("t"), py::arg("n_dirs") = 2048);
    m.def(
        "cap_cover",
        [](const ConvexBody& body, double t, double lambda, std::uint64_t seed) {
            const CapCover cover = cap_cover_2d(body, t, lambda);
            verify_cap_cover(body, cover, seed);
            py::dict d;
            d["m"] = cover.caps.size();
            d["t"] = cover.t;
            d["lambda"] = cover.lambda;
            d["threshold_flagged"] = cover.threshold_flagged;
            return d;
        },
        py::arg("body"), py::arg("t"), py::arg("lambda") = 6.0, py::arg("seed") = 0);
    m.def(
        "mean_width_u1",
        [](const ConvexBody& body, long long samples, std::uint64_t seed) {
            const MeanWidthEstimate e = mean_width_u1(body, samples, seed);
            return py::make_tuple(e.estimate, e.stderror);
        },
        py::arg("body"), py::arg("samples"), py::arg("seed"));
    m.def("spherical_polar", &spherical_polar, py::arg("body"));
    m.def("polar_polytope", &polar_polytope, py::arg("polytope"));

    m.def(
        "run_experiment",
        [](const std::string& config_json, int threads) {
            const ParsedConfig cfg = parse_config(config_json);
            py::list out;
            for (const auto& s : run_experiment(cfg.sim, threads)) out.append(summary_to_dict(s));
            return out;
        },
        py::arg("config_json"), py::arg("threads") = 0);
    m.def(
        "fit_scaling",
        [](const std::vector<std::pair<double, double>>& pts) {
            const ScalingFit f = fit_scaling(pts);
            py::dict d;
            d["slope"] = f.slope;
            d["intercept"] = f.intercept;
            d["ci95"] = f.ci95;
            d["residual_rms"] = f.residual_rms;
            d["points"] = f.points;
            return d;
        },
        py::arg("points"));

    m.attr("__version__") = kVersion;
}
