#pragma once

#include <array>
#include <optional>
#include <vector>

#include "geohull/geometry.hpp"

namespace geohull {

// Convex hull of geodesic points, stored through its gnomonic chart. `frame`
// is the isometry taking the standard chart center e_{d+1} to the chart pole
// actually used (identity unless the point cloud sits away from e_{d+1}).
// Facets are vertex-index tuples: edges for d=2 (CCW order), triangles for
// d=3.
struct GeodesicPolytope {
    Geometry geom;
    Mat frame;
    std::vector<Vec> chart_vertices;
    std::vector<std::vector<int>> facets;
    std::vector<int> provenance;  // input indices realized as vertices

    int f0() const { return static_cast<int>(chart_vertices.size()); }
    int num_facets() const { return static_cast<int>(facets.size()); }

    Vec ambient_vertex(int i) const;
    Vec chart_of(const Vec& ambient) const;  // chart coordinates in this frame
};

struct DegenerateHullError : std::runtime_error {
    int affine_rank;
    explicit DegenerateHullError(int rank)
        : std::runtime_error("degenerate hull: affine rank " + std::to_string(rank)), affine_rank(rank) {}
};

GeodesicPolytope convex_hull(const Geometry& g, const std::vector<Vec>& points);

// Hull of points already given in chart coordinates (frame = identity).
GeodesicPolytope convex_hull_chart(const Geometry& g, const std::vector<Vec>& chart_points);

std::pair<int, int> f_vector(const GeodesicPolytope& p);

bool polytope_contains_chart(const GeodesicPolytope& p, const Vec& chart_point, double tol = 1e-10);

// Facets whose supporting chart hyperplane strictly separates x from the
// interior; points within 1e-12 of a hyperplane do not see it.
std::vector<int> visible_facets(const GeodesicPolytope& p, const Vec& x);

// d=2 area oracle: angle excess/defect for curved polygons, shoelace for the
// Euclidean chart.
double gauss_bonnet_area(const GeodesicPolytope& p);

// Outward chart half-space <n,q> <= off supporting a facet.
struct FacetPlane {
    Vec normal;
    double offset;
};
FacetPlane facet_plane(const GeodesicPolytope& p, int facet);

}  // namespace geohull
