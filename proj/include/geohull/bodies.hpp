#pragma once

#include <variant>
#include <vector>

#include "geohull/geometry.hpp"
#include "geohull/hull.hpp"

namespace geohull {

// Geodesic ball about an ambient center. Spherical radii must stay below
// pi/2 so the body fits in an open hemisphere.
struct GeodesicBall {
    Vec center;
    double radius = 0.0;
};

// d=2 only: an ellipse in the body's chart, rotated by `angle`.
struct ChartEllipse {
    Eigen::Vector2d center{0.0, 0.0};
    double semi_a = 1.0;
    double semi_b = 1.0;
    double angle = 0.0;
};

// Convex chart polytope; the stored vertex list is canonicalized to its own
// hull (CCW ring for d=2).
struct ChartPolytope {
    std::vector<Vec> vertices;
};

// A geodesically convex test body. Chart shapes live in the gnomonic chart
// whose center is frame * e_{d+1}; for balls the frame is centered on the
// ball so the chart region is a round disk.
class ConvexBody {
public:
    ConvexBody(const Geometry& g, GeodesicBall ball);
    ConvexBody(const Geometry& g, ChartEllipse ell, Mat frame);
    ConvexBody(const Geometry& g, ChartPolytope poly, Mat frame);

    const Geometry& geom() const { return geom_; }
    const Mat& frame() const { return frame_; }
    const std::variant<GeodesicBall, ChartEllipse, ChartPolytope>& shape() const { return shape_; }

    bool is_ball() const { return std::holds_alternative<GeodesicBall>(shape_); }
    const GeodesicBall& ball() const { return std::get<GeodesicBall>(shape_); }
    const ChartEllipse& ellipse() const { return std::get<ChartEllipse>(shape_); }
    const ChartPolytope& polytope() const { return std::get<ChartPolytope>(shape_); }

    // Chart coordinates of an ambient point in the body frame.
    Vec to_chart(const Vec& x) const;
    Vec from_chart(const Vec& q) const;

    bool contains(const Vec& x) const;
    bool contains_chart(const Vec& q, double tol = 1e-12) const;

    // CCW chart polygon approximating (inscribing) the body region, d=2.
    std::vector<Eigen::Vector2d> chart_polygon(int segments = 2048) const;

    // Chart radius of a ball about the chart origin containing the region.
    double chart_outer_radius() const;

private:
    Geometry geom_;
    std::variant<GeodesicBall, ChartEllipse, ChartPolytope> shape_;
    Mat frame_;
    std::vector<FacetPlane> planes_;  // cached half-space description for polytopes
};

ConvexBody make_ball(const Geometry& g, const Vec& center, double radius);
ConvexBody make_chart_polytope(const Geometry& g, const std::vector<Vec>& vertices,
                               std::optional<Mat> frame = std::nullopt);
ConvexBody make_chart_ellipse(const Geometry& g, const ChartEllipse& ell, std::optional<Mat> frame = std::nullopt);

// Geodesic cap (center, radius) guaranteed to contain the body; exact for
// balls, min-enclosing-chart-ball preimage otherwise.
struct BoundingCap {
    Vec center;
    double radius;
};
BoundingCap bounding_cap(const ConvexBody& body);

// Spherical polar body K* = intersection of the hemispheres with poles in K,
// expressed in the chart centered at the antipode of K's circumcenter.
ConvexBody spherical_polar(const ConvexBody& body);

// Polar of a spherical polytope: vertices of the output are the outward
// facet poles of the input.
GeodesicPolytope polar_polytope(const GeodesicPolytope& p);

// Smallest enclosing Euclidean ball (Welzl), d in {2,3}.
std::pair<Vec, double> min_enclosing_ball(const std::vector<Vec>& pts);

}  // namespace geohull
