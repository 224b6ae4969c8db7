#include "geohull/bodies.hpp"

#include <algorithm>
#include <cmath>

#include "geohull/rng.hpp"

namespace geohull {

namespace {

std::pair<Vec, double> circumball(const std::vector<Vec>& support) {
    const int k = static_cast<int>(support.size());
    if (k == 0) return {Vec::Zero(2), -1.0};
    if (k == 1) return {support[0], 0.0};
    const int d = static_cast<int>(support[0].size());
    Mat v(d, k - 1);
    for (int i = 1; i < k; ++i) v.col(i - 1) = support[i] - support[0];
    Vec rhs(k - 1);
    for (int i = 1; i < k; ++i) rhs[i - 1] = 0.5 * (support[i].squaredNorm() - support[0].squaredNorm()) - v.col(i - 1).dot(support[0]);
    const Mat gram = v.transpose() * v;
    const Vec y = gram.ldlt().solve(rhs);
    Vec c = support[0] + v * y;
    return {c, (c - support[0]).norm()};
}

std::pair<Vec, double> welzl(std::vector<Vec>& pts, size_t n, std::vector<Vec> support, int max_support) {
    if (n == 0 || static_cast<int>(support.size()) == max_support) return circumball(support);
    auto [c, r] = welzl(pts, n - 1, support, max_support);
    if (r >= 0.0 && (pts[n - 1] - c).norm() <= r * (1.0 + 1e-12) + 1e-14) return {c, r};
    support.push_back(pts[n - 1]);
    auto res = welzl(pts, n - 1, std::move(support), max_support);
    // move-to-front keeps the expected recursion depth small
    Vec p = pts[n - 1];
    pts.erase(pts.begin() + static_cast<long>(n - 1));
    pts.insert(pts.begin(), p);
    return res;
}

Eigen::Vector4d cross4(const Eigen::Vector4d& a, const Eigen::Vector4d& b, const Eigen::Vector4d& c) {
    auto det3 = [](double a0, double a1, double a2, double b0, double b1, double b2, double c0, double c1,
                   double c2) { return a0 * (b1 * c2 - b2 * c1) - a1 * (b0 * c2 - b2 * c0) + a2 * (b0 * c1 - b1 * c0); };
    Eigen::Vector4d n;
    n[0] = det3(a[1], a[2], a[3], b[1], b[2], b[3], c[1], c[2], c[3]);
    n[1] = -det3(a[0], a[2], a[3], b[0], b[2], b[3], c[0], c[2], c[3]);
    n[2] = det3(a[0], a[1], a[3], b[0], b[1], b[3], c[0], c[1], c[3]);
    n[3] = -det3(a[0], a[1], a[2], b[0], b[1], b[2], c[0], c[1], c[2]);
    return n;
}

}  // namespace

std::pair<Vec, double> min_enclosing_ball(const std::vector<Vec>& pts) {
    if (pts.empty()) throw std::invalid_argument("min_enclosing_ball: no points");
    const int d = static_cast<int>(pts[0].size());
    std::vector<Vec> work = pts;
    // deterministic shuffle
    PhiloxRng rng(splitmix64(work.size()));
    for (size_t i = work.size(); i > 1; --i) std::swap(work[i - 1], work[rng.next_u64() % i]);
    return welzl(work, work.size(), {}, d + 1);
}

ConvexBody::ConvexBody(const Geometry& g, GeodesicBall ball) : geom_(g), shape_(std::move(ball)), frame_() {
    const auto& b = std::get<GeodesicBall>(shape_);
    if (b.radius <= 0.0) throw std::invalid_argument("GeodesicBall: radius must be positive");
    if (g.kind == Space::Spherical && b.radius >= M_PI / 2)
        throw std::invalid_argument("GeodesicBall: spherical radius must be < pi/2");
    check_ambient(g, b.center, 1e-9);
    frame_ = frame_to_point(g, b.center);
}

ConvexBody::ConvexBody(const Geometry& g, ChartEllipse ell, Mat frame) : geom_(g), shape_(std::move(ell)), frame_(std::move(frame)) {
    if (g.dim != 2) throw std::invalid_argument("ChartEllipse: d=2 only");
    const auto& e = std::get<ChartEllipse>(shape_);
    if (e.semi_a <= 0.0 || e.semi_b <= 0.0) throw std::invalid_argument("ChartEllipse: semi-axes must be positive");
    if (g.kind == Space::Hyperbolic && e.center.norm() + std::max(e.semi_a, e.semi_b) >= 1.0)
        throw std::invalid_argument("ChartEllipse: hyperbolic shape must lie inside the open unit ball");
}

ConvexBody::ConvexBody(const Geometry& g, ChartPolytope poly, Mat frame) : geom_(g), frame_(std::move(frame)) {
    auto& verts = poly.vertices;
    if (static_cast<int>(verts.size()) < g.dim + 1) throw std::invalid_argument("ChartPolytope: too few vertices");
    if (g.kind == Space::Hyperbolic)
        for (const auto& v : verts)
            if (v.norm() >= 1.0) throw std::invalid_argument("ChartPolytope: hyperbolic vertex outside the unit ball");
    // canonicalize: keep only extreme points, in hull order
    GeodesicPolytope h = convex_hull_chart(g, verts);
    ChartPolytope canon;
    canon.vertices = h.chart_vertices;
    for (int i = 0; i < h.num_facets(); ++i) planes_.push_back(facet_plane(h, i));
    shape_ = std::move(canon);
}

Vec ConvexBody::to_chart(const Vec& x) const { return gnomonic_forward(geom_, frame_inverse(geom_, frame_) * x); }

Vec ConvexBody::from_chart(const Vec& q) const { return frame_ * gnomonic_inverse(geom_, q); }

bool ConvexBody::contains_chart(const Vec& q, double tol) const {
    if (is_ball()) {
        const double cr = chart_radius(geom_, ball().radius);
        return q.norm() <= cr + tol;
    }
    if (std::holds_alternative<ChartEllipse>(shape_)) {
        const auto& e = ellipse();
        const double ca = std::cos(e.angle), sa = std::sin(e.angle);
        const double dx = q[0] - e.center[0], dy = q[1] - e.center[1];
        const double u = (ca * dx + sa * dy) / e.semi_a;
        const double v = (-sa * dx + ca * dy) / e.semi_b;
        return u * u + v * v <= 1.0 + tol;
    }
    for (const auto& pl : planes_)
        if (pl.normal.dot(q) - pl.offset > tol) return false;
    return true;
}

bool ConvexBody::contains(const Vec& x) const {
    if (is_ball()) return geodesic_distance(geom_, x, ball().center) <= ball().radius + 1e-12;
    const Vec y = frame_inverse(geom_, frame_) * x;
    if (geom_.kind == Space::Spherical && y[geom_.dim] <= 0.0) return false;
    return contains_chart(gnomonic_forward(geom_, y));
}

std::vector<Eigen::Vector2d> ConvexBody::chart_polygon(int segments) const {
    if (geom_.dim != 2) throw std::invalid_argument("chart_polygon: d=2 only");
    std::vector<Eigen::Vector2d> out;
    if (is_ball()) {
        const double cr = chart_radius(geom_, ball().radius);
        out.reserve(segments);
        for (int i = 0; i < segments; ++i) {
            const double a = 2.0 * M_PI * i / segments;
            out.emplace_back(cr * std::cos(a), cr * std::sin(a));
        }
    } else if (std::holds_alternative<ChartEllipse>(shape_)) {
        const auto& e = ellipse();
        const double ca = std::cos(e.angle), sa = std::sin(e.angle);
        out.reserve(segments);
        for (int i = 0; i < segments; ++i) {
            const double a = 2.0 * M_PI * i / segments;
            const double u = e.semi_a * std::cos(a), v = e.semi_b * std::sin(a);
            out.emplace_back(e.center[0] + ca * u - sa * v, e.center[1] + sa * u + ca * v);
        }
    } else {
        for (const auto& v : polytope().vertices) out.emplace_back(v[0], v[1]);
    }
    return out;
}

double ConvexBody::chart_outer_radius() const {
    if (is_ball()) return chart_radius(geom_, ball().radius);
    double m = 0.0;
    if (std::holds_alternative<ChartEllipse>(shape_)) {
        for (const auto& p : chart_polygon(4096)) m = std::max(m, p.norm());
    } else {
        for (const auto& v : polytope().vertices) m = std::max(m, v.norm());
    }
    return m;
}

ConvexBody make_ball(const Geometry& g, const Vec& center, double radius) { return ConvexBody(g, GeodesicBall{center, radius}); }

ConvexBody make_chart_polytope(const Geometry& g, const std::vector<Vec>& vertices, std::optional<Mat> frame) {
    return ConvexBody(g, ChartPolytope{vertices}, frame.value_or(Mat::Identity(g.dim + 1, g.dim + 1)));
}

ConvexBody make_chart_ellipse(const Geometry& g, const ChartEllipse& ell, std::optional<Mat> frame) {
    return ConvexBody(g, ell, frame.value_or(Mat::Identity(g.dim + 1, g.dim + 1)));
}

BoundingCap bounding_cap(const ConvexBody& body) {
    if (body.is_ball()) return {body.ball().center, body.ball().radius};
    std::vector<Vec> chart_pts;
    double margin = 0.0;
    if (std::holds_alternative<ChartEllipse>(body.shape())) {
        for (const auto& p : body.chart_polygon(4096)) {
            Vec v(2);
            v << p.x(), p.y();
            chart_pts.push_back(v);
        }
        margin = 1e-6;  // boundary sampling slack
    } else {
        chart_pts = body.polytope().vertices;
    }
    auto [c, r] = min_enclosing_ball(chart_pts);
    const Vec center = body.from_chart(c);
    double rad = 0.0;
    for (const auto& q : chart_pts) rad = std::max(rad, geodesic_distance(body.geom(), center, body.from_chart(q)));
    return {center, rad + margin};
}

namespace {

// Outward great-sphere poles of the facets of a spherical polytope:
// <pole, x> <= 0 for all x in the polytope.
std::vector<Vec> facet_poles(const GeodesicPolytope& p) {
    const int d = p.geom.dim;
    std::vector<Vec> amb(p.f0());
    Vec interior = Vec::Zero(d + 1);
    for (int i = 0; i < p.f0(); ++i) {
        amb[i] = p.ambient_vertex(i);
        interior += amb[i];
    }
    interior.normalize();
    std::vector<Vec> poles;
    poles.reserve(p.num_facets());
    for (const auto& f : p.facets) {
        Vec n;
        if (d == 2) {
            Eigen::Vector3d a(amb[f[0]][0], amb[f[0]][1], amb[f[0]][2]);
            Eigen::Vector3d b(amb[f[1]][0], amb[f[1]][1], amb[f[1]][2]);
            Eigen::Vector3d c = a.cross(b);
            n = Vec(3);
            n << c[0], c[1], c[2];
        } else {
            Eigen::Vector4d a(amb[f[0]][0], amb[f[0]][1], amb[f[0]][2], amb[f[0]][3]);
            Eigen::Vector4d b(amb[f[1]][0], amb[f[1]][1], amb[f[1]][2], amb[f[1]][3]);
            Eigen::Vector4d c(amb[f[2]][0], amb[f[2]][1], amb[f[2]][2], amb[f[2]][3]);
            Eigen::Vector4d m = cross4(a, b, c);
            n = Vec(4);
            n << m[0], m[1], m[2], m[3];
        }
        n.normalize();
        if (n.dot(interior) > 0.0) n = -n;
        poles.push_back(n);
    }
    return poles;
}

}  // namespace

GeodesicPolytope polar_polytope(const GeodesicPolytope& p) {
    if (p.geom.kind != Space::Spherical) throw std::invalid_argument("polar_polytope: spherical geometry only");
    if (p.f0() < p.geom.dim + 1) throw std::invalid_argument("polar_polytope: degenerate input");
    // The polar lies in the open hemisphere opposite any interior point of p,
    // so chart there; the mean of the poles themselves can be badly placed.
    Vec interior = Vec::Zero(p.geom.dim + 1);
    for (int i = 0; i < p.f0(); ++i) interior += p.ambient_vertex(i);
    interior.normalize();
    const Mat frame = rotation_to_pole(Vec(-interior));
    const Mat inv = frame_inverse(p.geom, frame);
    std::vector<Vec> chart;
    for (const auto& pole : facet_poles(p)) chart.push_back(gnomonic_forward(p.geom, inv * pole));
    GeodesicPolytope out = convex_hull_chart(p.geom, chart);
    out.frame = frame;
    return out;
}

ConvexBody spherical_polar(const ConvexBody& body) {
    const Geometry& g = body.geom();
    if (g.kind != Space::Spherical) throw std::invalid_argument("spherical_polar: spherical geometry only");
    if (body.is_ball()) {
        return make_ball(g, Vec(-body.ball().center), M_PI / 2 - body.ball().radius);
    }
    // polytope route (ellipses via boundary discretization)
    std::vector<Vec> ambient;
    if (std::holds_alternative<ChartEllipse>(body.shape())) {
        for (const auto& p : body.chart_polygon(4096)) {
            Vec v(2);
            v << p.x(), p.y();
            ambient.push_back(body.from_chart(v));
        }
    } else {
        for (const auto& v : body.polytope().vertices) ambient.push_back(body.from_chart(v));
    }
    const GeodesicPolytope hull = convex_hull(g, ambient);
    const std::vector<Vec> poles = facet_poles(hull);
    // chart at the antipode of the circumcenter (the dual-chart convention)
    const BoundingCap cap = bounding_cap(body);
    const Mat f = frame_to_point(g, Vec(-cap.center));
    std::vector<Vec> chart_verts;
    chart_verts.reserve(poles.size());
    for (const auto& p : poles) chart_verts.push_back(gnomonic_forward(g, frame_inverse(g, f) * p));
    return make_chart_polytope(g, chart_verts, f);
}

}  // namespace geohull
