#include "geohull/measure.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>

#include "geohull/quadrature.hpp"
#include "geohull/rng.hpp"

namespace geohull {

namespace {

Eigen::Vector2d v2(const Vec& v) { return Eigen::Vector2d(v[0], v[1]); }

// ---- d=2 chart polygon machinery ----

double ring_area2(const ChartPolygon& poly) {
    double s = 0.0;
    const int m = static_cast<int>(poly.size());
    for (int i = 0; i < m; ++i) {
        const auto& a = poly[i];
        const auto& b = poly[(i + 1) % m];
        s += a.x() * b.y() - b.x() * a.y();
    }
    return s;
}

}  // namespace

ChartPolygon clip_polygon(const ChartPolygon& poly, const Eigen::Vector2d& normal, double offset) {
    // keeps the side <normal, q> >= offset
    ChartPolygon out;
    const int m = static_cast<int>(poly.size());
    if (m == 0) return out;
    for (int i = 0; i < m; ++i) {
        const Eigen::Vector2d& a = poly[i];
        const Eigen::Vector2d& b = poly[(i + 1) % m];
        const double da = normal.dot(a) - offset;
        const double db = normal.dot(b) - offset;
        if (da >= 0.0) out.push_back(a);
        if ((da > 0.0 && db < 0.0) || (da < 0.0 && db > 0.0)) {
            const double s = da / (da - db);
            out.push_back(a + s * (b - a));
        }
    }
    return out;
}

double polygon_lebesgue_area(const ChartPolygon& poly) { return 0.5 * std::abs(ring_area2(poly)); }

VolumeResult polygon_psi_volume(const Geometry& g, const ChartPolygon& poly, int order, bool refined) {
    VolumeResult r;
    const int m = static_cast<int>(poly.size());
    if (m < 3) return r;
    Eigen::Vector2d c(0.0, 0.0);
    for (const auto& p : poly) c += p;
    c /= m;
    for (int i = 0; i < m; ++i) {
        const Eigen::Vector2d& a = poly[i];
        const Eigen::Vector2d& b = poly[(i + 1) % m];
        if (refined) {
            auto [v, e] = integrate_triangle_psi_refined(g, c, a, b, order);
            r.value += v;
            r.error_bound += e;
        } else {
            r.value += integrate_triangle_psi(g, c, a, b, order);
        }
    }
    return r;
}

GeodesicPolytope polygon_to_polytope(const Geometry& g, const Mat& frame, const ChartPolygon& poly) {
    GeodesicPolytope p;
    p.geom = g;
    p.frame = frame;
    ChartPolygon ring = poly;
    if (ring_area2(ring) < 0.0) std::reverse(ring.begin(), ring.end());
    const int m = static_cast<int>(ring.size());
    for (int i = 0; i < m; ++i) {
        Vec v(2);
        v << ring[i].x(), ring[i].y();
        p.chart_vertices.push_back(v);
        p.facets.push_back({i, (i + 1) % m});
    }
    return p;
}

VolumeResult polytope_volume(const GeodesicPolytope& p) {
    const int d = p.geom.dim;
    if (p.f0() < d + 1) throw std::invalid_argument("polytope_volume: degenerate polytope");
    VolumeResult r;
    if (d == 2) {
        ChartPolygon ring;
        for (const auto& v : p.chart_vertices) ring.push_back(v2(v));
        return polygon_psi_volume(p.geom, ring);
    }
    if (d != 3) throw std::invalid_argument("polytope_volume: d in {2,3} only");
    Eigen::Vector3d c(0.0, 0.0, 0.0);
    for (const auto& v : p.chart_vertices) c += Eigen::Vector3d(v[0], v[1], v[2]);
    c /= p.f0();
    for (const auto& f : p.facets) {
        const Eigen::Vector3d a(p.chart_vertices[f[0]][0], p.chart_vertices[f[0]][1], p.chart_vertices[f[0]][2]);
        const Eigen::Vector3d b(p.chart_vertices[f[1]][0], p.chart_vertices[f[1]][1], p.chart_vertices[f[1]][2]);
        const Eigen::Vector3d e(p.chart_vertices[f[2]][0], p.chart_vertices[f[2]][1], p.chart_vertices[f[2]][2]);
        auto [v, err] = integrate_tet_psi_refined(p.geom, c, a, b, e);
        r.value += v;
        r.error_bound += err;
    }
    return r;
}

namespace {

// ---- ball cap volumes: slab integral with closed-form inner integral ----

// width function w(x) = integral of psi over the slab {first coord = x} of a
// chart ball of radius R.
double ball_slab_width(const Geometry& g, double R, double x) {
    const double y0sq = std::max(R * R - x * x, 0.0);
    const double y0 = std::sqrt(y0sq);
    if (g.dim == 2) {
        switch (g.kind) {
            case Space::Spherical:
                return 2.0 * y0 / ((1.0 + x * x) * std::sqrt(1.0 + R * R));
            case Space::Hyperbolic:
                return 2.0 * y0 / ((1.0 - x * x) * std::sqrt(1.0 - R * R));
            case Space::Euclidean:
                return 2.0 * y0;
        }
    } else if (g.dim == 3) {
        switch (g.kind) {
            case Space::Spherical:
                return M_PI * (1.0 / (1.0 + x * x) - 1.0 / (1.0 + R * R));
            case Space::Hyperbolic:
                return M_PI * (1.0 / (1.0 - R * R) - 1.0 / (1.0 - x * x));
            case Space::Euclidean:
                return M_PI * y0sq;
        }
    }
    throw std::invalid_argument("ball cap volume: d in {2,3} only");
}

double ball_cap_volume(const Geometry& g, double R, double a) {
    if (a >= R) return 0.0;
    a = std::max(a, -R);
    // substitute x = R sin(phi) to absorb the sqrt endpoint behaviour
    const double lo = std::asin(std::clamp(a / R, -1.0, 1.0));
    return integrate_1d([&](double phi) { return ball_slab_width(g, R, R * std::sin(phi)) * R * std::cos(phi); }, lo,
                        M_PI / 2, 96);
}

// ---- ellipse cap volumes via the unit-disk parametrization ----

struct EllipseMap {
    Eigen::Vector2d center;
    Eigen::Matrix2d m;  // ellipse = center + m * (unit disk)
    double jac;
};

EllipseMap ellipse_map(const ChartEllipse& e) {
    EllipseMap em;
    em.center = e.center;
    const double ca = std::cos(e.angle), sa = std::sin(e.angle);
    em.m << ca * e.semi_a, -sa * e.semi_b, sa * e.semi_a, ca * e.semi_b;
    em.jac = e.semi_a * e.semi_b;
    return em;
}

// integral of f over {w in unit disk : <e1, w> >= a} after rotating the disk
// so the cut normal is +x.
double disk_slab_integral(const std::function<double(const Eigen::Vector2d&)>& f, const Eigen::Vector2d& nhat,
                          double a, int order_x = 96, int order_y = 40) {
    if (a >= 1.0) return 0.0;
    a = std::max(a, -1.0);
    Eigen::Matrix2d q;
    q << nhat.x(), -nhat.y(), nhat.y(), nhat.x();
    const double lo = std::asin(std::clamp(a, -1.0, 1.0));
    return integrate_1d(
        [&](double phi) {
            const double x = std::sin(phi), y0 = std::cos(phi);
            const double inner = integrate_1d([&](double y) { return f(q * Eigen::Vector2d(x, y)); }, -y0, y0, order_y);
            return inner * y0;  // dx = cos(phi) dphi
        },
        lo, M_PI / 2, order_x);
}

double ellipse_cap_volume(const Geometry& g, const ChartEllipse& e, const Eigen::Vector2d& n, double off,
                          bool lebesgue = false) {
    const EllipseMap em = ellipse_map(e);
    const Eigen::Vector2d nprime = em.m.transpose() * n;
    const double nn = nprime.norm();
    const double a = (off - n.dot(em.center)) / nn;
    const int d = g.dim;
    return disk_slab_integral(
        [&](const Eigen::Vector2d& w) {
            const Eigen::Vector2d p = em.center + em.m * w;
            return em.jac * (lebesgue ? 1.0 : chart_density_norm2(g, p.squaredNorm(), d));
        },
        nprime / nn, a);
}

ChartPolygon body_ring(const ConvexBody& body, int segments = 1024) { return body.chart_polygon(segments); }

// d=3 polytope clipped by a chart half-space: kept vertices plus edge
// crossings, re-hulled.
double polytope3_cap_volume(const ConvexBody& body, const CapCut& cut) {
    const auto& verts = body.polytope().vertices;
    GeodesicPolytope h = convex_hull_chart(body.geom(), verts);
    std::vector<Vec> pts;
    for (const auto& v : h.chart_vertices)
        if (cut.normal.dot(v) - cut.offset >= 0.0) pts.push_back(v);
    if (pts.empty()) return 0.0;
    const bool all_in = pts.size() == h.chart_vertices.size();
    if (!all_in) {
        std::set<std::pair<int, int>> edges;
        for (const auto& f : h.facets)
            for (int e = 0; e < 3; ++e) {
                int a = f[e], b = f[(e + 1) % 3];
                if (a > b) std::swap(a, b);
                edges.insert({a, b});
            }
        for (auto [a, b] : edges) {
            const double da = cut.normal.dot(h.chart_vertices[a]) - cut.offset;
            const double db = cut.normal.dot(h.chart_vertices[b]) - cut.offset;
            if ((da > 0.0 && db < 0.0) || (da < 0.0 && db > 0.0)) {
                const double s = da / (da - db);
                pts.push_back(h.chart_vertices[a] + s * (h.chart_vertices[b] - h.chart_vertices[a]));
            }
        }
    }
    if (pts.size() < 4) return 0.0;
    GeodesicPolytope clipped;
    try {
        clipped = convex_hull_chart(body.geom(), pts);
    } catch (const DegenerateHullError&) {
        return 0.0;
    }
    clipped.frame = body.frame();
    return polytope_volume(clipped).value;
}

}  // namespace

double body_volume(const ConvexBody& body) {
    if (body.is_ball()) return geodesic_ball_volume(body.geom(), body.ball().radius);
    if (std::holds_alternative<ChartEllipse>(body.shape())) {
        Eigen::Vector2d n(1.0, 0.0);
        return ellipse_cap_volume(body.geom(), body.ellipse(), n, -2.0 * body.chart_outer_radius() - 1.0);
    }
    if (body.geom().dim == 2) {
        ChartPolygon ring;
        for (const auto& v : body.polytope().vertices) ring.push_back(v2(v));
        return polygon_psi_volume(body.geom(), ring).value;
    }
    GeodesicPolytope h = convex_hull_chart(body.geom(), body.polytope().vertices);
    h.frame = body.frame();
    return polytope_volume(h).value;
}

double cap_volume(const ConvexBody& body, const CapCut& cut, int order) {
    const Geometry& g = body.geom();
    if (body.is_ball()) {
        const double R = chart_radius(g, body.ball().radius);
        const double nn = cut.normal.norm();
        return ball_cap_volume(g, R, cut.offset / nn);
    }
    if (std::holds_alternative<ChartEllipse>(body.shape())) {
        const double nn = cut.normal.norm();
        return ellipse_cap_volume(g, body.ellipse(), v2(cut.normal) / nn, cut.offset / nn);
    }
    if (g.dim == 3) return polytope3_cap_volume(body, cut);
    ChartPolygon ring;
    for (const auto& v : body.polytope().vertices) ring.push_back(v2(v));
    ChartPolygon clipped = clip_polygon(ring, v2(cut.normal), cut.offset);
    if (order > 0) return polygon_psi_volume(g, clipped, order, false).value;
    return polygon_psi_volume(g, clipped).value;
}

double cap_chart_area(const ConvexBody& body, const CapCut& cut) {
    const Geometry& g = body.geom();
    if (g.dim != 2) throw std::invalid_argument("cap_chart_area: d=2 only");
    if (body.is_ball()) {
        const double R = chart_radius(g, body.ball().radius);
        const double a = std::clamp(cut.offset / cut.normal.norm(), -R, R);
        const double th = std::acos(a / R);
        return R * R * (th - std::sin(th) * std::cos(th));
    }
    if (std::holds_alternative<ChartEllipse>(body.shape())) {
        const double nn = cut.normal.norm();
        return ellipse_cap_volume(g, body.ellipse(), v2(cut.normal) / nn, cut.offset / nn, /*lebesgue=*/true);
    }
    ChartPolygon ring;
    for (const auto& v : body.polytope().vertices) ring.push_back(v2(v));
    return polygon_lebesgue_area(clip_polygon(ring, v2(cut.normal), cut.offset));
}

double cap_offset_for_volume(const ConvexBody& body, const Vec& normal, double target, double rel_tol, int order) {
    const double R = body.chart_outer_radius() * (1.0 + 1e-9);
    double lo = -R, hi = R;  // cap volume decreases from Vol(K) to 0 over [lo, hi]
    CapCut cut{normal, lo};
    if (target > cap_volume(body, cut, order) * (1.0 + 1e-12))
        throw std::runtime_error("cap_offset_for_volume: target volume exceeds the body volume (non-bracketing)");
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        cut.offset = mid;
        const double v = cap_volume(body, cut, order);
        if (std::abs(v - target) <= rel_tol * target || hi - lo < 1e-15) return mid;
        if (v > target)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

namespace {

// halfplane {<n,q> <= a} as a directed line for the sorted-angle intersection
struct HalfPlane {
    Eigen::Vector2d n;
    double a;
};

Eigen::Vector2d line_intersect(const HalfPlane& h1, const HalfPlane& h2) {
    const double det = h1.n.x() * h2.n.y() - h1.n.y() * h2.n.x();
    return Eigen::Vector2d((h1.a * h2.n.y() - h2.a * h1.n.y()) / det, (h1.n.x() * h2.a - h2.n.x() * h1.a) / det);
}

bool excludes(const HalfPlane& h, const Eigen::Vector2d& p) { return h.n.dot(p) > h.a + 1e-15; }

// intersection of halfplanes with strictly increasing normal angles spanning
// a full turn; returns an empty polygon when the intersection is empty.
ChartPolygon intersect_halfplanes(const std::vector<HalfPlane>& hps) {
    std::deque<HalfPlane> dq;
    auto back_bad = [&](const HalfPlane& h) {
        return dq.size() >= 2 && excludes(h, line_intersect(dq[dq.size() - 2], dq[dq.size() - 1]));
    };
    auto front_bad = [&](const HalfPlane& h) { return dq.size() >= 2 && excludes(h, line_intersect(dq[0], dq[1])); };
    for (const auto& h : hps) {
        while (back_bad(h)) dq.pop_back();
        while (front_bad(h)) dq.pop_front();
        dq.push_back(h);
    }
    while (dq.size() >= 3 && excludes(dq.front(), line_intersect(dq[dq.size() - 2], dq[dq.size() - 1]))) dq.pop_back();
    while (dq.size() >= 3 && excludes(dq.back(), line_intersect(dq[0], dq[1]))) dq.pop_front();
    ChartPolygon out;
    if (dq.size() < 3) return out;
    for (size_t i = 0; i < dq.size(); ++i) {
        const Eigen::Vector2d p = line_intersect(dq[i], dq[(i + 1) % dq.size()]);
        out.push_back(p);
    }
    // reject spurious unbounded/inverted results
    for (const auto& p : out)
        for (const auto& h : dq)
            if (h.n.dot(p) > h.a + 1e-9) return ChartPolygon{};
    return out;
}

}  // namespace

GeodesicPolytope floating_body_2d(const ConvexBody& body, double t, int n_dirs) {
    const Geometry& g = body.geom();
    if (g.dim != 2) throw std::invalid_argument("floating_body_2d: d=2 only");
    if (t <= 0.0) throw std::invalid_argument("floating_body_2d: t must be positive");
    GeodesicPolytope empty;
    empty.geom = g;
    empty.frame = body.frame();
    const double vol = body_volume(body);
    if (t >= vol) return empty;
    std::vector<HalfPlane> hps;
    hps.reserve(n_dirs);
    const bool heavy = !body.is_ball() && std::holds_alternative<ChartPolytope>(body.shape());
    const int order = heavy ? 10 : 0;
    for (int k = 0; k < n_dirs; ++k) {
        const double phi = 2.0 * M_PI * k / n_dirs;
        Vec n(2);
        n << std::cos(phi), std::sin(phi);
        const double a = cap_offset_for_volume(body, n, t, 1e-6, order);
        hps.push_back({v2(n), a});
    }
    ChartPolygon poly = intersect_halfplanes(hps);
    if (poly.size() < 3) return empty;
    return polygon_to_polytope(g, body.frame(), poly);
}

double wet_part_volume(const ConvexBody& body, double t, int n_dirs) {
    const double vol = body_volume(body);
    GeodesicPolytope fb = floating_body_2d(body, t, n_dirs);
    if (fb.f0() == 0) return vol;
    const double w = vol - polytope_volume(fb).value;
    return std::max(w, 0.0);
}

CapCover cap_cover_2d(const ConvexBody& body, double t, double lambda) {
    const Geometry& g = body.geom();
    if (g.dim != 2) throw std::invalid_argument("cap_cover_2d: d=2 only");
    const double vol = body_volume(body);
    const double hard = vol * std::pow(2.0 * g.dim, -2.0 * g.dim);
    if (t <= 0.0 || t >= hard) throw std::invalid_argument("cap_cover_2d: t must satisfy 0 < t < Vol(K)/(2d)^{2d}");
    CapCover cover;
    cover.t = t;
    cover.lambda = lambda;
    if (g.kind == Space::Spherical) {
        const double rk = bounding_cap(body).radius;
        cover.threshold_flagged = t >= hard * std::pow(std::cos(rk), g.dim + 1);
    }

    const bool heavy = !body.is_ball();
    const int order = heavy ? 10 : 0;
    auto offset_for = [&](double phi, double target) {
        Vec n(2);
        n << std::cos(phi), std::sin(phi);
        return cap_offset_for_volume(body, n, target, 1e-4, order);
    };
    ChartPolygon ring = body_ring(body);
    Eigen::Vector2d c0(0.0, 0.0);
    for (const auto& p : ring) c0 += p;
    c0 /= static_cast<double>(ring.size());

    auto overlap_volume = [&](double phi1, double a1, double phi2, double a2) {
        ChartPolygon r = clip_polygon(ring, Eigen::Vector2d(std::cos(phi1), std::sin(phi1)), a1);
        r = clip_polygon(r, Eigen::Vector2d(std::cos(phi2), std::sin(phi2)), a2);
        return polygon_psi_volume(g, r, 10, false).value;
    };

    // march anchors around the boundary: consecutive volume-t caps must
    // overlap in volume >= t/2 (target 0.55 t)
    std::vector<double> anchors;
    std::vector<double> offs_t;
    double phi = 0.0;
    double a_prev = offset_for(phi, t);
    anchors.push_back(phi);
    offs_t.push_back(a_prev);
    double step_guess = 0.2;
    while (true) {
        double lo = 0.0, hi = step_guess;
        // expand until the overlap drops below target
        while (hi < 2.0 * M_PI) {
            const double a2 = offset_for(phi + hi, t);
            if (overlap_volume(phi, a_prev, phi + hi, a2) < 0.55 * t) break;
            hi *= 2.0;
        }
        for (int it = 0; it < 40 && hi - lo > 1e-4 * hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double a2 = offset_for(phi + mid, t);
            if (overlap_volume(phi, a_prev, phi + mid, a2) >= 0.55 * t)
                lo = mid;
            else
                hi = mid;
        }
        const double step = std::max(lo, 1e-4);
        if (phi + step >= 2.0 * M_PI) break;
        phi += step;
        a_prev = offset_for(phi, t);
        anchors.push_back(phi);
        offs_t.push_back(a_prev);
        step_guess = step;
        if (anchors.size() > 100000) throw std::runtime_error("cap_cover_2d: marching failed to terminate");
    }

    const int m = static_cast<int>(anchors.size());
    std::vector<Eigen::Vector2d> normals(m);
    for (int i = 0; i < m; ++i) {
        normals[i] = Eigen::Vector2d(std::cos(anchors[i]), std::sin(anchors[i]));
        Vec n(2);
        n << normals[i].x(), normals[i].y();
        const double a_big = cap_offset_for_volume(body, n, std::min(lambda * t, 0.45 * vol), 1e-4, order);
        cover.caps.push_back({n, a_big});
    }
    // inner witnesses: partition the union of the volume-t caps by largest cut
    // margin, so every overlap lens is split along its equal-margin line. The
    // cells are convex, pairwise disjoint, and each stays inside its own t-cap
    // (hence inside the wet part and the dilated cap). Cells starved below t/4
    // by deep-margined neighbours (thin edge slabs of polytope bodies) are
    // dropped; at least a quarter of the caps must keep their witness.
    const double shrink = 1e-9;
    for (int i = 0; i < m; ++i) {
        ChartPolygon inner = clip_polygon(ring, normals[i], offs_t[i] + shrink);
        for (int j = 0; j < m && !inner.empty(); ++j) {
            if (j == i) continue;
            const Eigen::Vector2d dn = normals[i] - normals[j];
            const double nn = dn.norm();
            if (nn < 1e-15) continue;
            inner = clip_polygon(inner, dn / nn, (offs_t[i] - offs_t[j] + shrink) / nn);
        }
        if (inner.empty()) continue;
        if (polygon_psi_volume(g, inner, 10, false).value < 0.25 * t * (1.0 + 1e-6)) continue;
        cover.inner_sets.push_back(inner);
        cover.inner_cuts.push_back({cover.caps[i].normal, offs_t[i]});
    }
    if (4 * cover.inner_sets.size() < cover.caps.size())
        throw std::runtime_error("cap_cover_2d: fewer than m/4 inner witnesses survived");
    return cover;
}

void verify_cap_cover(const ConvexBody& body, const CapCover& cover, std::uint64_t seed) {
    const Geometry& g = body.geom();
    const double t = cover.t;
    const int m = static_cast<int>(cover.caps.size());
    const int mp = static_cast<int>(cover.inner_sets.size());
    if (cover.inner_cuts.size() != cover.inner_sets.size())
        throw std::runtime_error("cap cover: inner cut/set count mismatch");
    if (mp > m || 4 * mp < m)
        throw std::runtime_error("cap cover: inner witness count outside [m/4, m]");
    auto in_cap = [&](int i, const Eigen::Vector2d& q, double tol) {
        return cover.caps[i].normal.dot(q) >= cover.caps[i].offset - tol;
    };

    // clause (ii): Vol(C_i) <= lambda*t, Vol(C'_i) >= t/4
    for (int i = 0; i < m; ++i) {
        const double vc = cap_volume(body, cover.caps[i], 10);
        if (vc > cover.lambda * t * 1.02)
            throw std::runtime_error("cap cover clause (ii) violated: cap volume exceeds lambda*t");
    }
    for (int i = 0; i < mp; ++i) {
        const double vi = polygon_psi_volume(g, cover.inner_sets[i], 10, false).value;
        if (vi < 0.25 * t) throw std::runtime_error("cap cover clause (ii) violated: inner set volume below t/4");
    }

    // pairwise disjoint inner sets
    for (int i = 0; i < mp; ++i) {
        for (int j = i + 1; j < mp; ++j) {
            ChartPolygon isect = cover.inner_sets[i];
            const auto& other = cover.inner_sets[j];
            const int mj = static_cast<int>(other.size());
            for (int k = 0; k < mj && !isect.empty(); ++k) {
                const Eigen::Vector2d& a = other[k];
                const Eigen::Vector2d& b = other[(k + 1) % mj];
                Eigen::Vector2d n(a.y() - b.y(), b.x() - a.x());  // inward for CCW
                const double nn = n.norm();
                if (nn < 1e-15) continue;
                n /= nn;
                isect = clip_polygon(isect, n, n.dot(a));
            }
            if (polygon_lebesgue_area(isect) > 1e-12)
                throw std::runtime_error("cap cover: inner sets not pairwise disjoint");
        }
    }

    GeodesicPolytope fb = floating_body_2d(body, t, 512);
    ChartPolygon fb_ring;
    for (const auto& v : fb.chart_vertices) fb_ring.push_back(v2(v));
    auto in_floating = [&](const Eigen::Vector2d& q, double tol) {
        if (fb_ring.size() < 3) return false;
        const int mm = static_cast<int>(fb_ring.size());
        for (int k = 0; k < mm; ++k) {
            const Eigen::Vector2d& a = fb_ring[k];
            const Eigen::Vector2d& b = fb_ring[(k + 1) % mm];
            if ((b.x() - a.x()) * (q.y() - a.y()) - (b.y() - a.y()) * (q.x() - a.x()) < -tol) return false;
        }
        return true;
    };

    // clause (i), outer half: wet-part samples are covered by the caps
    PhiloxRng rng(splitmix64(seed) ^ 0x1234567ULL);
    const double rout = body.chart_outer_radius();
    int wet_found = 0;
    for (int it = 0; it < 200000 && wet_found < 500; ++it) {
        const Eigen::Vector2d q(rng.uniform(-rout, rout), rng.uniform(-rout, rout));
        Vec qq(2);
        qq << q.x(), q.y();
        if (!body.contains_chart(qq)) continue;
        if (in_floating(q, 1e-9)) continue;
        ++wet_found;
        bool covered = false;
        for (int i = 0; i < m && !covered; ++i) covered = in_cap(i, q, 1e-9);
        if (!covered) throw std::runtime_error("cap cover clause (i) violated: wet-part point outside every cap");
    }

    // clause (i), inner half + clause (iv): inner sets sit in the wet part and
    // inside some cap. A point is in the wet part iff some half-space cut
    // through it has volume <= t; the witness direction is the anchor normal.
    const int wet_order = body.is_ball() ? 0 : 10;
    for (int i = 0; i < mp; ++i) {
        const Vec& wn = cover.inner_cuts[i].normal;
        for (const auto& q : cover.inner_sets[i]) {
            Vec qq(2);
            qq << q.x(), q.y();
            if (!body.contains_chart(qq, 1e-9))
                throw std::runtime_error("cap cover clause (i) violated: inner set leaves the body");
            const double cut = cap_volume(body, {wn, wn.dot(qq)}, wet_order);
            if (cut > t * (1.0 + 1e-3))
                throw std::runtime_error("cap cover clause (i) violated: inner set enters the floating body");
            bool inside = false;
            for (int k = 0; k < m && !inside; ++k) inside = in_cap(k, q, 1e-9);
            if (!inside) throw std::runtime_error("cap cover clause (iv) violated: inner set outside every cap");
        }
    }

    // clause (iii): random caps of volume <= t are contained in some C_i
    ChartPolygon ring = body.chart_polygon(1024);
    const bool heavy = !body.is_ball();
    const int order = heavy ? 10 : 0;
    for (int trial = 0; trial < 200; ++trial) {
        const double phi = rng.uniform(0.0, 2.0 * M_PI);
        const double s = t * std::max(rng.uniform(), 1e-3);
        Vec n(2);
        n << std::cos(phi), std::sin(phi);
        const double a = cap_offset_for_volume(body, n, s, 1e-3, order);
        ChartPolygon cap = clip_polygon(ring, v2(n), a);
        bool contained = false;
        for (int i = 0; i < m && !contained; ++i) {
            contained = true;
            for (const auto& q : cap)
                if (!in_cap(i, q, 1e-6)) {
                    contained = false;
                    break;
                }
        }
        if (!contained)
            throw std::runtime_error("cap cover clause (iii) violated: small cap not contained in any C_i");
    }
}

namespace {

struct SupportInterval {
    double lo, hi;
};

// range of <u, x> over the body, used for the great-hypersphere hit test
SupportInterval support_interval(const ConvexBody& body, const Vec& u) {
    if (body.is_ball()) {
        const double c = u.dot(body.ball().center) / u.norm();
        const double s = std::sin(body.ball().radius);
        const double co = std::cos(body.ball().radius);
        // extremes of cos(angle) over a cap: rotate by +-radius
        const double x = c * co;
        const double y = std::sqrt(std::max(1.0 - c * c, 0.0)) * s;
        return {x - y, x + y};
    }
    double lo = 1e300, hi = -1e300;
    std::vector<Vec> verts;
    if (std::holds_alternative<ChartEllipse>(body.shape())) {
        for (const auto& p : body.chart_polygon(512)) {
            Vec q(2);
            q << p.x(), p.y();
            verts.push_back(body.from_chart(q));
        }
    } else {
        for (const auto& v : body.polytope().vertices) verts.push_back(body.from_chart(v));
    }
    for (const auto& v : verts) {
        const double d = u.dot(v);
        lo = std::min(lo, d);
        hi = std::max(hi, d);
    }
    return {lo, hi};
}

MeanWidthEstimate finish_estimate(long long hits, long long samples) {
    MeanWidthEstimate e;
    e.hits = hits;
    e.samples = samples;
    const double p = samples > 0 ? static_cast<double>(hits) / samples : 0.0;
    e.estimate = 0.5 * p;
    e.stderror = samples > 0 ? 0.5 * std::sqrt(p * (1.0 - p) / samples) : 0.0;
    return e;
}

}  // namespace

MeanWidthEstimate mean_width_u1(const ConvexBody& body, long long samples, std::uint64_t seed) {
    if (body.geom().kind != Space::Spherical) throw std::invalid_argument("mean_width_u1: spherical geometry only");
    const int n = body.geom().dim + 1;
    PhiloxRng rng(seed);
    long long hits = 0;
    Vec u(n);
    for (long long s = 0; s < samples; ++s) {
        for (int i = 0; i < n; ++i) u[i] = rng.gaussian();
        const auto si = support_interval(body, u);
        if (si.lo <= 0.0 && si.hi >= 0.0) ++hits;
    }
    return finish_estimate(hits, samples);
}

MeanWidthEstimate mean_width_u1(const GeodesicPolytope& p, long long samples, std::uint64_t seed) {
    if (p.geom.kind != Space::Spherical) throw std::invalid_argument("mean_width_u1: spherical geometry only");
    const int n = p.geom.dim + 1;
    std::vector<Vec> verts(p.f0());
    for (int i = 0; i < p.f0(); ++i) verts[i] = p.ambient_vertex(i);
    PhiloxRng rng(seed);
    long long hits = 0;
    Vec u(n);
    for (long long s = 0; s < samples; ++s) {
        for (int i = 0; i < n; ++i) u[i] = rng.gaussian();
        bool neg = false, pos = false;
        for (const auto& v : verts) {
            const double d = u.dot(v);
            neg = neg || d <= 0.0;
            pos = pos || d >= 0.0;
            if (neg && pos) break;
        }
        if (neg && pos) ++hits;
    }
    return finish_estimate(hits, samples);
}

MeanWidthEstimate mean_width_excess(const GeodesicPolytope& outer, const ConvexBody& inner, long long samples,
                                    std::uint64_t seed) {
    const int n = outer.geom.dim + 1;
    std::vector<Vec> verts(outer.f0());
    for (int i = 0; i < outer.f0(); ++i) verts[i] = outer.ambient_vertex(i);
    PhiloxRng rng(seed);
    long long diff = 0;
    Vec u(n);
    for (long long s = 0; s < samples; ++s) {
        for (int i = 0; i < n; ++i) u[i] = rng.gaussian();
        bool neg = false, pos = false;
        for (const auto& v : verts) {
            const double d = u.dot(v);
            neg = neg || d <= 0.0;
            pos = pos || d >= 0.0;
            if (neg && pos) break;
        }
        const bool hit_outer = neg && pos;
        if (!hit_outer) continue;  // inner hits imply outer hits
        const auto si = support_interval(inner, u);
        const bool hit_inner = si.lo <= 0.0 && si.hi >= 0.0;
        if (!hit_inner) ++diff;
    }
    return finish_estimate(diff, samples);
}

}  // namespace geohull
