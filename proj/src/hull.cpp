#include "geohull/hull.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace geohull {

namespace {

constexpr double kOrientEps = 1e-12;

double cross2(const Vec& o, const Vec& a, const Vec& b) {
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

// Monotone chain on chart coordinates; returns CCW hull indices.
std::vector<int> hull_2d_indices(const std::vector<Vec>& pts) {
    const int n = static_cast<int>(pts.size());
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int i, int j) {
        if (pts[i][0] != pts[j][0]) return pts[i][0] < pts[j][0];
        if (pts[i][1] != pts[j][1]) return pts[i][1] < pts[j][1];
        return i < j;  // deterministic tie rule
    });
    std::vector<int> h;
    h.reserve(2 * n);
    for (int pass = 0; pass < 2; ++pass) {
        const size_t base = h.size();
        for (int idx : order) {
            while (h.size() >= base + 2 && cross2(pts[h[h.size() - 2]], pts[h.back()], pts[idx]) <= kOrientEps)
                h.pop_back();
            h.push_back(idx);
        }
        h.pop_back();
        std::reverse(order.begin(), order.end());
    }
    return h;
}

struct Face {
    int v[3];
    Eigen::Vector3d n;
    double off;
    bool alive = true;
    std::vector<int> conflicts;
};

Eigen::Vector3d v3(const Vec& p) { return Eigen::Vector3d(p[0], p[1], p[2]); }

// Incremental 3d hull with conflict lists; insertion order is the input
// order (the callers feed i.i.d. samples, which serves as the shuffle).
void hull_3d(const std::vector<Vec>& pts, std::vector<int>& vert_idx, std::vector<std::vector<int>>& facets) {
    const int n = static_cast<int>(pts.size());
    // seed simplex: greedily extend the affine span
    int i0 = 0, i1 = -1, i2 = -1, i3 = -1;
    for (int i = 1; i < n && i1 < 0; ++i)
        if ((v3(pts[i]) - v3(pts[i0])).norm() > kOrientEps) i1 = i;
    if (i1 < 0) throw DegenerateHullError(0);
    for (int i = 1; i < n && i2 < 0; ++i) {
        if (i == i1) continue;
        if ((v3(pts[i1]) - v3(pts[i0])).cross(v3(pts[i]) - v3(pts[i0])).norm() > kOrientEps) i2 = i;
    }
    if (i2 < 0) throw DegenerateHullError(1);
    for (int i = 1; i < n && i3 < 0; ++i) {
        if (i == i1 || i == i2) continue;
        const double vol =
            (v3(pts[i1]) - v3(pts[i0])).cross(v3(pts[i2]) - v3(pts[i0])).dot(v3(pts[i]) - v3(pts[i0]));
        if (std::abs(vol) > kOrientEps) i3 = i;
    }
    if (i3 < 0) throw DegenerateHullError(2);

    std::vector<Face> faces;
    auto make_face = [&](int a, int b, int c, const Eigen::Vector3d& inside) {
        Face f;
        f.v[0] = a;
        f.v[1] = b;
        f.v[2] = c;
        f.n = (v3(pts[b]) - v3(pts[a])).cross(v3(pts[c]) - v3(pts[a]));
        f.off = f.n.dot(v3(pts[a]));
        if (f.n.dot(inside) > f.off) {  // flip to outward
            std::swap(f.v[1], f.v[2]);
            f.n = -f.n;
            f.off = -f.off;
        }
        return f;
    };
    const Eigen::Vector3d inside0 = 0.25 * (v3(pts[i0]) + v3(pts[i1]) + v3(pts[i2]) + v3(pts[i3]));
    faces.push_back(make_face(i0, i1, i2, inside0));
    faces.push_back(make_face(i0, i1, i3, inside0));
    faces.push_back(make_face(i0, i2, i3, inside0));
    faces.push_back(make_face(i1, i2, i3, inside0));

    auto sees = [&](const Face& f, int i) { return f.n.dot(v3(pts[i])) - f.off > kOrientEps * (1.0 + std::abs(f.off)); };

    // initial conflict assignment
    for (int i = 0; i < n; ++i) {
        if (i == i0 || i == i1 || i == i2 || i == i3) continue;
        for (auto& f : faces)
            if (sees(f, i)) {
                f.conflicts.push_back(i);
                break;
            }
    }

    for (size_t fi = 0; fi < faces.size(); ++fi) {
        if (!faces[fi].alive || faces[fi].conflicts.empty()) continue;
        // furthest conflict point of this face
        int p = faces[fi].conflicts[0];
        double best = faces[fi].n.dot(v3(pts[p])) - faces[fi].off;
        for (int q : faces[fi].conflicts) {
            const double dq = faces[fi].n.dot(v3(pts[q])) - faces[fi].off;
            if (dq > best || (dq == best && q < p)) {
                best = dq;
                p = q;
            }
        }
        // visible set from p (scan all alive faces; fine at these sizes)
        std::vector<size_t> visible;
        std::map<std::pair<int, int>, size_t> edge_owner;
        for (size_t k = 0; k < faces.size(); ++k) {
            if (!faces[k].alive) continue;
            if (sees(faces[k], p)) visible.push_back(k);
        }
        std::vector<char> is_visible(faces.size(), 0);
        for (size_t k : visible) is_visible[k] = 1;
        for (size_t k = 0; k < faces.size(); ++k) {
            if (!faces[k].alive) continue;
            for (int e = 0; e < 3; ++e)
                edge_owner[{faces[k].v[e], faces[k].v[(e + 1) % 3]}] = k;
        }
        std::vector<int> orphans;
        std::vector<std::pair<int, int>> horizon;
        for (size_t k : visible) {
            for (int e = 0; e < 3; ++e) {
                const int a = faces[k].v[e], b = faces[k].v[(e + 1) % 3];
                auto it = edge_owner.find({b, a});
                if (it == edge_owner.end() || !is_visible[it->second]) horizon.push_back({a, b});
            }
            faces[k].alive = false;
            for (int q : faces[k].conflicts)
                if (q != p) orphans.push_back(q);
            faces[k].conflicts.clear();
        }
        const Eigen::Vector3d inner = inside0;
        std::vector<size_t> fresh;
        for (auto [a, b] : horizon) {
            Face f = make_face(b, a, p, inner);
            fresh.push_back(faces.size());
            faces.push_back(f);
        }
        for (int q : orphans) {
            for (size_t k : fresh)
                if (sees(faces[k], q)) {
                    faces[k].conflicts.push_back(q);
                    break;
                }
        }
    }

    std::vector<int> remap(n, -1);
    vert_idx.clear();
    facets.clear();
    for (const auto& f : faces) {
        if (!f.alive) continue;
        std::vector<int> tri(3);
        for (int e = 0; e < 3; ++e) {
            if (remap[f.v[e]] < 0) {
                remap[f.v[e]] = static_cast<int>(vert_idx.size());
                vert_idx.push_back(f.v[e]);
            }
            tri[e] = remap[f.v[e]];
        }
        facets.push_back(tri);
    }
}

}  // namespace

Vec GeodesicPolytope::ambient_vertex(int i) const {
    return frame * gnomonic_inverse(geom, chart_vertices[i]);
}

Vec GeodesicPolytope::chart_of(const Vec& ambient) const {
    return gnomonic_forward(geom, frame_inverse(geom, frame) * ambient);
}

GeodesicPolytope convex_hull_chart(const Geometry& g, const std::vector<Vec>& chart_points) {
    const int d = g.dim;
    if (d != 2 && d != 3) throw std::invalid_argument("convex_hull: only d in {2,3} supported");
    if (static_cast<int>(chart_points.size()) < d + 1) throw DegenerateHullError(0);
    GeodesicPolytope p;
    p.geom = g;
    p.frame = Mat::Identity(d + 1, d + 1);
    if (d == 2) {
        std::vector<int> idx = hull_2d_indices(chart_points);
        if (idx.size() < 3) throw DegenerateHullError(static_cast<int>(idx.size()) - 1);
        const int m = static_cast<int>(idx.size());
        for (int i = 0; i < m; ++i) {
            p.chart_vertices.push_back(chart_points[idx[i]]);
            p.provenance.push_back(idx[i]);
            p.facets.push_back({i, (i + 1) % m});
        }
    } else {
        std::vector<int> vert_idx;
        hull_3d(chart_points, vert_idx, p.facets);
        for (int i : vert_idx) {
            p.chart_vertices.push_back(chart_points[i]);
            p.provenance.push_back(i);
        }
    }
    return p;
}

GeodesicPolytope convex_hull(const Geometry& g, const std::vector<Vec>& points) {
    Mat frame = Mat::Identity(g.dim + 1, g.dim + 1);
    if (g.kind == Space::Spherical) {
        Vec u = Vec::Zero(g.dim + 1);
        for (const auto& x : points) u += x;
        if (u.norm() < 1e-9) u = points.at(0);
        u.normalize();
        frame = rotation_to_pole(u);  // reflection: frame * e_{d+1} = u
    }
    const Mat inv = frame_inverse(g, frame);
    std::vector<Vec> chart(points.size());
    for (size_t i = 0; i < points.size(); ++i) chart[i] = gnomonic_forward(g, inv * points[i]);
    GeodesicPolytope p = convex_hull_chart(g, chart);
    p.frame = frame;
    return p;
}

std::pair<int, int> f_vector(const GeodesicPolytope& p) {
    return {p.f0(), p.num_facets()};
}

FacetPlane facet_plane(const GeodesicPolytope& p, int facet) {
    const auto& f = p.facets.at(facet);
    FacetPlane fp;
    if (p.geom.dim == 2) {
        const Vec& a = p.chart_vertices[f[0]];
        const Vec& b = p.chart_vertices[f[1]];
        Vec n(2);
        n << b[1] - a[1], a[0] - b[0];  // outward for CCW order
        n.normalize();
        fp.normal = n;
        fp.offset = n.dot(a);
    } else {
        const Vec& a = p.chart_vertices[f[0]];
        const Vec& b = p.chart_vertices[f[1]];
        const Vec& c = p.chart_vertices[f[2]];
        Eigen::Vector3d n = (Eigen::Vector3d(b[0] - a[0], b[1] - a[1], b[2] - a[2]))
                                .cross(Eigen::Vector3d(c[0] - a[0], c[1] - a[1], c[2] - a[2]));
        n.normalize();
        Vec nn(3);
        nn << n[0], n[1], n[2];
        fp.normal = nn;
        fp.offset = nn.dot(a);
    }
    return fp;
}

bool polytope_contains_chart(const GeodesicPolytope& p, const Vec& q, double tol) {
    for (int i = 0; i < p.num_facets(); ++i) {
        const FacetPlane fp = facet_plane(p, i);
        if (fp.normal.dot(q) - fp.offset > tol) return false;
    }
    return true;
}

std::vector<int> visible_facets(const GeodesicPolytope& p, const Vec& q) {
    std::vector<int> out;
    for (int i = 0; i < p.num_facets(); ++i) {
        const FacetPlane fp = facet_plane(p, i);
        if (fp.normal.dot(q) - fp.offset > 1e-12) out.push_back(i);
    }
    return out;
}

double gauss_bonnet_area(const GeodesicPolytope& p) {
    if (p.geom.dim != 2) throw std::invalid_argument("gauss_bonnet_area: d=2 only");
    const int m = p.f0();
    if (m < 3) throw std::invalid_argument("gauss_bonnet_area: degenerate polygon");
    if (p.geom.kind == Space::Euclidean) {
        double s = 0.0;
        for (int i = 0; i < m; ++i) {
            const Vec& a = p.chart_vertices[i];
            const Vec& b = p.chart_vertices[(i + 1) % m];
            s += a[0] * b[1] - b[0] * a[1];
        }
        return 0.5 * std::abs(s);
    }
    double chart2 = 0.0;
    for (int i = 0; i < m; ++i) {
        const Vec& a = p.chart_vertices[i];
        const Vec& b = p.chart_vertices[(i + 1) % m];
        chart2 += a[0] * b[1] - b[0] * a[1];
    }
    if (std::abs(chart2) < 1e-14) throw std::invalid_argument("gauss_bonnet_area: degenerate polygon");
    std::vector<Vec> amb(m);
    for (int i = 0; i < m; ++i) amb[i] = p.ambient_vertex(i);
    const bool sph = p.geom.kind == Space::Spherical;
    auto inner = [&](const Vec& x, const Vec& y) {
        if (sph) return x.dot(y);
        return x[0] * y[0] + x[1] * y[1] - x[2] * y[2];
    };
    double angle_sum = 0.0;
    for (int i = 0; i < m; ++i) {
        const Vec& v = amb[i];
        const Vec& a = amb[(i + m - 1) % m];
        const Vec& b = amb[(i + 1) % m];
        // project neighbours to the tangent space at v
        const double sv = sph ? 1.0 : -1.0;
        Vec t1 = a - sv * inner(a, v) * v;
        Vec t2 = b - sv * inner(b, v) * v;
        const double n1 = std::sqrt(inner(t1, t1)), n2 = std::sqrt(inner(t2, t2));
        if (n1 < 1e-14 || n2 < 1e-14) throw std::invalid_argument("gauss_bonnet_area: collinear polygon");
        angle_sum += std::acos(std::clamp(inner(t1, t2) / (n1 * n2), -1.0, 1.0));
    }
    if (sph) return angle_sum - (m - 2) * M_PI;
    return (m - 2) * M_PI - angle_sum;
}

}  // namespace geohull
