#include "geohull/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace geohull {

namespace {

GaussRule compute_gauss(int n) {
    // Newton iteration on Legendre polynomials, nodes symmetric about 0.
    GaussRule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        r.nodes[i] = -x;
        r.nodes[n - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * pp * pp);
        r.weights[i] = w;
        r.weights[n - 1 - i] = w;
    }
    return r;
}

}  // namespace

const GaussRule& gauss_legendre(int order) {
    static std::map<int, GaussRule> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(order);
    if (it == cache.end()) it = cache.emplace(order, compute_gauss(order)).first;
    return it->second;
}

double integrate_1d(const std::function<double(double)>& f, double a, double b, int order) {
    const GaussRule& r = gauss_legendre(order);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < order; ++i) s += r.weights[i] * f(mid + half * r.nodes[i]);
    return s * half;
}

double integrate_triangle(const std::function<double(double, double)>& f, const Eigen::Vector2d& a,
                          const Eigen::Vector2d& b, const Eigen::Vector2d& c, int order) {
    // Duffy map of the unit square: P(u,v) = a + u(b-a) + uv(c-b), |J| = 2T*u.
    const GaussRule& r = gauss_legendre(order);
    const double area2 = std::abs((b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x()));
    double s = 0.0;
    for (int i = 0; i < order; ++i) {
        const double u = 0.5 * (r.nodes[i] + 1.0);
        const double wu = 0.5 * r.weights[i] * u;
        for (int j = 0; j < order; ++j) {
            const double v = 0.5 * (r.nodes[j] + 1.0);
            const double wv = 0.5 * r.weights[j];
            const Eigen::Vector2d p = a + u * (b - a) + u * v * (c - b);
            s += wu * wv * f(p.x(), p.y());
        }
    }
    return s * area2;
}

double integrate_triangle_psi(const Geometry& g, const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                              const Eigen::Vector2d& c, int order) {
    const int d = g.dim;
    return integrate_triangle(
        [&](double x, double y) { return chart_density_norm2(g, x * x + y * y, d); }, a, b, c, order);
}

std::pair<double, double> integrate_triangle_psi_refined(const Geometry& g, const Eigen::Vector2d& a,
                                                         const Eigen::Vector2d& b, const Eigen::Vector2d& c,
                                                         int order) {
    const double coarse = integrate_triangle_psi(g, a, b, c, order);
    const Eigen::Vector2d ab = 0.5 * (a + b), bc = 0.5 * (b + c), ca = 0.5 * (c + a);
    const double fine = integrate_triangle_psi(g, a, ab, ca, order) + integrate_triangle_psi(g, ab, b, bc, order) +
                        integrate_triangle_psi(g, ca, bc, c, order) + integrate_triangle_psi(g, ab, bc, ca, order);
    return {fine, std::abs(fine - coarse)};
}

double integrate_tet_psi(const Geometry& g, const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                         const Eigen::Vector3d& c, const Eigen::Vector3d& d, int order) {
    // Duffy map: P(u,v,w) = a + u(b-a) + uv(c-b) + uvw(d-c), |J| = 6V*u^2*v.
    const GaussRule& r = gauss_legendre(order);
    const double vol6 = std::abs((b - a).cross(c - a).dot(d - a));
    const int dim = g.dim;
    double s = 0.0;
    for (int i = 0; i < order; ++i) {
        const double u = 0.5 * (r.nodes[i] + 1.0);
        const double wu = 0.5 * r.weights[i] * u * u;
        for (int j = 0; j < order; ++j) {
            const double v = 0.5 * (r.nodes[j] + 1.0);
            const double wv = 0.5 * r.weights[j] * v;
            for (int k = 0; k < order; ++k) {
                const double w = 0.5 * (r.nodes[k] + 1.0);
                const double ww = 0.5 * r.weights[k];
                const Eigen::Vector3d p = a + u * (b - a) + u * v * (c - b) + u * v * w * (d - c);
                s += wu * wv * ww * chart_density_norm2(g, p.squaredNorm(), dim);
            }
        }
    }
    return s * vol6;
}

std::pair<double, double> integrate_tet_psi_refined(const Geometry& g, const Eigen::Vector3d& a,
                                                    const Eigen::Vector3d& b, const Eigen::Vector3d& c,
                                                    const Eigen::Vector3d& d, int order) {
    const double coarse = integrate_tet_psi(g, a, b, c, d, order);
    // Split into 8 sub-tets: 4 corner tets plus 4 filling the inner octahedron.
    const Eigen::Vector3d ab = 0.5 * (a + b), ac = 0.5 * (a + c), ad = 0.5 * (a + d);
    const Eigen::Vector3d bc = 0.5 * (b + c), bd = 0.5 * (b + d), cd = 0.5 * (c + d);
    double fine = 0.0;
    fine += integrate_tet_psi(g, a, ab, ac, ad, order);
    fine += integrate_tet_psi(g, ab, b, bc, bd, order);
    fine += integrate_tet_psi(g, ac, bc, c, cd, order);
    fine += integrate_tet_psi(g, ad, bd, cd, d, order);
    fine += integrate_tet_psi(g, ab, ac, ad, bd, order);
    fine += integrate_tet_psi(g, ab, ac, bc, bd, order);
    fine += integrate_tet_psi(g, ac, ad, bd, cd, order);
    fine += integrate_tet_psi(g, ac, bc, bd, cd, order);
    return {fine, std::abs(fine - coarse)};
}

}  // namespace geohull
