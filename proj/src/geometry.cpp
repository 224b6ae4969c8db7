#include "geohull/geometry.hpp"

#include <cmath>

#include "geohull/quadrature.hpp"

namespace geohull {

namespace {

double lorentz_inner(const Vec& x, const Vec& y) {
    const int d = static_cast<int>(x.size()) - 1;
    return x.head(d).dot(y.head(d)) - x[d] * y[d];
}

}  // namespace

bool ambient_valid(const Geometry& g, const Vec& x, double tol) {
    if (x.size() != g.dim + 1) return false;
    switch (g.kind) {
        case Space::Spherical:
            return std::abs(x.norm() - 1.0) <= tol;
        case Space::Hyperbolic:
            return std::abs(lorentz_inner(x, x) + 1.0) <= tol && x[g.dim] > 0.0;
        case Space::Euclidean:
            return std::abs(x[g.dim] - 1.0) <= tol;
    }
    return false;
}

void check_ambient(const Geometry& g, const Vec& x, double tol) {
    if (!ambient_valid(g, x, tol)) throw std::invalid_argument("ambient point violates the model-space constraint");
}

Vec gnomonic_forward(const Geometry& g, const Vec& x) {
    const int d = g.dim;
    if (x.size() != d + 1) throw std::invalid_argument("gnomonic_forward: wrong coordinate count");
    if (g.kind == Space::Spherical && x[d] <= 0.0)
        throw std::domain_error("gnomonic_forward: point outside the open upper hemisphere");
    if (g.kind == Space::Euclidean) return x.head(d);
    return x.head(d) / x[d];
}

Vec gnomonic_inverse(const Geometry& g, const Vec& p) {
    const int d = g.dim;
    if (p.size() != d) throw std::invalid_argument("gnomonic_inverse: wrong coordinate count");
    Vec x(d + 1);
    x.head(d) = p;
    x[d] = 1.0;
    switch (g.kind) {
        case Space::Spherical:
            return x / std::sqrt(1.0 + p.squaredNorm());
        case Space::Hyperbolic: {
            const double n2 = p.squaredNorm();
            if (n2 >= 1.0) throw std::domain_error("gnomonic_inverse: hyperbolic chart point outside the unit ball");
            return x / std::sqrt(1.0 - n2);
        }
        case Space::Euclidean:
            return x;
    }
    return x;
}

double chart_density_norm2(const Geometry& g, double norm2, int d) {
    switch (g.kind) {
        case Space::Spherical:
            return std::pow(1.0 + norm2, -0.5 * (d + 1));
        case Space::Hyperbolic:
            if (norm2 >= 1.0) throw std::domain_error("chart_density: hyperbolic chart point outside the unit ball");
            return std::pow(1.0 - norm2, -0.5 * (d + 1));
        case Space::Euclidean:
            return 1.0;
    }
    return 1.0;
}

double chart_density(const Geometry& g, const Vec& p) {
    return chart_density_norm2(g, p.squaredNorm(), g.dim);
}

double geodesic_distance(const Geometry& g, const Vec& x, const Vec& y) {
    const int d = g.dim;
    switch (g.kind) {
        case Space::Spherical: {
            double c = x.dot(y);
            if (std::abs(c) > 1.0 + 1e-9) throw std::domain_error("geodesic_distance: inner product far outside [-1,1]");
            c = std::clamp(c, -1.0, 1.0);
            return std::acos(c);
        }
        case Space::Hyperbolic: {
            double c = -lorentz_inner(x, y);
            if (c < 1.0 - 1e-9) throw std::domain_error("geodesic_distance: Lorentz product below the arcosh domain");
            c = std::max(c, 1.0);
            return std::acosh(c);
        }
        case Space::Euclidean:
            return (x.head(d) - y.head(d)).norm();
    }
    return 0.0;
}

Mat rotation_to_pole(const Vec& u) {
    const int n = static_cast<int>(u.size());
    if (std::abs(u.norm() - 1.0) > 1e-9) throw std::invalid_argument("rotation_to_pole: input must be a unit vector");
    Vec e = Vec::Zero(n);
    e[n - 1] = 1.0;
    Vec v = u - e;
    const double vn = v.norm();
    if (vn < 1e-14) return Mat::Identity(n, n);
    v /= vn;
    return Mat::Identity(n, n) - 2.0 * v * v.transpose();
}

Mat frame_to_point(const Geometry& g, const Vec& c) {
    const int d = g.dim;
    switch (g.kind) {
        case Space::Spherical:
            return rotation_to_pole(c);  // a reflection, its own inverse
        case Space::Hyperbolic: {
            check_ambient(g, c, 1e-9);
            Mat f = Mat::Identity(d + 1, d + 1);
            const double ch = c[d];
            Vec s = c.head(d);
            const double sn = s.norm();
            if (sn < 1e-15) return f;
            Vec u = s / sn;
            f.topLeftCorner(d, d) += (ch - 1.0) * u * u.transpose();
            f.block(0, d, d, 1) = s;
            f.block(d, 0, 1, d) = s.transpose();
            f(d, d) = ch;
            return f;
        }
        case Space::Euclidean: {
            Mat f = Mat::Identity(d + 1, d + 1);
            f.block(0, d, d, 1) = c.head(d);
            return f;
        }
    }
    return Mat::Identity(d + 1, d + 1);
}

Mat frame_inverse(const Geometry& g, const Mat& f) {
    const int d = g.dim;
    switch (g.kind) {
        case Space::Spherical:
            return f.transpose();
        case Space::Hyperbolic: {
            Vec j(d + 1);
            j.head(d).setOnes();
            j[d] = -1.0;
            return j.asDiagonal() * f.transpose() * j.asDiagonal();
        }
        case Space::Euclidean: {
            Mat inv = f;
            inv.block(0, d, d, 1) *= -1.0;
            return inv;
        }
    }
    return f.transpose();
}

double sphere_surface_area(int d) {
    if (d < 1) throw std::invalid_argument("sphere_surface_area: d must be >= 1");
    return 2.0 * std::pow(M_PI, 0.5 * (d + 1)) / std::tgamma(0.5 * (d + 1));
}

double geodesic_ball_volume(const Geometry& g, double r) {
    if (r < 0.0) throw std::invalid_argument("geodesic_ball_volume: negative radius");
    const int d = g.dim;
    const double omega = sphere_surface_area(d - 1);
    switch (g.kind) {
        case Space::Spherical:
            if (d == 2) return 2.0 * M_PI * (1.0 - std::cos(r));
            return integrate_1d([d](double s) { return std::pow(std::sin(s), d - 1); }, 0.0, r) * omega;
        case Space::Hyperbolic:
            if (d == 2) return 2.0 * M_PI * (std::cosh(r) - 1.0);
            return integrate_1d([d](double s) { return std::pow(std::sinh(s), d - 1); }, 0.0, r) * omega;
        case Space::Euclidean:
            return omega * std::pow(r, d) / d;
    }
    return 0.0;
}

double chart_radius(const Geometry& g, double r) {
    switch (g.kind) {
        case Space::Spherical:
            if (r >= M_PI / 2) throw std::domain_error("chart_radius: spherical radius must be < pi/2");
            return std::tan(r);
        case Space::Hyperbolic:
            return std::tanh(r);
        case Space::Euclidean:
            return r;
    }
    return r;
}

}  // namespace geohull
