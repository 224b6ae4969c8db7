#pragma once

#include <Eigen/Dense>
#include <stdexcept>

namespace geohull {

enum class Space { Spherical, Hyperbolic, Euclidean };

// One of the three constant-curvature model spaces, with its dimension d >= 2.
struct Geometry {
    Space kind = Space::Spherical;
    int dim = 2;

    Geometry() = default;
    Geometry(Space k, int d) : kind(k), dim(d) {
        if (d < 2) throw std::invalid_argument("Geometry: dim must be >= 2");
    }

    bool operator==(const Geometry&) const = default;
};

inline Geometry spherical(int d = 2) { return Geometry(Space::Spherical, d); }
inline Geometry hyperbolic(int d = 2) { return Geometry(Space::Hyperbolic, d); }
inline Geometry euclidean(int d = 2) { return Geometry(Space::Euclidean, d); }

// Ambient points are (d+1)-vectors: unit vectors for the sphere, hyperboloid
// points (x_{d+1} > 0) for hyperbolic space, and (p, 1) for Euclidean space.
// Chart points are d-vectors in the gnomonic chart at e_{d+1}.
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

bool ambient_valid(const Geometry& g, const Vec& x, double tol = 1e-12);
void check_ambient(const Geometry& g, const Vec& x, double tol = 1e-12);

// Central projection onto the tangent hyperplane at e_{d+1}; maps geodesics to
// straight chart segments. Spherical input must lie in the open upper
// hemisphere.
Vec gnomonic_forward(const Geometry& g, const Vec& x);
Vec gnomonic_inverse(const Geometry& g, const Vec& p);

// Jacobian density of the pushforward of the curved volume: integrating it
// over a chart set gives the set's volume in the model space.
double chart_density(const Geometry& g, const Vec& p);
double chart_density_norm2(const Geometry& g, double norm2, int d);

double geodesic_distance(const Geometry& g, const Vec& x, const Vec& y);

// Orthogonal map R on R^{d+1} with R*u = e_{d+1} (a single reflection, so
// also R*e_{d+1} = u; well conditioned for u near -e_{d+1}).
Mat rotation_to_pole(const Vec& u);

// Isometry of the model space mapping e_{d+1} (chart center) to c:
// reflection for the sphere, Lorentz boost for hyperbolic space, and a
// homogeneous translation matrix for Euclidean space.
Mat frame_to_point(const Geometry& g, const Vec& c);
Mat frame_inverse(const Geometry& g, const Mat& f);

// Surface volume omega_{d+1} of the unit sphere S^d.
double sphere_surface_area(int d);

// Volume of a geodesic ball of radius r in the d-dimensional model space.
double geodesic_ball_volume(const Geometry& g, double r);

// Chart radius of a geodesic circle of radius r about the chart center.
double chart_radius(const Geometry& g, double r);

}  // namespace geohull
