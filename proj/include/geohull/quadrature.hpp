#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "geohull/geometry.hpp"

namespace geohull {

// Gauss-Legendre nodes/weights on [-1,1]; cached per order.
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

const GaussRule& gauss_legendre(int order);

// Integrate f over [a,b] with an n-point Gauss-Legendre rule.
double integrate_1d(const std::function<double(double)>& f, double a, double b, int order = 64);

// Integrate the chart density over a chart triangle / tetrahedron via the
// Duffy (collapsed product Gauss) rule. `order` points per axis.
double integrate_triangle_psi(const Geometry& g, const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                              const Eigen::Vector2d& c, int order = 20);
double integrate_tet_psi(const Geometry& g, const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                         const Eigen::Vector3d& c, const Eigen::Vector3d& d, int order = 10);

// Same with one refinement level (4 sub-triangles / 8 sub-tets); returns the
// refined value together with |refined - coarse| as an error estimate.
std::pair<double, double> integrate_triangle_psi_refined(const Geometry& g, const Eigen::Vector2d& a,
                                                         const Eigen::Vector2d& b, const Eigen::Vector2d& c,
                                                         int order = 20);
std::pair<double, double> integrate_tet_psi_refined(const Geometry& g, const Eigen::Vector3d& a,
                                                    const Eigen::Vector3d& b, const Eigen::Vector3d& c,
                                                    const Eigen::Vector3d& d, int order = 10);

// Integrate an arbitrary integrand over a chart triangle (used by oracles and
// by Lebesgue-area computations, where the integrand is 1).
double integrate_triangle(const std::function<double(double, double)>& f, const Eigen::Vector2d& a,
                          const Eigen::Vector2d& b, const Eigen::Vector2d& c, int order = 20);

}  // namespace geohull
