#pragma once

#include <string>
#include <vector>

#include "geohull/bodies.hpp"
#include "geohull/hull.hpp"

namespace geohull {

// A geodesic half-space cut in the body's chart frame: H+ = {<normal,q> >= offset}.
// Chart half-spaces are exactly geodesic half-spaces because geodesics map to
// chart lines.
struct CapCut {
    Vec normal;
    double offset = 0.0;
};

struct VolumeResult {
    double value = 0.0;
    double error_bound = 0.0;
};

// Curved volume of a polytope: integral of the chart density over the chart
// region, fan-triangulated from the chart centroid, fixed-order Gauss rules
// with one refinement level for the error estimate.
VolumeResult polytope_volume(const GeodesicPolytope& p);

double body_volume(const ConvexBody& body);

// Vol(K intersect H+); `order` > 0 picks a cheaper quadrature for inner loops.
double cap_volume(const ConvexBody& body, const CapCut& cut, int order = 0);

// Chart Lebesgue area of the cap's chart image (d=2), for distortion checks.
double cap_chart_area(const ConvexBody& body, const CapCut& cut);

// Offset such that cap_volume(body, {normal, offset}) = target (monotone
// bisection to relative tolerance `rel_tol`).
double cap_offset_for_volume(const ConvexBody& body, const Vec& normal, double target, double rel_tol = 1e-6,
                             int order = 0);

// Floating body K_[t] as an outer polygon from `n_dirs` equally spaced chart
// directions (d=2). Empty polytope (f0 = 0) when t >= Vol(K).
GeodesicPolytope floating_body_2d(const ConvexBody& body, double t, int n_dirs = 2048);

double wet_part_volume(const ConvexBody& body, double t, int n_dirs = 2048);

// Economic cap covering of the wet part (d=2): caps of volume lambda*t along
// the boundary, with disjoint inner witness polygons of volume >~ t.
struct CapCover {
    std::vector<CapCut> caps;
    std::vector<std::vector<Eigen::Vector2d>> inner_sets;  // m' of them, m/4 <= m' <= m
    std::vector<CapCut> inner_cuts;  // undilated anchor cut of each kept inner set
    double t = 0.0;
    double lambda = 6.0;
    bool threshold_flagged = false;  // t above the sharper cos^{d+1}(R_K) threshold
};

CapCover cap_cover_2d(const ConvexBody& body, double t, double lambda = 6.0);

// Runtime verification of the covering clauses; throws on violation naming
// the clause.
void verify_cap_cover(const ConvexBody& body, const CapCover& cover, std::uint64_t seed = 1);

struct MeanWidthEstimate {
    double estimate = 0.0;
    double stderror = 0.0;
    long long hits = 0;
    long long samples = 0;
};

// Monte Carlo spherical mean width: average over random great hyperspheres of
// the hit indicator, halved.
MeanWidthEstimate mean_width_u1(const ConvexBody& body, long long samples, std::uint64_t seed);
MeanWidthEstimate mean_width_u1(const GeodesicPolytope& p, long long samples, std::uint64_t seed);

// U1(outer) - U1(inner) with common random normals (outer must contain inner).
MeanWidthEstimate mean_width_excess(const GeodesicPolytope& outer, const ConvexBody& inner, long long samples,
                                    std::uint64_t seed);

// --- chart polygon helpers (d=2) ---

using ChartPolygon = std::vector<Eigen::Vector2d>;

ChartPolygon clip_polygon(const ChartPolygon& poly, const Eigen::Vector2d& normal, double offset);
VolumeResult polygon_psi_volume(const Geometry& g, const ChartPolygon& poly, int order = 20, bool refined = true);
double polygon_lebesgue_area(const ChartPolygon& poly);
GeodesicPolytope polygon_to_polytope(const Geometry& g, const Mat& frame, const ChartPolygon& poly);

}  // namespace geohull
