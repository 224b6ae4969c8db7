#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "geohull/bodies.hpp"
#include "geohull/hull.hpp"
#include "geohull/rng.hpp"

namespace geohull {

enum class Model { Inscribed, Circumscribed };

// One experiment: an ensemble of replications per sample size over a fixed
// body, driven entirely by master_seed.
struct SimulationConfig {
    ConvexBody body;
    Model model = Model::Inscribed;
    std::vector<long long> n_grid;
    int replications = 2;
    std::uint64_t master_seed = 0;
    std::vector<std::string> statistics;
    long long u1_samples = 1000000;
};

// Throws std::invalid_argument naming the offending field.
void validate_config(const SimulationConfig& cfg);

struct EstimatorSummary {
    std::string model;
    std::string statistic;
    long long n = 0;
    double mean = 0.0;
    double variance = 0.0;       // unbiased sample variance across replications
    double stderr_mean = 0.0;    // sqrt(variance / replications)
    double stderr_var = 0.0;     // delete-one jackknife stderr of the variance
    int replications = 0;
    std::uint64_t seed = 0;
};

struct ScalingFit {
    double slope = 0.0;
    double intercept = 0.0;
    double ci95 = 0.0;  // 95% confidence half-width of the slope
    double residual_rms = 0.0;
    int points = 0;
};

// i.i.d. uniform points in the body w.r.t. the geodesic volume: polar
// inverse-CDF sampling in the bounding cap, rejected to membership.
std::vector<Vec> sample_uniform(const ConvexBody& body, long long n, PhiloxRng& rng);

// Circumscribed model: n uniform poles in K*, returned as the polar of their
// hull. Retries (within the stream) on degenerate pole hulls, at most 100.
GeodesicPolytope sample_circumscribed(const ConvexBody& body, long long n, PhiloxRng& rng);

// Fast hull volume for the replication loops: Gauss-Bonnet for d=2,
// tetrahedral Duffy quadrature (given order) for d=3.
double hull_volume(const GeodesicPolytope& p, int order = 8);

std::vector<EstimatorSummary> run_inscribed_experiment(const SimulationConfig& cfg, int threads = 0);
std::vector<EstimatorSummary> run_circumscribed_experiment(const SimulationConfig& cfg, int threads = 0);
std::vector<EstimatorSummary> run_experiment(const SimulationConfig& cfg, int threads = 0);

struct EfronSteinResult {
    double varhat = 0.0;  // sample variance of Vol(K_n)
    double bound = 0.0;   // (n+1) * E[(Vol(K_{n+1}) - Vol(K_n))^2]
    double ratio = 0.0;
    double ratio_stderr = 0.0;
};
EfronSteinResult efron_stein_diagnostic(const ConvexBody& body, long long n, int replications,
                                        std::uint64_t master_seed, int threads = 0);

struct ContainmentRate {
    double rate = 0.0;
    double stderror = 0.0;
};
ContainmentRate floating_containment_rate(const ConvexBody& body, long long n, double c, int replications,
                                          std::uint64_t master_seed, int threads = 0);

// OLS on (log n, log value); ci95 from the t-distribution on the residuals.
ScalingFit fit_scaling(const std::vector<std::pair<double, double>>& points);

// Thread-count resolution: requested > 0 wins, else GEOHULL_THREADS, else
// hardware concurrency.
int resolve_threads(int requested);
void parallel_for(int count, int threads, const std::function<void(int)>& fn);

}  // namespace geohull
