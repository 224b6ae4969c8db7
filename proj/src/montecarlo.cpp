#include "geohull/montecarlo.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <stdexcept>
#include <thread>

#include <boost/math/distributions/students_t.hpp>

#include "geohull/measure.hpp"
#include "geohull/quadrature.hpp"

namespace geohull {

void validate_config(const SimulationConfig& cfg) {
    const int d = cfg.body.geom().dim;
    if (cfg.n_grid.empty()) throw std::invalid_argument("n_grid: must be nonempty");
    for (size_t i = 0; i < cfg.n_grid.size(); ++i) {
        if (cfg.n_grid[i] < d + 1) throw std::invalid_argument("n_grid: every n must be at least d+1");
        if (i > 0 && cfg.n_grid[i] <= cfg.n_grid[i - 1])
            throw std::invalid_argument("n_grid: must be strictly increasing");
    }
    if (cfg.replications < 2) throw std::invalid_argument("replications: must be at least 2");
    if (cfg.statistics.empty()) throw std::invalid_argument("statistics: must be nonempty");
    for (const auto& s : cfg.statistics) {
        const bool known = s == "missed_volume" || s == "f0" || s == "fd1" || s == "mean_width_excess";
        if (!known) throw std::invalid_argument("statistics: unknown statistic '" + s + "'");
        if (cfg.model == Model::Inscribed && s == "mean_width_excess")
            throw std::invalid_argument("statistics: mean_width_excess requires the circumscribed model");
        if (cfg.model == Model::Circumscribed && (s == "missed_volume" || s == "f0"))
            throw std::invalid_argument("statistics: '" + s + "' requires the inscribed model");
    }
    if (cfg.model == Model::Circumscribed) {
        if (cfg.body.geom().kind != Space::Spherical)
            throw std::invalid_argument("model: the circumscribed model requires spherical geometry");
        if (cfg.u1_samples < 1) throw std::invalid_argument("u1_samples: must be positive");
    }
}

namespace {

// inverse CDF of the polar-angle density (sin/sinh/rho)^{d-1} on [0, tmax]
double sample_polar_angle(const Geometry& g, double tmax, double u) {
    const int d = g.dim;
    if (g.kind == Space::Euclidean) return tmax * std::pow(u, 1.0 / d);
    if (d == 2) {
        if (g.kind == Space::Spherical) return std::acos(1.0 - u * (1.0 - std::cos(tmax)));
        return std::acosh(1.0 + u * (std::cosh(tmax) - 1.0));
    }
    // d = 3: CDF has no closed-form inverse; bisection on the monotone CDF
    auto cdf = [&](double t) {
        if (g.kind == Space::Spherical) return 0.5 * (t - std::sin(t) * std::cos(t));
        return 0.5 * (std::sinh(t) * std::cosh(t) - t);
    };
    const double target = u * cdf(tmax);
    double lo = 0.0, hi = tmax;
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (cdf(mid) < target)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

Vec lift_polar(const Geometry& g, double theta, const Vec& omega) {
    const int d = g.dim;
    Vec x(d + 1);
    double s, c;
    switch (g.kind) {
        case Space::Spherical:
            s = std::sin(theta);
            c = std::cos(theta);
            break;
        case Space::Hyperbolic:
            s = std::sinh(theta);
            c = std::cosh(theta);
            break;
        case Space::Euclidean:
            s = theta;
            c = 1.0;
            break;
    }
    x.head(d) = s * omega;
    x[d] = c;
    return x;
}

}  // namespace

std::vector<Vec> sample_uniform(const ConvexBody& body, long long n, PhiloxRng& rng) {
    const Geometry& g = body.geom();
    const int d = g.dim;
    const BoundingCap cap = bounding_cap(body);
    const Mat frame = frame_to_point(g, cap.center);
    std::vector<Vec> out;
    out.reserve(static_cast<size_t>(n));
    Vec omega(d);
    long long window_proposals = 0, window_accepted = 0;
    while (static_cast<long long>(out.size()) < n) {
        const double theta = sample_polar_angle(g, cap.radius, rng.uniform());
        double nn = 0.0;
        do {
            for (int i = 0; i < d; ++i) omega[i] = rng.gaussian();
            nn = omega.norm();
        } while (nn < 1e-300);
        omega /= nn;
        const Vec x = frame * lift_polar(g, theta, omega);
        ++window_proposals;
        if (body.contains(x)) {
            ++window_accepted;
            out.push_back(x);
        }
        if (window_proposals == 1000000) {
            if (window_accepted < 100)
                throw std::runtime_error(
                    "sample_uniform: acceptance rate below 1e-4; bounding cap does not match the body");
            window_proposals = 0;
            window_accepted = 0;
        }
    }
    return out;
}

GeodesicPolytope sample_circumscribed(const ConvexBody& body, long long n, PhiloxRng& rng) {
    if (body.geom().kind != Space::Spherical)
        throw std::invalid_argument("sample_circumscribed: spherical geometry only");
    const ConvexBody kstar = spherical_polar(body);
    for (int attempt = 0; attempt < 100; ++attempt) {
        std::vector<Vec> poles = sample_uniform(kstar, n, rng);
        GeodesicPolytope kn;
        try {
            GeodesicPolytope pole_hull = convex_hull(body.geom(), poles);
            kn = polar_polytope(pole_hull);
        } catch (const DegenerateHullError&) {
            continue;
        }
        // spot-check K is inside every sampled hemisphere
        std::vector<Vec> probes = sample_uniform(body, 100, rng);
        for (const auto& p : poles)
            for (const auto& x : probes)
                if (p.dot(x) > 1e-9)
                    throw std::runtime_error("sample_circumscribed: containment check K <= K^(n) failed");
        return kn;
    }
    throw std::runtime_error("sample_circumscribed: 100 consecutive degenerate pole hulls");
}

double hull_volume(const GeodesicPolytope& p, int order) {
    if (p.geom.dim == 2) return gauss_bonnet_area(p);
    Eigen::Vector3d c(0.0, 0.0, 0.0);
    for (const auto& v : p.chart_vertices) c += Eigen::Vector3d(v[0], v[1], v[2]);
    c /= p.f0();
    double vol = 0.0;
    for (const auto& f : p.facets) {
        const Eigen::Vector3d a(p.chart_vertices[f[0]][0], p.chart_vertices[f[0]][1], p.chart_vertices[f[0]][2]);
        const Eigen::Vector3d b(p.chart_vertices[f[1]][0], p.chart_vertices[f[1]][1], p.chart_vertices[f[1]][2]);
        const Eigen::Vector3d e(p.chart_vertices[f[2]][0], p.chart_vertices[f[2]][1], p.chart_vertices[f[2]][2]);
        vol += integrate_tet_psi(p.geom, c, a, b, e, order);
    }
    return vol;
}

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("GEOHULL_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
    threads = std::min(resolve_threads(threads), count);
    if (threads <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex err_mutex;
    auto worker = [&] {
        while (true) {
            const int i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

namespace {

struct MomentStats {
    double mean = 0.0, variance = 0.0, stderr_mean = 0.0, stderr_var = 0.0;
};

MomentStats summarize(const std::vector<double>& x) {
    MomentStats s;
    const int r = static_cast<int>(x.size());
    double s1 = 0.0;
    for (double v : x) s1 += v;
    s.mean = s1 / r;
    double s2 = 0.0;
    for (double v : x) s2 += (v - s.mean) * (v - s.mean);
    s.variance = r > 1 ? s2 / (r - 1) : 0.0;
    s.stderr_mean = std::sqrt(s.variance / r);
    if (r >= 3) {
        // delete-one jackknife for the variance estimator
        std::vector<double> vj(r);
        double vbar = 0.0;
        for (int i = 0; i < r; ++i) {
            const double mi = (s1 - x[i]) / (r - 1);
            double ss = 0.0;
            for (int j = 0; j < r; ++j) {
                if (j == i) continue;
                ss += (x[j] - mi) * (x[j] - mi);
            }
            vj[i] = ss / (r - 2);
            vbar += vj[i];
        }
        vbar /= r;
        double jsum = 0.0;
        for (int i = 0; i < r; ++i) jsum += (vj[i] - vbar) * (vj[i] - vbar);
        s.stderr_var = std::sqrt(jsum * (r - 1) / r);
    }
    return s;
}

std::vector<EstimatorSummary> reduce_summaries(const SimulationConfig& cfg, const char* model_name,
                                               const std::vector<std::vector<std::vector<double>>>& values) {
    // values[stat][n_index][replication], reduced in fixed replication order
    std::vector<EstimatorSummary> out;
    for (size_t s = 0; s < cfg.statistics.size(); ++s) {
        for (size_t i = 0; i < cfg.n_grid.size(); ++i) {
            const MomentStats m = summarize(values[s][i]);
            EstimatorSummary es;
            es.model = model_name;
            es.statistic = cfg.statistics[s];
            es.n = cfg.n_grid[i];
            es.mean = m.mean;
            es.variance = m.variance;
            es.stderr_mean = m.stderr_mean;
            es.stderr_var = m.stderr_var;
            es.replications = cfg.replications;
            es.seed = cfg.master_seed;
            out.push_back(es);
        }
    }
    return out;
}

[[noreturn]] void rethrow_with_stream(std::uint64_t stream, const std::exception& e) {
    throw std::runtime_error("replication failed (rng stream " + std::to_string(stream) + "): " + e.what());
}

}  // namespace

std::vector<EstimatorSummary> run_inscribed_experiment(const SimulationConfig& cfg, int threads) {
    validate_config(cfg);
    if (cfg.model != Model::Inscribed) throw std::invalid_argument("model: expected the inscribed model");
    const double vol = body_volume(cfg.body);
    const int reps = cfg.replications;
    const int nn = static_cast<int>(cfg.n_grid.size());
    std::vector<std::vector<std::vector<double>>> values(
        cfg.statistics.size(), std::vector<std::vector<double>>(nn, std::vector<double>(reps, 0.0)));
    parallel_for(nn * reps, threads, [&](int task) {
        const int i = task / reps, r = task % reps;
        const long long n = cfg.n_grid[i];
        const std::uint64_t stream =
            stream_id(cfg.master_seed, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(r));
        try {
            PhiloxRng rng(stream);
            const std::vector<Vec> pts = sample_uniform(cfg.body, n, rng);
            const GeodesicPolytope hull = convex_hull(cfg.body.geom(), pts);
            for (size_t s = 0; s < cfg.statistics.size(); ++s) {
                const std::string& stat = cfg.statistics[s];
                double v = 0.0;
                if (stat == "missed_volume")
                    v = std::max(vol - hull_volume(hull), 0.0);
                else if (stat == "f0")
                    v = hull.f0();
                else if (stat == "fd1")
                    v = hull.num_facets();
                values[s][i][r] = v;
            }
        } catch (const std::exception& e) {
            rethrow_with_stream(stream, e);
        }
    });
    return reduce_summaries(cfg, "inscribed", values);
}

std::vector<EstimatorSummary> run_circumscribed_experiment(const SimulationConfig& cfg, int threads) {
    validate_config(cfg);
    if (cfg.model != Model::Circumscribed) throw std::invalid_argument("model: expected the circumscribed model");
    const int reps = cfg.replications;
    const int nn = static_cast<int>(cfg.n_grid.size());
    std::vector<std::vector<std::vector<double>>> values(
        cfg.statistics.size(), std::vector<std::vector<double>>(nn, std::vector<double>(reps, 0.0)));
    parallel_for(nn * reps, threads, [&](int task) {
        const int i = task / reps, r = task % reps;
        const long long n = cfg.n_grid[i];
        const std::uint64_t stream =
            stream_id(cfg.master_seed, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(r));
        try {
            PhiloxRng rng(stream);
            const GeodesicPolytope kn = sample_circumscribed(cfg.body, n, rng);
            for (size_t s = 0; s < cfg.statistics.size(); ++s) {
                const std::string& stat = cfg.statistics[s];
                double v = 0.0;
                if (stat == "fd1")
                    v = kn.num_facets();
                else if (stat == "mean_width_excess")
                    v = mean_width_excess(kn, cfg.body, cfg.u1_samples, splitmix64(stream ^ 0x9E3779B97F4A7C15ULL))
                            .estimate;
                values[s][i][r] = v;
            }
        } catch (const std::exception& e) {
            rethrow_with_stream(stream, e);
        }
    });
    return reduce_summaries(cfg, "circumscribed", values);
}

std::vector<EstimatorSummary> run_experiment(const SimulationConfig& cfg, int threads) {
    return cfg.model == Model::Inscribed ? run_inscribed_experiment(cfg, threads)
                                         : run_circumscribed_experiment(cfg, threads);
}

EfronSteinResult efron_stein_diagnostic(const ConvexBody& body, long long n, int replications,
                                        std::uint64_t master_seed, int threads) {
    const Geometry& g = body.geom();
    if (n < g.dim + 1) throw std::invalid_argument("efron_stein_diagnostic: n must be at least d+1");
    if (replications < 3) throw std::invalid_argument("efron_stein_diagnostic: need at least 3 replications");
    std::vector<double> vols(replications), incr2(replications);
    parallel_for(replications, threads, [&](int r) {
        const std::uint64_t stream =
            stream_id(master_seed, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(r));
        try {
            PhiloxRng rng(stream);
            std::vector<Vec> pts = sample_uniform(body, n + 1, rng);
            const Vec extra = pts.back();
            pts.pop_back();
            const GeodesicPolytope kn = convex_hull(g, pts);
            const double vn = hull_volume(kn);
            // increment, route one: visible-facet simplex decomposition
            const Vec xq = kn.chart_of(extra);
            double inc_facets = 0.0;
            if (!polytope_contains_chart(kn, xq)) {
                for (int f : visible_facets(kn, xq)) {
                    if (g.dim == 2) {
                        GeodesicPolytope tri;
                        tri.geom = g;
                        tri.frame = kn.frame;
                        Vec a = kn.chart_vertices[kn.facets[f][0]];
                        Vec b = kn.chart_vertices[kn.facets[f][1]];
                        const double cr = (b[0] - a[0]) * (xq[1] - a[1]) - (b[1] - a[1]) * (xq[0] - a[0]);
                        if (cr < 0.0) std::swap(a, b);
                        tri.chart_vertices = {a, b, xq};
                        tri.facets = {{0, 1}, {1, 2}, {2, 0}};
                        inc_facets += gauss_bonnet_area(tri);
                    } else {
                        const auto& fc = kn.facets[f];
                        inc_facets += integrate_tet_psi(
                            g, Eigen::Vector3d(xq[0], xq[1], xq[2]),
                            Eigen::Vector3d(kn.chart_vertices[fc[0]][0], kn.chart_vertices[fc[0]][1],
                                            kn.chart_vertices[fc[0]][2]),
                            Eigen::Vector3d(kn.chart_vertices[fc[1]][0], kn.chart_vertices[fc[1]][1],
                                            kn.chart_vertices[fc[1]][2]),
                            Eigen::Vector3d(kn.chart_vertices[fc[2]][0], kn.chart_vertices[fc[2]][1],
                                            kn.chart_vertices[fc[2]][2]));
                    }
                }
            }
            // route two: direct volume difference
            pts.push_back(extra);
            const GeodesicPolytope kn1 = convex_hull(g, pts);
            const double inc_diff = hull_volume(kn1) - vn;
            if (std::abs(inc_facets - inc_diff) > 1e-7)
                throw std::runtime_error("efron_stein_diagnostic: increment computations disagree by " +
                                         std::to_string(std::abs(inc_facets - inc_diff)));
            vols[r] = vn;
            incr2[r] = inc_facets * inc_facets;
        } catch (const std::exception& e) {
            rethrow_with_stream(stream, e);
        }
    });
    const MomentStats mv = summarize(vols);
    const MomentStats mi = summarize(incr2);
    EfronSteinResult res;
    res.varhat = mv.variance;
    res.bound = (n + 1) * mi.mean;
    res.ratio = res.bound > 0.0 ? res.varhat / res.bound : 0.0;
    if (res.varhat > 0.0 && res.bound > 0.0) {
        const double rel_v = mv.stderr_var / res.varhat;
        const double rel_b = (n + 1) * mi.stderr_mean / res.bound;
        res.ratio_stderr = res.ratio * std::sqrt(rel_v * rel_v + rel_b * rel_b);
    }
    return res;
}

ContainmentRate floating_containment_rate(const ConvexBody& body, long long n, double c, int replications,
                                          std::uint64_t master_seed, int threads) {
    const Geometry& g = body.geom();
    if (g.dim != 2) throw std::invalid_argument("floating_containment_rate: d=2 only");
    const double vol = body_volume(body);
    const double t = vol * c * std::log(static_cast<double>(n)) / static_cast<double>(n);
    GeodesicPolytope fb;
    bool fb_empty = true;
    if (t < vol) {
        fb = floating_body_2d(body, t);
        fb_empty = fb.f0() == 0;
    }
    std::vector<int> success(replications, 0);
    std::vector<Vec> fb_ambient;
    for (int i = 0; i < fb.f0(); ++i) fb_ambient.push_back(fb.ambient_vertex(i));
    parallel_for(replications, threads, [&](int r) {
        const std::uint64_t stream =
            stream_id(master_seed, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(r));
        try {
            PhiloxRng rng(stream);
            const std::vector<Vec> pts = sample_uniform(body, n, rng);
            const GeodesicPolytope hull = convex_hull(g, pts);
            bool ok = true;
            for (const auto& v : fb_ambient)
                if (!polytope_contains_chart(hull, hull.chart_of(v))) {
                    ok = false;
                    break;
                }
            success[r] = (fb_empty || ok) ? 1 : 0;
        } catch (const std::exception& e) {
            rethrow_with_stream(stream, e);
        }
    });
    int hits = 0;
    for (int s : success) hits += s;
    ContainmentRate cr;
    cr.rate = static_cast<double>(hits) / replications;
    cr.stderror = std::sqrt(cr.rate * (1.0 - cr.rate) / replications);
    return cr;
}

ScalingFit fit_scaling(const std::vector<std::pair<double, double>>& points) {
    const int k = static_cast<int>(points.size());
    if (k < 3) throw std::invalid_argument("fit_scaling: need at least 3 points");
    std::vector<double> lx(k), ly(k);
    for (int i = 0; i < k; ++i) {
        if (points[i].second <= 0.0) throw std::invalid_argument("fit_scaling: values must be positive");
        lx[i] = std::log(points[i].first);
        ly[i] = std::log(points[i].second);
    }
    double mx = 0.0, my = 0.0;
    for (int i = 0; i < k; ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= k;
    my /= k;
    double sxx = 0.0, sxy = 0.0;
    for (int i = 0; i < k; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if (sxx <= 0.0) throw std::invalid_argument("fit_scaling: degenerate abscissae");
    ScalingFit fit;
    fit.points = k;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ssr = 0.0;
    for (int i = 0; i < k; ++i) {
        const double res = ly[i] - (fit.intercept + fit.slope * lx[i]);
        ssr += res * res;
    }
    fit.residual_rms = std::sqrt(ssr / k);
    const int dof = k - 2;
    const double sigma2 = ssr / dof;
    const double se_slope = std::sqrt(sigma2 / sxx);
    const boost::math::students_t dist(dof);
    fit.ci95 = boost::math::quantile(dist, 0.975) * se_slope;
    return fit;
}

}  // namespace geohull
