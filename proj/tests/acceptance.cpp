// Acceptance gate: each criterion prints exactly one PASS/FAIL line and the
// binary exits nonzero on failure. Criterion index is the single argument.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "geohull/io.hpp"
#include "geohull/measure.hpp"
#include "geohull/montecarlo.hpp"

using namespace geohull;
namespace fs = std::filesystem;

namespace {

Vec v3(double a, double b, double c) {
    Vec v(3);
    v << a, b, c;
    return v;
}

Vec v2(double a, double b) {
    Vec v(2);
    v << a, b;
    return v;
}

struct Check {
    bool ok = true;
    std::string detail;

    void require(bool cond, const std::string& what) {
        if (!cond) ok = false;
        if (!detail.empty()) detail += "; ";
        detail += what + (cond ? " ok" : " FAILED");
    }
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

ConvexBody ball_body(Space kind, int dim, double r) {
    Vec c = Vec::Zero(dim + 1);
    c[dim] = 1.0;
    return make_ball(Geometry{kind, dim}, c, r);
}

ScalingFit slope_of(const std::vector<EstimatorSummary>& rows, const std::string& stat, bool variance) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& r : rows)
        if (r.statistic == stat) pts.emplace_back(static_cast<double>(r.n), variance ? r.variance : r.mean);
    return fit_scaling(pts);
}

std::vector<long long> dyadic(int lo, int hi) {
    std::vector<long long> g;
    for (int k = lo; k <= hi; ++k) g.push_back(1LL << k);
    return g;
}

// ---- criterion 1: inscribed expectation exponents, d=2 ----
Check criterion1() {
    Check c;
    for (const auto kind : {Space::Spherical, Space::Hyperbolic}) {
        SimulationConfig cfg{ball_body(kind, 2, 0.8)};
        cfg.model = Model::Inscribed;
        cfg.n_grid = dyadic(7, 13);
        cfg.replications = 400;
        cfg.master_seed = 20260826;
        cfg.statistics = {"missed_volume", "f0"};
        const auto rows = run_inscribed_experiment(cfg);
        const ScalingFit missed = slope_of(rows, "missed_volume", false);
        const ScalingFit f0 = slope_of(rows, "f0", false);
        const std::string name = kind == Space::Spherical ? "spherical" : "hyperbolic";
        c.require(std::abs(missed.slope + 2.0 / 3.0) <= 0.08, name + " missed slope " + fmt(missed.slope));
        c.require(std::abs(f0.slope - 1.0 / 3.0) <= 0.08, name + " f0 slope " + fmt(f0.slope));
    }
    return c;
}

// ---- criterion 2: variance exponents, d=2 ----
Check criterion2() {
    Check c;
    for (const auto kind : {Space::Spherical, Space::Hyperbolic}) {
        SimulationConfig cfg{ball_body(kind, 2, 0.8)};
        cfg.model = Model::Inscribed;
        cfg.n_grid = dyadic(7, 13);
        cfg.replications = 2000;
        cfg.master_seed = 31337;
        cfg.statistics = {"missed_volume", "f0"};
        const auto rows = run_inscribed_experiment(cfg);
        const ScalingFit var_vol = slope_of(rows, "missed_volume", true);
        const ScalingFit var_f0 = slope_of(rows, "f0", true);
        const std::string name = kind == Space::Spherical ? "spherical" : "hyperbolic";
        c.require(std::abs(var_vol.slope + 5.0 / 3.0) <= 0.2, name + " Var(Vol) slope " + fmt(var_vol.slope));
        c.require(std::abs(var_f0.slope - 1.0 / 3.0) <= 0.15, name + " Var(f0) slope " + fmt(var_f0.slope));
    }
    return c;
}

// ---- criterion 3: d=3 missed-volume exponent ----
Check criterion3() {
    Check c;
    SimulationConfig cfg{ball_body(Space::Spherical, 3, 0.8)};
    cfg.model = Model::Inscribed;
    cfg.n_grid = dyadic(7, 11);
    cfg.replications = 400;
    cfg.master_seed = 777;
    cfg.statistics = {"missed_volume"};
    const ScalingFit fit = slope_of(run_inscribed_experiment(cfg), "missed_volume", false);
    c.require(std::abs(fit.slope + 0.5) <= 0.1, "d=3 missed slope " + fmt(fit.slope));
    return c;
}

// ---- criterion 4: circumscribed model exponents ----
Check criterion4() {
    Check c;
    SimulationConfig cfg{ball_body(Space::Spherical, 2, 0.8)};
    cfg.model = Model::Circumscribed;
    cfg.n_grid = dyadic(7, 13);
    cfg.replications = 400;
    cfg.master_seed = 4242;
    cfg.statistics = {"fd1"};
    const auto rows = run_circumscribed_experiment(cfg);
    const ScalingFit fd1_mean = slope_of(rows, "fd1", false);
    const ScalingFit fd1_var = slope_of(rows, "fd1", true);
    c.require(std::abs(fd1_mean.slope - 1.0 / 3.0) <= 0.08, "E[fd1] slope " + fmt(fd1_mean.slope));
    c.require(std::abs(fd1_var.slope - 1.0 / 3.0) <= 0.15, "Var(fd1) slope " + fmt(fd1_var.slope));

    SimulationConfig u1cfg = cfg;
    u1cfg.replications = 48;
    u1cfg.statistics = {"mean_width_excess"};
    u1cfg.u1_samples = 1000000;
    const ScalingFit u1 = slope_of(run_circumscribed_experiment(u1cfg), "mean_width_excess", false);
    c.require(std::abs(u1.slope + 2.0 / 3.0) <= 0.12, "E[U1 excess] slope " + fmt(u1.slope));
    return c;
}

// ---- criterion 5: wet-part law ----
Check criterion5() {
    Check c;
    for (const auto kind : {Space::Spherical, Space::Hyperbolic}) {
        const ConvexBody body = ball_body(kind, 2, 0.8);
        const double vol = body_volume(body);
        std::vector<std::pair<double, double>> pts;
        for (int k = 6; k <= 14; ++k) {
            const double t = std::ldexp(vol, -k);
            pts.emplace_back(t, wet_part_volume(body, t));
        }
        const ScalingFit fit = fit_scaling(pts);
        const std::string name = kind == Space::Spherical ? "spherical" : "hyperbolic";
        c.require(std::abs(fit.slope - 2.0 / 3.0) <= 0.05, name + " wet-part slope " + fmt(fit.slope));
    }
    return c;
}

// ---- criterion 6: cap-cover clauses and cap-count exponent ----
Check criterion6() {
    Check c;
    const ConvexBody ball = ball_body(Space::Spherical, 2, 0.8);
    const ConvexBody square = make_chart_polytope(Geometry{Space::Spherical, 2},
                                                  {v2(-0.35, -0.35), v2(0.35, -0.35), v2(0.35, 0.35), v2(-0.35, 0.35)});
    for (const ConvexBody* body : {&ball, &square}) {
        const double vol = body_volume(*body);
        const std::string name = body == &ball ? "ball" : "square";
        for (int k : {9, 11, 13}) {
            const double t = std::ldexp(vol, -k);
            try {
                const CapCover cover = cap_cover_2d(*body, t);
                verify_cap_cover(*body, cover, 1000 + k);
                const double ratio = static_cast<double>(cover.inner_sets.size()) / cover.caps.size();
                c.require(ratio >= 0.25 && ratio <= 1.0, name + " 2^-" + std::to_string(k) + " m'/m " + fmt(ratio));
            } catch (const std::exception& e) {
                c.require(false, name + " 2^-" + std::to_string(k) + " clauses (" + e.what() + ")");
            }
        }
    }
    const double vol = body_volume(ball);
    std::vector<std::pair<double, double>> pts;
    for (int k = 9; k <= 15; ++k) {
        const double t = std::ldexp(vol, -k);
        pts.emplace_back(t, static_cast<double>(cap_cover_2d(ball, t).caps.size()));
    }
    const ScalingFit fit = fit_scaling(pts);
    c.require(std::abs(fit.slope + 1.0 / 3.0) <= 0.08, "cap count slope " + fmt(fit.slope));
    return c;
}

// ---- criterion 7: Efron-Stein diagnostic ----
Check criterion7() {
    Check c;
    const ConvexBody ball = ball_body(Space::Spherical, 2, 0.8);
    for (long long n : {256LL, 1024LL}) {
        // the increment agreement (1e-7) is enforced inside on every replication
        const EfronSteinResult res = efron_stein_diagnostic(ball, n, 2000, 55 + n);
        c.require(res.ratio <= 1.0 + 3 * res.ratio_stderr,
                  "n=" + std::to_string(n) + " ratio " + fmt(res.ratio) + " (+/- " + fmt(res.ratio_stderr) + ")");
    }
    return c;
}

// ---- criterion 8: oracle equivalences ----
std::vector<int> angular_sweep_hull(const std::vector<Eigen::Vector2d>& pts) {
    const int n = static_cast<int>(pts.size());
    int pivot = 0;
    for (int i = 1; i < n; ++i)
        if (pts[i].y() < pts[pivot].y() || (pts[i].y() == pts[pivot].y() && pts[i].x() < pts[pivot].x())) pivot = i;
    std::vector<int> order;
    for (int i = 0; i < n; ++i)
        if (i != pivot) order.push_back(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const double aa = std::atan2(pts[a].y() - pts[pivot].y(), pts[a].x() - pts[pivot].x());
        const double ab = std::atan2(pts[b].y() - pts[pivot].y(), pts[b].x() - pts[pivot].x());
        if (aa != ab) return aa < ab;
        const double da = (pts[a] - pts[pivot]).squaredNorm(), db = (pts[b] - pts[pivot]).squaredNorm();
        if (da != db) return da < db;
        return a < b;
    });
    std::vector<int> st{pivot};
    for (int i : order) {
        while (st.size() >= 2) {
            const Eigen::Vector2d& a = pts[st[st.size() - 2]];
            const Eigen::Vector2d& b = pts[st.back()];
            if ((b.x() - a.x()) * (pts[i].y() - a.y()) - (b.y() - a.y()) * (pts[i].x() - a.x()) <= 1e-12)
                st.pop_back();
            else
                break;
        }
        st.push_back(i);
    }
    return st;
}

Check criterion8() {
    Check c;
    // gauss-bonnet vs psi-quadrature on 1e3 random polygons per geometry
    for (const auto kind : {Space::Spherical, Space::Hyperbolic}) {
        const Geometry g{kind, 2};
        double worst = 0.0;
        for (int inst = 0; inst < 1000; ++inst) {
            PhiloxRng rng(80800 + inst + (kind == Space::Hyperbolic ? 100000 : 0));
            std::vector<Vec> pts;
            const int n = 4 + static_cast<int>(rng.uniform() * 12);
            for (int i = 0; i < n; ++i) {
                Vec p(2);
                do {
                    p << rng.uniform(-0.8, 0.8), rng.uniform(-0.8, 0.8);
                } while (p.norm() > 0.8);
                pts.push_back(gnomonic_inverse(g, p));
            }
            GeodesicPolytope h;
            try {
                h = convex_hull(g, pts);
            } catch (const DegenerateHullError&) {
                continue;
            }
            worst = std::max(worst, std::abs(gauss_bonnet_area(h) - polytope_volume(h).value));
        }
        c.require(worst < 1e-7, (kind == Space::Spherical ? std::string("spherical") : "hyperbolic") +
                                    " area oracle gap " + fmt(worst * 1e9) + "e-9");
    }
    // hull vs angular sweep, 1e3 instances
    {
        const Geometry g{Space::Spherical, 2};
        bool all = true;
        for (int inst = 0; inst < 1000; ++inst) {
            PhiloxRng rng(50000 + inst);
            const int n = 5 + static_cast<int>(rng.uniform() * 200);
            std::vector<Vec> pts;
            for (int i = 0; i < n; ++i) {
                Vec p(2);
                p << rng.uniform(-0.8, 0.8), rng.uniform(-0.8, 0.8);
                pts.push_back(gnomonic_inverse(g, p));
            }
            const GeodesicPolytope h = convex_hull(g, pts);
            std::vector<Eigen::Vector2d> chart;
            for (const auto& x : pts) {
                const Vec q = h.chart_of(x);
                chart.emplace_back(q[0], q[1]);
            }
            const std::vector<int> oracle = angular_sweep_hull(chart);
            const std::set<int> sa(h.provenance.begin(), h.provenance.end());
            const std::set<int> sb(oracle.begin(), oracle.end());
            all = all && sa == sb;
        }
        c.require(all, "hull vs angular sweep (1000 instances)");
    }
    // polar involution within 1e-10
    {
        const Geometry g{Space::Spherical, 2};
        double worst = 0.0;
        for (int inst = 0; inst < 200; ++inst) {
            PhiloxRng rng(60000 + inst);
            std::vector<Vec> pts;
            const int n = 3 + static_cast<int>(rng.uniform() * 10);
            for (int i = 0; i < n; ++i) {
                Vec p(2);
                p << rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5);
                pts.push_back(gnomonic_inverse(g, p));
            }
            GeodesicPolytope h;
            try {
                h = convex_hull(g, pts);
            } catch (const DegenerateHullError&) {
                continue;
            }
            const GeodesicPolytope back = polar_polytope(polar_polytope(h));
            if (back.f0() != h.f0()) {
                worst = 1.0;
                break;
            }
            for (int i = 0; i < h.f0(); ++i) {
                const Vec v = h.ambient_vertex(i);
                double best = 1e9;
                for (int j = 0; j < back.f0(); ++j) best = std::min(best, (back.ambient_vertex(j) - v).norm());
                worst = std::max(worst, best);
            }
        }
        c.require(worst < 1e-10, "polar involution gap " + fmt(worst * 1e12) + "e-12");
    }
    return c;
}

// ---- criterion 9: Lemma 2.1 chart cap-volume ratio ----
Check criterion9() {
    Check c;
    const ConvexBody ball = ball_body(Space::Spherical, 2, 0.5);
    const double vol = body_volume(ball);
    std::vector<std::pair<double, double>> pts;
    bool ratio_ok = true;
    for (int k = 4; k <= 14; ++k) {
        const double t = std::ldexp(vol, -k);
        const double a = cap_offset_for_volume(ball, v2(0, 1), t);
        const double ratio = cap_chart_area(ball, CapCut{v2(0, 1), a}) / t;
        ratio_ok = ratio_ok && ratio >= 1.0 - 1e-9;
        pts.emplace_back(t, ratio);
    }
    const ScalingFit fit = fit_scaling(pts);
    c.require(ratio_ok, "ratio >= 1");
    c.require(std::abs(fit.slope) <= 0.02, "log-ratio slope " + fmt(fit.slope));
    return c;
}

// ---- criterion 10: byte-identical summaries across thread counts ----
Check criterion10() {
    Check c;
    const fs::path dir = fs::temp_directory_path() / "geohull_acceptance10";
    fs::create_directories(dir);
    const std::string cfg_path = (dir / "config.json").string();
    std::ofstream(cfg_path) << R"({
  "schema_version": 1,
  "model": "inscribed",
  "body": {"shape": "ball", "geometry": "spherical", "dim": 2, "radius": 0.8},
  "n_grid": [128, 256, 512, 1024, 2048, 4096, 8192],
  "replications": 400,
  "master_seed": 20260826,
  "statistics": ["missed_volume", "f0"]
})";
    auto run = [&](const std::string& out, int threads) {
        const std::string cmd = std::string(GEOHULL_BIN) + " simulate -c " + cfg_path + " -o " + (dir / out).string() +
                                " --threads " + std::to_string(threads) + " > /dev/null 2>&1";
        return std::system(cmd.c_str());
    };
    c.require(run("t1", 1) == 0, "run with 1 thread");
    c.require(run("t8", 8) == 0, "run with 8 threads");
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    const std::string a = slurp(dir / "t1" / "summaries.csv");
    const std::string b = slurp(dir / "t8" / "summaries.csv");
    c.require(!a.empty() && a == b, "summaries byte-identical");
    return c;
}

const char* kNames[10] = {
    "inscribed expectation exponents (d=2, spherical + hyperbolic)",
    "variance exponents (d=2, spherical + hyperbolic)",
    "d=3 missed-volume exponent",
    "circumscribed model exponents",
    "wet-part volume law",
    "cap-cover clauses and cap-count exponent",
    "Efron-Stein variance bound",
    "oracle equivalences (area, hull, polarity)",
    "chart cap-volume ratio stability",
    "determinism across worker threads",
};

}  // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: acceptance <criterion 1-10>\n";
        return 2;
    }
    const int idx = std::atoi(argv[1]);
    if (idx < 1 || idx > 10) {
        std::cerr << "criterion must be 1-10\n";
        return 2;
    }
    Check c;
    try {
        switch (idx) {
            case 1: c = criterion1(); break;
            case 2: c = criterion2(); break;
            case 3: c = criterion3(); break;
            case 4: c = criterion4(); break;
            case 5: c = criterion5(); break;
            case 6: c = criterion6(); break;
            case 7: c = criterion7(); break;
            case 8: c = criterion8(); break;
            case 9: c = criterion9(); break;
            case 10: c = criterion10(); break;
        }
    } catch (const std::exception& e) {
        c.ok = false;
        c.detail += std::string(" unhandled error: ") + e.what();
    }
    std::cout << (c.ok ? "PASS" : "FAIL") << " criterion " << idx << ": " << kNames[idx - 1] << " [" << c.detail
              << "]\n";
    return c.ok ? 0 : 1;
}
