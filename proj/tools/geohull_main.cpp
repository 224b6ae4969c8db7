#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "geohull/io.hpp"
#include "geohull/measure.hpp"
#include "geohull/montecarlo.hpp"

namespace fs = std::filesystem;
using namespace geohull;

namespace {

ConvexBody load_body(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("config: cannot open body file '" + path + "'");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config: invalid JSON in body file: ") + e.what());
    }
    return body_from_json(j);
}

double resolve_t(const ConvexBody& body, double t_abs, double t_frac) {
    if ((t_abs > 0.0) == (t_frac > 0.0))
        throw ConfigError("config: exactly one of --t and --t-frac must be given");
    return t_abs > 0.0 ? t_abs : t_frac * body_volume(body);
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir, std::uint64_t seed, bool seed_set,
                 int threads) {
    ParsedConfig cfg = load_config(config_path);
    if (seed_set) {
        nlohmann::json j = cfg.canonical;
        j["master_seed"] = seed;
        cfg = parse_config(j.dump());
    }
    fs::create_directories(out_dir);
    const std::string started = utc_timestamp();
    const std::vector<EstimatorSummary> rows = run_experiment(cfg.sim, threads);
    const std::string summaries = (fs::path(out_dir) / "summaries.csv").string();
    const std::string manifest = (fs::path(out_dir) / "manifest.json").string();
    write_summaries_csv(summaries, rows);
    write_manifest(manifest, cfg, started, utc_timestamp(), {summaries});
    std::cout << "wrote " << summaries << " (" << rows.size() << " rows)\n";
    return 0;
}

int cmd_scaling(const std::string& summaries_path, const std::string& stat, const std::string& target,
                const std::string& out_path, bool has_expected, double expected, double slack) {
    const auto rows = read_summaries_csv(summaries_path);
    std::vector<std::pair<double, double>> points;
    for (const auto& r : rows)
        if (r.statistic == stat) points.emplace_back(static_cast<double>(r.n), target == "mean" ? r.mean : r.variance);
    if (points.size() < 3) throw ConfigError("config: need at least 3 rows for statistic '" + stat + "'");
    const ScalingFit fit = fit_scaling(points);
    write_scaling_json(out_path, fit);
    std::cout << "slope " << format_double(fit.slope) << " +/- " << format_double(fit.ci95) << " (95% CI), intercept "
              << format_double(fit.intercept) << ", residual rms " << format_double(fit.residual_rms) << ", "
              << fit.points << " points\n";
    if (has_expected && std::abs(fit.slope - expected) > fit.ci95 + slack) {
        std::cerr << "slope " << format_double(fit.slope) << " deviates from expected " << format_double(expected)
                  << " by more than ci95 + slack\n";
        return 2;
    }
    return 0;
}

int cmd_floating(const std::string& body_path, double t_abs, double t_frac, int n_dirs, const std::string& out_path) {
    const ConvexBody body = load_body(body_path);
    const double t = resolve_t(body, t_abs, t_frac);
    const GeodesicPolytope fb = floating_body_2d(body, t, n_dirs);
    std::vector<Eigen::Vector2d> poly;
    for (const auto& v : fb.chart_vertices) poly.emplace_back(v[0], v[1]);
    if (!out_path.empty()) write_polygon_csv(out_path, poly);
    const double vol = body_volume(body);
    const double wet = fb.f0() == 0 ? vol : vol - polytope_volume(fb).value;
    if (fb.f0() == 0)
        std::cout << "floating body is empty\n";
    else
        std::cout << "floating body: " << fb.f0() << " vertices\n";
    std::cout << "wet part volume " << format_double(wet) << " of body volume " << format_double(vol) << "\n";
    return 0;
}

int cmd_capcover(const std::string& body_path, double t_abs, double t_frac, double lambda, std::uint64_t seed,
                 const std::string& out_path) {
    const ConvexBody body = load_body(body_path);
    const double t = resolve_t(body, t_abs, t_frac);
    const CapCover cover = cap_cover_2d(body, t, lambda);
    try {
        verify_cap_cover(body, cover, seed);
    } catch (const std::exception& e) {
        std::cerr << "cap cover verification failed: " << e.what() << "\n";
        return 2;
    }
    nlohmann::json j;
    j["t"] = cover.t;
    j["lambda"] = cover.lambda;
    j["threshold_flagged"] = cover.threshold_flagged;
    j["verified"] = true;
    nlohmann::json caps = nlohmann::json::array();
    for (const auto& c : cover.caps) caps.push_back({{"normal", {c.normal[0], c.normal[1]}}, {"offset", c.offset}});
    j["caps"] = caps;
    nlohmann::json inner = nlohmann::json::array();
    for (const auto& s : cover.inner_sets) {
        nlohmann::json poly = nlohmann::json::array();
        for (const auto& p : s) poly.push_back({p.x(), p.y()});
        inner.push_back(poly);
    }
    j["inner_sets"] = inner;
    if (!out_path.empty()) {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open '" + out_path + "' for writing");
        out << j.dump(2) << '\n';
    }
    std::cout << cover.caps.size() << " caps, all four clauses verified"
              << (cover.threshold_flagged ? " (t above the curvature-adjusted threshold)" : "") << "\n";
    return 0;
}

int cmd_meanwidth(const std::string& body_path, long long samples, std::uint64_t seed) {
    const ConvexBody body = load_body(body_path);
    const MeanWidthEstimate est = mean_width_u1(body, samples, seed);
    std::cout << "U1 estimate " << format_double(est.estimate) << " +/- " << format_double(est.stderror) << " ("
              << est.hits << "/" << est.samples << " hits)\n";
    return 0;
}

int cmd_polar(const std::string& body_path, const std::string& out_path) {
    const ConvexBody body = load_body(body_path);
    const ConvexBody polar = spherical_polar(body);
    const nlohmann::json j = body_to_json(polar);
    if (!out_path.empty()) {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open '" + out_path + "' for writing");
        out << j.dump(2) << '\n';
    }
    std::cout << j.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monte Carlo laboratory for random polytopes in spherical, hyperbolic and Euclidean convex bodies"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out", body_path, out_path;
    std::string summaries_path, stat, target = "mean";
    std::uint64_t seed = 0;
    bool seed_set = false;
    int threads = 0, n_dirs = 2048;
    double t_abs = 0.0, t_frac = 0.0, lambda = 6.0, expected = 0.0, slack = 0.0;
    bool has_expected = false;
    long long samples = 1000000;

    auto* sim = app.add_subcommand("simulate", "run an experiment from a config file");
    sim->add_option("-c,--config", config_path, "config JSON")->required();
    sim->add_option("-o,--out", out_dir, "output directory");
    sim->add_option("--seed", seed, "override master_seed")->each([&](const std::string&) { seed_set = true; });
    sim->add_option("--threads", threads, "worker thread cap");

    auto* sc = app.add_subcommand("scaling", "fit a log-log slope from a summaries file");
    sc->add_option("summaries", summaries_path, "summaries.csv path")->required();
    sc->add_option("--stat", stat, "statistic name")->required();
    sc->add_option("--target", target, "mean|variance")->check(CLI::IsMember({"mean", "variance"}));
    sc->add_option("-o,--out", out_path, "scaling.json path");
    sc->add_option("--expected", expected, "expected slope")->each([&](const std::string&) { has_expected = true; });
    sc->add_option("--slack", slack, "extra slope tolerance");

    auto* fl = app.add_subcommand("floating", "compute a floating body and the wet-part volume");
    fl->add_option("-b,--body", body_path, "body JSON")->required();
    fl->add_option("--t", t_abs, "cap volume threshold (absolute)");
    fl->add_option("--t-frac", t_frac, "cap volume threshold as a fraction of Vol(K)");
    fl->add_option("--dirs", n_dirs, "direction count");
    fl->add_option("-o,--out", out_path, "chart-vertex CSV path");

    auto* cc = app.add_subcommand("capcover", "build and verify an economic cap cover");
    cc->add_option("-b,--body", body_path, "body JSON")->required();
    cc->add_option("--t", t_abs, "cap volume (absolute)");
    cc->add_option("--t-frac", t_frac, "cap volume as a fraction of Vol(K)");
    cc->add_option("--lambda", lambda, "dilation factor");
    cc->add_option("--seed", seed, "verification sampling seed");
    cc->add_option("-o,--out", out_path, "cover JSON path");

    auto* mw = app.add_subcommand("meanwidth", "Monte Carlo mean width U1");
    mw->add_option("-b,--body", body_path, "body JSON")->required();
    mw->add_option("--samples", samples, "MC sample count");
    mw->add_option("--seed", seed, "rng seed");

    auto* po = app.add_subcommand("polar", "spherical polar body");
    po->add_option("-b,--body", body_path, "body JSON")->required();
    po->add_option("-o,--out", out_path, "polar body JSON path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) return cmd_simulate(config_path, out_dir, seed, seed_set, threads);
        if (sc->parsed())
            return cmd_scaling(summaries_path, stat, target, out_path.empty() ? "scaling.json" : out_path,
                               has_expected, expected, slack);
        if (fl->parsed()) return cmd_floating(body_path, t_abs, t_frac, n_dirs, out_path);
        if (cc->parsed()) return cmd_capcover(body_path, t_abs, t_frac, lambda, seed, out_path);
        if (mw->parsed()) return cmd_meanwidth(body_path, samples, seed);
        if (po->parsed()) return cmd_polar(body_path, out_path);
    } catch (const ConfigError& e) {
        std::cerr << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }
    return 0;
}
