#include <doctest.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "geohull/io.hpp"
#include "geohull/measure.hpp"

using namespace geohull;
namespace fs = std::filesystem;

namespace {

struct CliResult {
    int exit_code;
    std::string output;  // stdout + stderr
};

CliResult run_cli(const std::string& args) {
    const std::string cmd = std::string(GEOHULL_BIN) + " " + args + " 2>&1";
    std::array<char, 4096> buf{};
    std::string out;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    while (fgets(buf.data(), buf.size(), pipe)) out += buf.data();
    const int status = pclose(pipe);
    return {WEXITSTATUS(status), out};
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path tmpdir() {
    const fs::path p = fs::temp_directory_path() / "geohull_io_test";
    fs::create_directories(p);
    return p;
}

const char* kMinimalConfig = R"({
  "schema_version": 1,
  "model": "inscribed",
  "body": {"shape": "ball", "geometry": "spherical", "dim": 2, "radius": 0.8},
  "n_grid": [8, 16],
  "replications": 4,
  "master_seed": 42,
  "statistics": ["missed_volume", "f0"]
})";

}  // namespace

TEST_SUITE("io") {

TEST_CASE("config parsing and strictness") {
    const ParsedConfig cfg = parse_config(kMinimalConfig);
    CHECK(cfg.sim.n_grid == std::vector<long long>{8, 16});
    CHECK(cfg.sim.master_seed == 42);
    CHECK(cfg.sim.body.is_ball());

    CHECK_THROWS_WITH_AS(parse_config(R"({"schema_version":1,"bogus":3})"),
                         "config: unknown field 'bogus' in config", ConfigError);
    nlohmann::json j = nlohmann::json::parse(kMinimalConfig);
    j["replications"] = 1;
    try {
        parse_config(j.dump());
        CHECK(false);
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("replications") != std::string::npos);
    }
    j = nlohmann::json::parse(kMinimalConfig);
    j["schema_version"] = 2;
    CHECK_THROWS_AS(parse_config(j.dump()), ConfigError);
    j = nlohmann::json::parse(kMinimalConfig);
    j["body"]["extra"] = 1;
    CHECK_THROWS_WITH_AS(parse_config(j.dump()), "config: unknown field 'extra' in body", ConfigError);
}

TEST_CASE("config hash tracks canonical content only") {
    const ParsedConfig a = parse_config(kMinimalConfig);
    // whitespace and key order do not matter
    nlohmann::json j = nlohmann::json::parse(kMinimalConfig);
    const ParsedConfig b = parse_config(j.dump(4));
    CHECK(a.config_hash == b.config_hash);
    j["master_seed"] = 43;
    const ParsedConfig c = parse_config(j.dump());
    CHECK(a.config_hash != c.config_hash);
}

TEST_CASE("format_double round trips") {
    for (double v : {0.0, 1.0, -3.5, 1.0 / 3.0, 1e-17, 6.02e23, 0.1}) {
        CHECK(std::stod(format_double(v)) == v);
    }
}

TEST_CASE("summaries round trip") {
    std::vector<EstimatorSummary> rows(2);
    rows[0] = {"inscribed", "missed_volume", 128, 1.0 / 3.0, 1e-7, 2e-4, 3e-8, 400, 42};
    rows[1] = {"inscribed", "f0", 128, 17.25, 3.5, 0.09354143466934853, 0.5, 400, 42};
    const std::string path = (tmpdir() / "roundtrip.csv").string();
    write_summaries_csv(path, rows);
    const auto back = read_summaries_csv(path);
    REQUIRE(back.size() == 2);
    for (size_t i = 0; i < 2; ++i) {
        CHECK(back[i].model == rows[i].model);
        CHECK(back[i].statistic == rows[i].statistic);
        CHECK(back[i].n == rows[i].n);
        CHECK(back[i].mean == rows[i].mean);
        CHECK(back[i].variance == rows[i].variance);
        CHECK(back[i].stderr_mean == rows[i].stderr_mean);
        CHECK(back[i].stderr_var == rows[i].stderr_var);
    }
    const std::string text = slurp(path);
    CHECK(text.find("model,statistic,n,mean,var,stderr_mean,stderr_var,replications,seed\n") == 0);
    CHECK(text.find('\r') == std::string::npos);
}

TEST_CASE("polygon and scaling round trips") {
    const std::string ppath = (tmpdir() / "poly.csv").string();
    const std::vector<Eigen::Vector2d> poly = {{0.1, 0.2}, {1.0 / 3.0, -0.7}, {-0.25, 0.5}};
    write_polygon_csv(ppath, poly);
    const auto pback = read_polygon_csv(ppath);
    REQUIRE(pback.size() == 3);
    for (size_t i = 0; i < 3; ++i) CHECK((pback[i] - poly[i]).norm() == 0.0);

    const std::string spath = (tmpdir() / "scaling.json").string();
    ScalingFit fit{-1.6667, 2.5, 0.04, 0.001, 7};
    write_scaling_json(spath, fit);
    const ScalingFit fback = read_scaling_json(spath);
    CHECK(fback.slope == fit.slope);
    CHECK(fback.ci95 == fit.ci95);
    CHECK(fback.points == fit.points);
}

TEST_CASE("cli simulate is deterministic and validates") {
    const fs::path dir = tmpdir();
    const std::string cfg_path = (dir / "config.json").string();
    std::ofstream(cfg_path) << kMinimalConfig;
    const CliResult r1 = run_cli("simulate -c " + cfg_path + " -o " + (dir / "out1").string());
    CHECK(r1.exit_code == 0);
    const CliResult r2 = run_cli("simulate -c " + cfg_path + " -o " + (dir / "out2").string() + " --threads 8");
    CHECK(r2.exit_code == 0);
    const std::string s1 = slurp((dir / "out1" / "summaries.csv").string());
    CHECK(s1 == slurp((dir / "out2" / "summaries.csv").string()));
    // 2 n-values x 2 statistics
    CHECK(std::count(s1.begin(), s1.end(), '\n') == 5);
    // manifest round trips as JSON and carries the config hash
    const nlohmann::json manifest = nlohmann::json::parse(slurp((dir / "out1" / "manifest.json").string()));
    const ParsedConfig pc = parse_config(kMinimalConfig);
    char hex[32];
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(pc.config_hash));
    CHECK(manifest.at("config_hash").get<std::string>() == hex);

    // seed override changes the rows
    const CliResult r3 = run_cli("simulate -c " + cfg_path + " -o " + (dir / "out3").string() + " --seed 7");
    CHECK(r3.exit_code == 0);
    CHECK(s1 != slurp((dir / "out3" / "summaries.csv").string()));

    // invalid config exits 1 naming the field
    nlohmann::json bad = nlohmann::json::parse(kMinimalConfig);
    bad["replications"] = 1;
    const std::string bad_path = (dir / "bad.json").string();
    std::ofstream(bad_path) << bad.dump();
    const CliResult rb = run_cli("simulate -c " + bad_path + " -o " + (dir / "outb").string());
    CHECK(rb.exit_code == 1);
    CHECK(rb.output.find("replications") != std::string::npos);
}

TEST_CASE("cli scaling") {
    const fs::path dir = tmpdir();
    std::vector<EstimatorSummary> rows;
    for (int k = 0; k < 5; ++k) {
        EstimatorSummary s;
        s.model = "inscribed";
        s.statistic = "missed_volume";
        s.n = 1 << (7 + k);
        s.mean = 3.0 * std::pow(static_cast<double>(s.n), -0.75);
        s.variance = 1.0;
        s.replications = 4;
        rows.push_back(s);
    }
    const std::string path = (dir / "synthetic.csv").string();
    write_summaries_csv(path, rows);
    const std::string spath = (dir / "fit.json").string();
    const CliResult ok =
        run_cli("scaling " + path + " --stat missed_volume --target mean -o " + spath + " --expected -0.75 --slack 0.01");
    CHECK(ok.exit_code == 0);
    const ScalingFit fit = read_scaling_json(spath);
    CHECK(fit.slope == doctest::Approx(-0.75).epsilon(1e-12));

    const CliResult reject = run_cli("scaling " + path + " --stat missed_volume --target mean -o " + spath +
                                     " --expected -0.5 --slack 0.01");
    CHECK(reject.exit_code != 0);

    write_summaries_csv(path, {rows[0], rows[1]});
    const CliResult missing = run_cli("scaling " + path + " --stat missed_volume --target mean -o " + spath);
    CHECK(missing.exit_code == 1);
}

TEST_CASE("cli floating, capcover, meanwidth, polar") {
    const fs::path dir = tmpdir();
    const std::string body_path = (dir / "ball.json").string();
    std::ofstream(body_path) << R"({"shape":"ball","geometry":"spherical","dim":2,"radius":0.5})";

    const CliResult fempty = run_cli("floating -b " + body_path + " --t-frac 1.0");
    CHECK(fempty.exit_code == 0);
    CHECK(fempty.output.find("empty") != std::string::npos);

    const std::string fb_path = (dir / "fb.csv").string();
    const CliResult fsmall = run_cli("floating -b " + body_path + " --t-frac 0.02 -o " + fb_path);
    CHECK(fsmall.exit_code == 0);
    CHECK(read_polygon_csv(fb_path).size() >= 3);

    const CliResult cap = run_cli("capcover -b " + body_path + " --t-frac 0.002 -o " + (dir / "cover.json").string());
    CHECK(cap.exit_code == 0);
    CHECK(cap.output.find("verified") != std::string::npos);
    CHECK(nlohmann::json::parse(slurp((dir / "cover.json").string())).at("verified").get<bool>());

    const CliResult mw = run_cli("meanwidth -b " + body_path + " --samples 1000000 --seed 4");
    CHECK(mw.exit_code == 0);
    const double est = std::stod(mw.output.substr(mw.output.find("estimate") + 9));
    CHECK(std::abs(est - std::sin(0.5) / 2) < 0.002);

    const std::string polar_path = (dir / "polar.json").string();
    const CliResult po = run_cli("polar -b " + body_path + " -o " + polar_path);
    CHECK(po.exit_code == 0);
    const nlohmann::json pj = nlohmann::json::parse(slurp(polar_path));
    CHECK(pj.at("shape").get<std::string>() == "ball");
    CHECK(pj.at("radius").get<double>() == doctest::Approx(M_PI / 2 - 0.5));
    CHECK(pj.at("center")[2].get<double>() == doctest::Approx(-1.0));
    // the emitted polar body is re-parseable as a body spec
    const ConvexBody polar_body = body_from_json(pj);
    CHECK(polar_body.is_ball());
}

}  // TEST_SUITE
