#include "geohull/io.hpp"

#include <charconv>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

namespace geohull {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw ConfigError("config: " + msg); }

void check_fields(const json& obj, const char* where, const std::vector<std::string>& allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const auto& a : allowed)
            if (it.key() == a) {
                ok = true;
                break;
            }
        if (!ok) fail(std::string("unknown field '") + it.key() + "' in " + where);
    }
}

const json& require(const json& obj, const char* key, const char* where) {
    auto it = obj.find(key);
    if (it == obj.end()) fail(std::string("missing field '") + key + "' in " + where);
    return *it;
}

Vec vec_from_json(const json& j, const char* field) {
    if (!j.is_array()) fail(std::string("field '") + field + "' must be an array of numbers");
    Vec v(j.size());
    for (size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) fail(std::string("field '") + field + "' must be an array of numbers");
        v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
    }
    return v;
}

json vec_to_json(const Vec& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

Space space_from_string(const std::string& s) {
    if (s == "spherical") return Space::Spherical;
    if (s == "hyperbolic") return Space::Hyperbolic;
    if (s == "euclidean") return Space::Euclidean;
    fail("field 'geometry' must be one of spherical|hyperbolic|euclidean");
}

const char* space_to_string(Space s) {
    switch (s) {
        case Space::Spherical: return "spherical";
        case Space::Hyperbolic: return "hyperbolic";
        case Space::Euclidean: return "euclidean";
    }
    return "?";
}

}  // namespace

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

ConvexBody body_from_json(const nlohmann::json& j) {
    if (!j.is_object()) fail("field 'body' must be an object");
    const std::string shape = require(j, "shape", "body").get<std::string>();
    const std::string geo = require(j, "geometry", "body").get<std::string>();
    const int dim = require(j, "dim", "body").get<int>();
    const Geometry g{space_from_string(geo), dim};
    std::optional<Mat> frame;
    if (j.contains("frame")) {
        const json& fj = j["frame"];
        Mat f(dim + 1, dim + 1);
        if (!fj.is_array() || static_cast<int>(fj.size()) != dim + 1) fail("field 'frame' must be a (d+1)x(d+1) matrix");
        for (int r = 0; r < dim + 1; ++r) {
            const Vec row = vec_from_json(fj[r], "frame");
            if (row.size() != dim + 1) fail("field 'frame' must be a (d+1)x(d+1) matrix");
            f.row(r) = row.transpose();
        }
        frame = f;
    }
    if (shape == "ball") {
        check_fields(j, "body", {"shape", "geometry", "dim", "radius", "center"});
        const double r = require(j, "radius", "body").get<double>();
        Vec center(dim + 1);
        center.setZero();
        center[dim] = 1.0;
        if (j.contains("center")) center = vec_from_json(j["center"], "center");
        return make_ball(g, center, r);
    }
    if (shape == "polytope") {
        check_fields(j, "body", {"shape", "geometry", "dim", "vertices", "frame"});
        const json& vj = require(j, "vertices", "body");
        std::vector<Vec> verts;
        for (const auto& row : vj) {
            const Vec v = vec_from_json(row, "vertices");
            if (v.size() != dim) fail("field 'vertices' rows must have length d");
            verts.push_back(v);
        }
        return make_chart_polytope(g, verts, frame);
    }
    if (shape == "ellipse") {
        check_fields(j, "body", {"shape", "geometry", "dim", "center", "semi_a", "semi_b", "angle", "frame"});
        if (dim != 2) fail("field 'shape': ellipse requires dim=2");
        ChartEllipse e;
        if (j.contains("center")) {
            const Vec c = vec_from_json(j["center"], "center");
            if (c.size() != 2) fail("field 'center' must have length 2 for an ellipse");
            e.center = Eigen::Vector2d(c[0], c[1]);
        }
        e.semi_a = require(j, "semi_a", "body").get<double>();
        e.semi_b = require(j, "semi_b", "body").get<double>();
        if (j.contains("angle")) e.angle = j["angle"].get<double>();
        return make_chart_ellipse(g, e, frame);
    }
    fail("field 'shape' must be one of ball|polytope|ellipse");
}

nlohmann::json body_to_json(const ConvexBody& body) {
    json j;
    j["geometry"] = space_to_string(body.geom().kind);
    j["dim"] = body.geom().dim;
    if (body.is_ball()) {
        j["shape"] = "ball";
        j["radius"] = body.ball().radius;
        j["center"] = vec_to_json(body.ball().center);
        return j;
    }
    const int d = body.geom().dim;
    if (!body.frame().isIdentity(1e-15)) {
        json f = json::array();
        for (int r = 0; r < d + 1; ++r) f.push_back(vec_to_json(body.frame().row(r).transpose()));
        j["frame"] = f;
    }
    if (std::holds_alternative<ChartEllipse>(body.shape())) {
        const ChartEllipse& e = body.ellipse();
        j["shape"] = "ellipse";
        j["center"] = {e.center.x(), e.center.y()};
        j["semi_a"] = e.semi_a;
        j["semi_b"] = e.semi_b;
        j["angle"] = e.angle;
        return j;
    }
    j["shape"] = "polytope";
    json verts = json::array();
    for (const auto& v : body.polytope().vertices) verts.push_back(vec_to_json(v));
    j["vertices"] = verts;
    return j;
}

ParsedConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        fail(std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) fail("top level must be an object");
    check_fields(j, "config",
                 {"schema_version", "model", "body", "n_grid", "replications", "master_seed", "statistics",
                  "u1_samples"});
    const int sv = require(j, "schema_version", "config").get<int>();
    if (sv != 1) fail("field 'schema_version' must be 1");
    const std::string model = require(j, "model", "config").get<std::string>();
    ParsedConfig pc{SimulationConfig{body_from_json(require(j, "body", "config"))}, {}, {}, 0};
    if (model == "inscribed")
        pc.sim.model = Model::Inscribed;
    else if (model == "circumscribed")
        pc.sim.model = Model::Circumscribed;
    else
        fail("field 'model' must be inscribed|circumscribed");
    for (const auto& n : require(j, "n_grid", "config")) {
        if (!n.is_number_integer()) fail("field 'n_grid' must be an array of integers");
        pc.sim.n_grid.push_back(n.get<long long>());
    }
    pc.sim.replications = require(j, "replications", "config").get<int>();
    pc.sim.master_seed = require(j, "master_seed", "config").get<std::uint64_t>();
    for (const auto& s : require(j, "statistics", "config")) pc.sim.statistics.push_back(s.get<std::string>());
    if (j.contains("u1_samples")) pc.sim.u1_samples = j["u1_samples"].get<long long>();
    try {
        validate_config(pc.sim);
    } catch (const std::invalid_argument& e) {
        fail(e.what());
    }
    pc.canonical = j;
    pc.canonical_text = j.dump();  // nlohmann objects iterate in sorted key order
    pc.config_hash = fnv1a64(pc.canonical_text);
    return pc;
}

ParsedConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

void write_summaries_csv(const std::string& path, const std::vector<EstimatorSummary>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << "model,statistic,n,mean,var,stderr_mean,stderr_var,replications,seed\n";
    for (const auto& r : rows) {
        out << r.model << ',' << r.statistic << ',' << r.n << ',' << format_double(r.mean) << ','
            << format_double(r.variance) << ',' << format_double(r.stderr_mean) << ',' << format_double(r.stderr_var)
            << ',' << r.replications << ',' << r.seed << '\n';
    }
}

std::vector<EstimatorSummary> read_summaries_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty summaries file '" + path + "'");
    std::vector<EstimatorSummary> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::string cur;
        for (char c : line) {
            if (c == ',') {
                f.push_back(cur);
                cur.clear();
            } else if (c != '\r') {
                cur += c;
            }
        }
        f.push_back(cur);
        if (f.size() != 9) throw std::runtime_error("malformed summaries row: " + line);
        EstimatorSummary s;
        s.model = f[0];
        s.statistic = f[1];
        s.n = std::stoll(f[2]);
        s.mean = std::stod(f[3]);
        s.variance = std::stod(f[4]);
        s.stderr_mean = std::stod(f[5]);
        s.stderr_var = std::stod(f[6]);
        s.replications = std::stoi(f[7]);
        s.seed = std::stoull(f[8]);
        rows.push_back(s);
    }
    return rows;
}

void write_scaling_json(const std::string& path, const ScalingFit& fit) {
    nlohmann::json j;
    j["slope"] = fit.slope;
    j["intercept"] = fit.intercept;
    j["ci95"] = fit.ci95;
    j["residual_rms"] = fit.residual_rms;
    j["points"] = fit.points;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << j.dump(2) << '\n';
}

ScalingFit read_scaling_json(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    nlohmann::json j = nlohmann::json::parse(in);
    ScalingFit fit;
    fit.slope = j.at("slope").get<double>();
    fit.intercept = j.at("intercept").get<double>();
    fit.ci95 = j.at("ci95").get<double>();
    fit.residual_rms = j.at("residual_rms").get<double>();
    fit.points = j.at("points").get<int>();
    return fit;
}

void write_polygon_csv(const std::string& path, const std::vector<Eigen::Vector2d>& poly) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << "x,y\n";
    for (const auto& p : poly) out << format_double(p.x()) << ',' << format_double(p.y()) << '\n';
}

std::vector<Eigen::Vector2d> read_polygon_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty polygon file '" + path + "'");
    std::vector<Eigen::Vector2d> poly;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const size_t comma = line.find(',');
        if (comma == std::string::npos) throw std::runtime_error("malformed polygon row: " + line);
        poly.emplace_back(std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1)));
    }
    return poly;
}

void write_manifest(const std::string& path, const ParsedConfig& cfg, const std::string& started,
                    const std::string& finished, const std::vector<std::string>& outputs) {
    nlohmann::json j;
    j["config"] = cfg.canonical;
    char hex[32];
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(cfg.config_hash));
    j["config_hash"] = std::string(hex);
    j["started"] = started;
    j["finished"] = finished;
    j["version"] = kVersion;
    j["outputs"] = outputs;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << j.dump(2) << '\n';
}

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return std::string(buf);
}

}  // namespace geohull
