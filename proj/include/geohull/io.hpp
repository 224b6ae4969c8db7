#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "geohull/montecarlo.hpp"

namespace geohull {

inline constexpr const char* kVersion = "0.1.0";

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A validated experiment config together with its canonical form. The hash
// is FNV-1a 64 over the canonical text (sorted keys, no whitespace), so it
// changes exactly when the canonicalized config changes.
struct ParsedConfig {
    SimulationConfig sim;
    nlohmann::json canonical;
    std::string canonical_text;
    std::uint64_t config_hash = 0;
};

std::uint64_t fnv1a64(std::string_view s);

// Shortest round-trip decimal representation (std::to_chars).
std::string format_double(double v);

ConvexBody body_from_json(const nlohmann::json& j);
nlohmann::json body_to_json(const ConvexBody& body);

ParsedConfig parse_config(const std::string& text);
ParsedConfig load_config(const std::string& path);

// summaries.csv with the fixed column order
// model,statistic,n,mean,var,stderr_mean,stderr_var,replications,seed
void write_summaries_csv(const std::string& path, const std::vector<EstimatorSummary>& rows);
std::vector<EstimatorSummary> read_summaries_csv(const std::string& path);

void write_scaling_json(const std::string& path, const ScalingFit& fit);
ScalingFit read_scaling_json(const std::string& path);

// chart polygon as CSV with header x,y
void write_polygon_csv(const std::string& path, const std::vector<Eigen::Vector2d>& poly);
std::vector<Eigen::Vector2d> read_polygon_csv(const std::string& path);

void write_manifest(const std::string& path, const ParsedConfig& cfg, const std::string& started,
                    const std::string& finished, const std::vector<std::string>& outputs);

std::string utc_timestamp();

}  // namespace geohull
