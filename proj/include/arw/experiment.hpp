#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "arw/crossings.hpp"
#include "arw/curve.hpp"
#include "arw/lattice.hpp"

namespace arw {

inline constexpr const char* kCodeVersion = "0.1.0";

/// Sectioned key/value experiment configuration.
struct ExperimentConfig {
    std::vector<long long> levels;
    CurveSpec curve;
    std::uint64_t trials = 1000;
    std::uint64_t seed = 1;
    double resolution = 20.0;
    std::string regime = "auto";       // auto | static | generic
    std::string limit_route = "I";     // I | M | circle
    bool run_kacrice = false;
    bool run_chaos = true;
    // checks
    bool check_mean_law = true;
    bool check_flag_rate = true;
    bool check_parity = true;
    double variance_band_lo = 0.0;  // 0/0 disables the gate
    double variance_band_hi = 0.0;
    // outputs
    std::string report_path;
    std::string hist_path;
    std::string svg_path;

    std::string canonical_text() const;  // normalized form used for hashing
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Parses curve options shared by the CLI and config files.
CurveSpec curve_from_kv(const std::map<std::string, std::string>& kv);

struct CheckResult {
    std::string name;
    bool passed = false;
    double value = 0.0;
    double bound = 0.0;
    std::string detail;
};

struct LevelReport {
    long long n = 0;
    int N = 0;
    double min_sep = 0.0;
    bool delta_separated = false;
    double mu_hat4 = 0.0;
    MonteCarloSummary campaign;
    // per-trial chaos statistics (when enabled)
    double var_z2a_mc = 0.0, var_z2a_pred = 0.0;
    double var_z4a_mc = 0.0, var_z4a_pred = 0.0;
    double max_identity_residual = 0.0;
    std::vector<CheckResult> checks;
};

struct RunManifest {
    std::string config_hash;
    std::string code_version;
    std::string created_utc;
    double duration_seconds = 0.0;
    CurveFunctionals curve;
    std::string curve_id;
    std::vector<LevelReport> levels;
    bool all_passed = true;
};

/// Executes the configured campaigns and writes all requested artifacts.
RunManifest run_experiment(const ExperimentConfig& config);

/// JSON (de)serialization of manifests.
std::string manifest_to_json(const RunManifest& manifest);
RunManifest manifest_from_json(const std::string& text);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

/// Cross-manifest comparison table; returns human-readable text and
/// optionally writes CSV.
std::string report_table(const std::vector<std::string>& manifest_paths,
                         const std::string& csv_path = "");

/// Histogram CSV and a self-contained SVG bar chart of standardized samples
/// against the normal and static-circle reference densities.
void write_histogram_csv(const std::string& path, const std::vector<double>& standardized);
void write_histogram_svg(const std::string& path, const std::vector<double>& standardized);

std::string fnv1a_hex(const std::string& text);

}  // namespace arw
