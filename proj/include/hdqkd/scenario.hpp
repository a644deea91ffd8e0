#pragma once

#include "hdqkd/keyrate.hpp"

#include <iosfwd>
#include <optional>
#include <string>

// Scenario configuration (flat key = value files with # comments, overridable
// by CLI flags) and CSV emission for figure reproduction.

namespace hdqkd {

struct SweepSpec {
    SweepAxis axis = SweepAxis::solar_rate;
    double start = 0.0;
    double stop = 0.0;
    int points = 0;
    bool log_scale = true;

    std::vector<double> grid() const;
};

struct ScenarioConfig {
    Protocol protocol = Protocol::P1;
    int d = 2;
    double frame_length_s = 5.4e-9;
    double pair_rate_hz = 0.1 / 5.4e-9;
    double dark_rate_hz = 100.0;
    double solar_rate_hz = 0.0;
    std::optional<double> loss_db;    // exactly one of loss_db / loss_prob
    std::optional<double> loss_prob;
    double eta_d = 0.9;
    int quadrature_m = 10;
    std::uint64_t seed = 1;
    std::string solver = "ipm";
    double solver_tol = 1e-8;
    std::optional<SweepSpec> sweep;

    double resolved_loss_prob() const;
    double resolved_loss_db() const;
    NoiseParams noise_params() const;
    ProtocolConfig protocol_config() const;
    void validate() const;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Parse a flat key = value file; unknown keys and malformed lines are
/// reported with their line number. An empty path yields the defaults.
ScenarioConfig parse_config(const std::string& path);

/// Apply a single key = value override (the CLI flag path).
void apply_override(ScenarioConfig& cfg, const std::string& key, const std::string& value);

extern const char* const kCsvHeader;

/// One self-describing CSV row; numeric fields rounded to 1e-9.
std::string csv_row(const ScenarioConfig& cfg, const NoiseParams& params,
                    const KeyRateResult& r);

}  // namespace hdqkd
