#pragma once

#include "hdqkd/entropy.hpp"
#include "hdqkd/noise.hpp"

// Devetak-Winter rates: entropy bound minus error-correction leakage, the
// BBM92 frame-rescaled comparison, and parameter sweeps.

namespace hdqkd {

struct KeyRateResult {
    double v = 0.0;
    double s_ae_lb = 0.0;              // bits
    double h_ab = 0.0;                 // bits
    double rate_per_coincidence = 0.0; // max(s_ae_lb - h_ab, 0)
    double rate_unclipped = 0.0;       // s_ae_lb - h_ab, sign kept
    double rate_per_second = 0.0;      // rate_per_coincidence * p_tt11 / T
    double p_tt11 = 0.0;
    double qber_value = 0.0;
    bool upper_bound_only = false;     // set for Protocol 2
    SolveStatus status = SolveStatus::numerical_failure;
    std::string message;
};

/// H(A|B) of the TT-click table of rho(v): joint p(i,j) = v delta_ij/d + (1-v)/d^2.
double conditional_shannon_hab(double v, int d);

/// 1 - v - (1-v)/d, the off-diagonal TT mass of rho(v).
double qber(double v, int d);

KeyRateResult compute_rate(const ProtocolConfig& cfg, const NoiseParams& noise, int m,
                           const SolverOptions& opts = {});

/// Protocol 1 at d = 2 with every per-frame mean rescaled to the BBM92 frame
/// T' = T / (reference_d / 2); per-second rates use T'.
KeyRateResult bbm92_rate(const NoiseParams& noise, int reference_d, int m,
                         const SolverOptions& opts = {});

enum class SweepAxis { solar_rate, loss_db };

struct SweepRow {
    double axis_value = 0.0;
    NoiseParams params;
    KeyRateResult result;
};

std::vector<SweepRow> sweep(const ProtocolConfig& cfg, const NoiseParams& base,
                            SweepAxis axis, const std::vector<double>& grid, int m,
                            const SolverOptions& opts = {}, int jobs = 1);

/// Bisect the zero-rate threshold of `axis` between lo (positive rate) and hi
/// (zero rate) to the requested relative width.
double zero_rate_threshold(const ProtocolConfig& cfg, const NoiseParams& base,
                           SweepAxis axis, double lo, double hi, int m,
                           const SolverOptions& opts = {}, double rel_width = 0.1);

}  // namespace hdqkd
