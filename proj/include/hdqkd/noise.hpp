#pragma once

#include "hdqkd/model.hpp"

#include <cstdint>

// Physical noise rates -> per-frame Poisson means, coincidence probabilities
// and the isotropic visibility. Source sits in Alice's lab: P_loss^A = 0 and
// lambda_e^A = 0 throughout. BBM92 uses the Protocol-1 forms.

namespace hdqkd {

struct NoiseParams {
    double frame_length_s;  // T
    double pair_rate_hz;    // lambda_p
    double dark_rate_hz;    // lambda_d, per detector side
    double solar_rate_hz;   // lambda_e^B at Bob
    double eta_d;           // detection efficiency, all detectors
    double loss_prob_b;     // P_loss^B

    void validate() const;
};

struct PerFrameMeans {
    double c_p, c_d, c_e_b;
};

PerFrameMeans per_frame_params(const NoiseParams& p);

/// Closed-form probability of exactly one click on each side per frame.
double p_tt11(const NoiseParams& p, Protocol protocol);

/// Closed-form probability that the coincidence is a source-pair detection
/// with no other click.
double p_good(const NoiseParams& p, Protocol protocol);

/// v = P_Good / P_TT(1,1); throws when p_tt11 vanishes.
double visibility(const NoiseParams& p, Protocol protocol);

struct NoiseSummary {
    PerFrameMeans means;
    double p_tt11;
    double p_good;
    double v;
};

NoiseSummary summarize_noise(const NoiseParams& p, Protocol protocol);

/// P(n1, n2): joint photon-count distribution after loss, filtering (halved
/// environmental flux, Protocol-1 convention) and mixing with source pairs,
/// with pair production truncated at s_max.
double joint_photon_distribution(int n1, int n2, const NoiseParams& p, int s_max = 1);

struct MonteCarloEstimate {
    double p_tt11;
    double p_good;
    double stderr_tt11;
    double stderr_good;
    std::int64_t n_frames;
};

/// Frame-by-frame event sampler; deterministic for a fixed seed.
MonteCarloEstimate monte_carlo_estimate(const NoiseParams& p, Protocol protocol,
                                        std::int64_t n_frames, std::uint64_t seed);

}  // namespace hdqkd
