#include "hdqkd/noise.hpp"

#include <cmath>
#include <random>

namespace hdqkd {

void NoiseParams::validate() const {
    if (frame_length_s <= 0.0) throw std::invalid_argument("NoiseParams: T must be positive");
    if (pair_rate_hz < 0.0 || dark_rate_hz < 0.0 || solar_rate_hz < 0.0)
        throw std::invalid_argument("NoiseParams: rates must be nonnegative");
    if (eta_d < 0.0 || eta_d > 1.0)
        throw std::invalid_argument("NoiseParams: eta_d outside [0,1]");
    if (loss_prob_b < 0.0 || loss_prob_b > 1.0)
        throw std::invalid_argument("NoiseParams: loss_prob_b outside [0,1]");
}

PerFrameMeans per_frame_params(const NoiseParams& p) {
    p.validate();
    return {p.pair_rate_hz * p.frame_length_s, p.dark_rate_hz * p.frame_length_s,
            p.solar_rate_hz * p.frame_length_s};
}

namespace {

bool filtered(Protocol protocol) { return protocol != Protocol::P2; }

}  // namespace

double p_tt11(const NoiseParams& p, Protocol protocol) {
    const auto [cp, cd, ce] = per_frame_params(p);
    const double eta = p.eta_d;
    const double pl = p.loss_prob_b;
    if (filtered(protocol)) {
        return 0.5 * std::exp(-2.0 * cd - cp - 0.5 * ce * eta) *
               (cp * eta * eta * (2.0 + ce - 2.0 * pl - ce * (1.0 - pl) * eta) +
                cd * cd * (2.0 + 2.0 * cp * (1.0 - eta) * (1.0 - eta * (1.0 - pl))) +
                cd * eta *
                    (ce + cp * (4.0 - 2.0 * pl - 4.0 * eta + 4.0 * pl * eta +
                                ce * (1.0 - eta) * (1.0 - (1.0 - pl) * eta))));
    }
    return std::exp(-2.0 * cd - cp - ce * eta) *
           (cd * cd * (1.0 + cp) +
            cd * (ce + cp * (2.0 + ce - cd * (2.0 - pl) - pl)) * eta +
            cp * (1.0 + ce - pl + cd * (cd - 2.0 * (1.0 + ce) - cd * pl + (2.0 + ce) * pl)) *
                eta * eta +
            (1.0 - cd) * cp * ce * (-1.0 + pl) * eta * eta * eta);
}

double p_good(const NoiseParams& p, Protocol protocol) {
    const auto [cp, cd, ce] = per_frame_params(p);
    const double ce_eff = filtered(protocol) ? 0.5 * ce : ce;
    return cp * (1.0 - p.loss_prob_b) * p.eta_d * p.eta_d *
           std::exp(-2.0 * cd - cp - ce_eff * p.eta_d);
}

double visibility(const NoiseParams& p, Protocol protocol) {
    const double ptt = p_tt11(p, protocol);
    if (ptt <= 0.0)
        throw std::domain_error("visibility: p_tt11 vanishes, visibility undefined");
    double v = p_good(p, protocol) / ptt;
    if (v > 1.0 + 1e-9) throw std::logic_error("visibility: ratio above 1");
    return std::min(v, 1.0);
}

NoiseSummary summarize_noise(const NoiseParams& p, Protocol protocol) {
    return {per_frame_params(p), p_tt11(p, protocol), p_good(p, protocol),
            visibility(p, protocol)};
}

namespace {

double pow0(double x, int n) {  // x^n with 0^0 = 1
    if (n == 0) return 1.0;
    return std::pow(x, n);
}

double factorial(int n) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

// I(s,n) = sum_{m=0}^{min(s,n)} (1-P)^m P^{s-m} (c/2)^{n-m} / (m! (s-m)! (n-m)!)
double loss_env_factor(int s, int n, double loss, double env_mean) {
    double sum = 0.0;
    for (int m = 0; m <= std::min(s, n); ++m)
        sum += pow0(1.0 - loss, m) * pow0(loss, s - m) * pow0(0.5 * env_mean, n - m) /
               (factorial(m) * factorial(s - m) * factorial(n - m));
    return sum;
}

}  // namespace

double joint_photon_distribution(int n1, int n2, const NoiseParams& p, int s_max) {
    if (n1 < 0 || n2 < 0) throw std::invalid_argument("joint_photon_distribution: n < 0");
    if (s_max < 0) throw std::invalid_argument("joint_photon_distribution: s_max < 0");
    const auto [cp, cd, ce_b] = per_frame_params(p);
    (void)cd;
    const double ce_a = 0.0, loss_a = 0.0;
    double sum = 0.0;
    for (int s = 0; s <= s_max; ++s)
        sum += pow0(cp, s) * factorial(s) * loss_env_factor(s, n1, loss_a, ce_a) *
               loss_env_factor(s, n2, p.loss_prob_b, ce_b);
    return std::exp(-0.5 * (ce_a + ce_b) - cp) * sum;
}

namespace {

class FrameRng {
  public:
    explicit FrameRng(std::uint64_t seed) : gen_(seed) {}

    double uniform() { return (gen_() >> 11) * 0x1.0p-53; }

    int poisson(double mean) {
        if (mean <= 0.0) return 0;
        // inversion; all per-frame means here are far below 1
        double l = std::exp(-mean), p = 1.0;
        int k = 0;
        do {
            ++k;
            p *= uniform();
        } while (p > l);
        return k - 1;
    }

    int binomial(int n, double prob) {
        int k = 0;
        for (int i = 0; i < n; ++i)
            if (uniform() < prob) ++k;
        return k;
    }

  private:
    std::mt19937_64 gen_;
};

}  // namespace

MonteCarloEstimate monte_carlo_estimate(const NoiseParams& p, Protocol protocol,
                                        std::int64_t n_frames, std::uint64_t seed) {
    if (n_frames < 1) throw std::invalid_argument("monte_carlo_estimate: n_frames < 1");
    const auto [cp, cd, ce] = per_frame_params(p);
    FrameRng rng(seed);
    std::int64_t n_tt = 0, n_good = 0;
    for (std::int64_t f = 0; f < n_frames; ++f) {
        const int pairs = rng.poisson(cp);
        const int bob_src = rng.binomial(pairs, 1.0 - p.loss_prob_b);
        int env = rng.poisson(ce);
        if (filtered(protocol)) env = rng.binomial(env, 0.5);
        const int a_det = rng.binomial(pairs, p.eta_d);
        const int b_det_src = rng.binomial(bob_src, p.eta_d);
        const int b_det_env = rng.binomial(env, p.eta_d);
        const int dark_a = rng.poisson(cd);
        const int dark_b = rng.poisson(cd);
        const bool tt = (a_det + dark_a == 1) && (b_det_src + b_det_env + dark_b == 1);
        if (tt) {
            ++n_tt;
            if (a_det == 1 && b_det_src == 1 && b_det_env == 0 && dark_a == 0 && dark_b == 0)
                ++n_good;
        }
    }
    const double ptt = double(n_tt) / double(n_frames);
    const double pg = double(n_good) / double(n_frames);
    auto se = [&](double q) { return std::sqrt(std::max(q * (1.0 - q), 0.0) / double(n_frames)); };
    return {ptt, pg, se(ptt), se(pg), n_frames};
}

}  // namespace hdqkd
