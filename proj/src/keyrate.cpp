#include "hdqkd/keyrate.hpp"

#include <cmath>
#include <thread>

namespace hdqkd {

double conditional_shannon_hab(double v, int d) {
    if (v < 0.0 || v > 1.0) throw std::invalid_argument("conditional_shannon_hab: v outside [0,1]");
    if (d < 2) throw std::invalid_argument("conditional_shannon_hab: d < 2");
    const double p_diag = v + (1.0 - v) / d;       // d * p(i,i)
    const double p_off = (1.0 - v) / d;            // d * p(i,j), i != j
    double h = 0.0;
    if (p_diag > 0.0) h -= p_diag * std::log2(p_diag);
    if (p_off > 0.0) h -= (d - 1) * p_off * std::log2(p_off);
    return h;
}

double qber(double v, int d) {
    if (v < 0.0 || v > 1.0) throw std::invalid_argument("qber: v outside [0,1]");
    return 1.0 - v - (1.0 - v) / d;
}

namespace {

std::vector<LabeledPovm> protocol_povms(Protocol protocol, int d) {
    if (protocol == Protocol::P2) return {build_m0(d), build_m1_p2(d)};
    return {build_m0(d), build_m1_p1(d), build_m2_p1(d)};
}

}  // namespace

KeyRateResult compute_rate(const ProtocolConfig& cfg, const NoiseParams& noise, int m,
                           const SolverOptions& opts) {
    cfg.validate();
    KeyRateResult out;
    out.upper_bound_only = cfg.protocol == Protocol::P2;
    out.p_tt11 = p_tt11(noise, cfg.protocol);
    try {
        out.v = visibility(noise, cfg.protocol);
    } catch (const std::exception& ex) {
        out.status = SolveStatus::numerical_failure;
        out.message = ex.what();
        return out;
    }
    out.qber_value = qber(out.v, cfg.d);
    out.h_ab = conditional_shannon_hab(out.v, cfg.d);

    DensityMatrix rho = isotropic_time_state(out.v, cfg.d);
    auto constraints = constraints_from_state(protocol_povms(cfg.protocol, cfg.d), rho);
    SdpProblem problem = assemble_sdp(std::move(constraints), cfg.d, gauss_radau(m));
    SdpSolution sol = solve_entropy_bound(problem, opts);
    out.status = sol.status;
    out.message = sol.message;
    if (sol.status == SolveStatus::optimal || sol.status == SolveStatus::near_optimal) {
        out.s_ae_lb = sol.objective_bits;
        out.rate_unclipped = out.s_ae_lb - out.h_ab;
        out.rate_per_coincidence = std::max(out.rate_unclipped, 0.0);
        out.rate_per_second = out.rate_per_coincidence * out.p_tt11 / noise.frame_length_s;
    }
    return out;
}

KeyRateResult bbm92_rate(const NoiseParams& noise, int reference_d, int m,
                         const SolverOptions& opts) {
    if (reference_d < 2 || reference_d % 2 != 0)
        throw std::invalid_argument("bbm92_rate: reference_d must be even and >= 2");
    NoiseParams rescaled = noise;
    rescaled.frame_length_s = noise.frame_length_s / (reference_d / 2);
    ProtocolConfig cfg;
    cfg.protocol = Protocol::BBM92;
    cfg.d = 2;
    return compute_rate(cfg, rescaled, m, opts);
}

std::vector<SweepRow> sweep(const ProtocolConfig& cfg, const NoiseParams& base,
                            SweepAxis axis, const std::vector<double>& grid, int m,
                            const SolverOptions& opts, int jobs) {
    if (grid.empty()) throw std::invalid_argument("sweep: empty grid");
    for (size_t i = 1; i < grid.size(); ++i)
        if (grid[i] < grid[i - 1]) throw std::invalid_argument("sweep: grid must ascend");

    std::vector<SweepRow> rows(grid.size());
    auto run_point = [&](size_t i) {
        NoiseParams p = base;
        if (axis == SweepAxis::solar_rate)
            p.solar_rate_hz = grid[i];
        else
            p.loss_prob_b = 1.0 - std::pow(10.0, -grid[i] / 10.0);
        rows[i].axis_value = grid[i];
        rows[i].params = p;
        try {
            rows[i].result = compute_rate(cfg, p, m, opts);
        } catch (const std::exception& ex) {
            rows[i].result.status = SolveStatus::numerical_failure;
            rows[i].result.message = ex.what();
        }
    };

    jobs = std::max(1, jobs);
    if (jobs == 1) {
        for (size_t i = 0; i < grid.size(); ++i) run_point(i);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < jobs; ++t)
            pool.emplace_back([&, t] {
                for (size_t i = t; i < grid.size(); i += size_t(jobs)) run_point(i);
            });
        for (auto& th : pool) th.join();
    }
    return rows;
}

double zero_rate_threshold(const ProtocolConfig& cfg, const NoiseParams& base,
                           SweepAxis axis, double lo, double hi, int m,
                           const SolverOptions& opts, double rel_width) {
    auto rate_at = [&](double value) {
        NoiseParams p = base;
        if (axis == SweepAxis::solar_rate)
            p.solar_rate_hz = value;
        else
            p.loss_prob_b = 1.0 - std::pow(10.0, -value / 10.0);
        return compute_rate(cfg, p, m, opts).rate_per_coincidence;
    };
    if (rate_at(lo) <= 0.0) throw std::invalid_argument("zero_rate_threshold: lo already at zero rate");
    if (rate_at(hi) > 0.0) throw std::invalid_argument("zero_rate_threshold: hi still has positive rate");
    while (hi - lo > rel_width * lo) {
        const double mid = axis == SweepAxis::solar_rate ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
        if (rate_at(mid) > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return std::sqrt(lo * hi);
}

}  // namespace hdqkd
