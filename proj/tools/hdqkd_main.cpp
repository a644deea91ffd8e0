#include "hdqkd/scenario.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

using namespace hdqkd;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitSolver = 2;
constexpr int kExitValidation = 3;

struct CommonFlags {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string protocol;
    int d = -1;
    int m = -1;
    double solar_rate = -1.0;
    double loss_db = -1e300;
    long seed = -1;
    int jobs = 1;
    std::string out_path;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config_path, "flat key = value config file");
    cmd->add_option("--set", f.overrides, "extra key=value overrides")->take_all();
    cmd->add_option("--protocol", f.protocol, "p1 | p2 | bbm92");
    cmd->add_option("--d", f.d, "number of time-bins (even)");
    cmd->add_option("--m", f.m, "Gauss-Radau node count");
    cmd->add_option("--solar-rate-hz", f.solar_rate, "environmental photon rate at Bob");
    cmd->add_option("--loss-db", f.loss_db, "channel loss towards Bob in dB");
    cmd->add_option("--seed", f.seed, "RNG seed for Monte Carlo validation");
    cmd->add_option("--jobs", f.jobs, "parallel sweep rows / solver threads");
    cmd->add_option("--out", f.out_path, "output file (default stdout)");
}

ScenarioConfig resolve(const CommonFlags& f) {
    ScenarioConfig cfg = parse_config(f.config_path);
    for (const auto& kv : f.overrides) {
        size_t eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
        apply_override(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (!f.protocol.empty()) apply_override(cfg, "protocol", f.protocol);
    if (f.d > 0) apply_override(cfg, "d", std::to_string(f.d));
    if (f.m > 0) apply_override(cfg, "quadrature_m", std::to_string(f.m));
    if (f.solar_rate >= 0.0) cfg.solar_rate_hz = f.solar_rate;
    if (f.loss_db > -1e299) {
        cfg.loss_prob.reset();
        cfg.loss_db = f.loss_db;
    }
    if (f.seed >= 0) cfg.seed = static_cast<std::uint64_t>(f.seed);
    cfg.validate();
    return cfg;
}

SolverOptions solver_options(const ScenarioConfig& cfg, int jobs) {
    SolverOptions o;
    o.gap_tol = cfg.solver_tol;
    o.threads = std::max(1, jobs);
    return o;
}

std::ostream& open_out(const std::string& path, std::ofstream& file) {
    if (path.empty()) return std::cout;
    file.open(path);
    if (!file) throw ConfigError("cannot open output file: " + path);
    return file;
}

int cmd_rate(const CommonFlags& f) {
    ScenarioConfig cfg = resolve(f);
    KeyRateResult r = cfg.protocol == Protocol::BBM92 && f.d > 2
                          ? bbm92_rate(cfg.noise_params(), f.d, cfg.quadrature_m,
                                       solver_options(cfg, f.jobs))
                          : compute_rate(cfg.protocol_config(), cfg.noise_params(),
                                         cfg.quadrature_m, solver_options(cfg, f.jobs));
    std::ofstream file;
    std::ostream& os = open_out(f.out_path, file);
    os << "protocol              " << protocol_name(cfg.protocol) << "\n"
       << "d                     " << cfg.d << "\n"
       << "m                     " << cfg.quadrature_m << "\n"
       << "visibility            " << r.v << "\n"
       << "qber                  " << r.qber_value << "\n"
       << "p_tt11                " << r.p_tt11 << "\n"
       << "s_ae_lb_bits          " << r.s_ae_lb << "\n"
       << "h_ab_bits             " << r.h_ab << "\n"
       << "rate_per_coincidence  " << r.rate_per_coincidence << "\n"
       << "rate_unclipped        " << r.rate_unclipped << "\n"
       << "rate_per_second       " << r.rate_per_second << "\n"
       << "upper_bound_only      " << (r.upper_bound_only ? 1 : 0) << "\n"
       << "status                " << solve_status_name(r.status) << "\n";
    return r.status == SolveStatus::optimal || r.status == SolveStatus::near_optimal
               ? kExitOk
               : kExitSolver;
}

int cmd_sweep(const CommonFlags& f) {
    ScenarioConfig cfg = resolve(f);
    if (!cfg.sweep) throw ConfigError("sweep subcommand requires sweep_* keys");
    std::ofstream file;
    std::ostream& os = open_out(f.out_path, file);
    auto rows = sweep(cfg.protocol_config(), cfg.noise_params(), cfg.sweep->axis,
                      cfg.sweep->grid(), cfg.quadrature_m, solver_options(cfg, 1), f.jobs);
    os << kCsvHeader << "\n";
    bool solver_trouble = false;
    for (const auto& row : rows) {
        ScenarioConfig echo = cfg;
        echo.solar_rate_hz = row.params.solar_rate_hz;
        os << csv_row(echo, row.params, row.result) << "\n";
        if (row.result.status != SolveStatus::optimal &&
            row.result.status != SolveStatus::near_optimal)
            solver_trouble = true;
    }
    return solver_trouble ? kExitSolver : kExitOk;
}

int cmd_quadrature(const CommonFlags& f) {
    ScenarioConfig cfg = resolve(f);
    Quadrature q = gauss_radau(cfg.quadrature_m);
    std::ofstream file;
    std::ostream& os = open_out(f.out_path, file);
    os << "node,weight\n";
    os.precision(17);
    for (int i = 0; i < q.m; ++i) os << q.nodes[i] << "," << q.weights[i] << "\n";
    return kExitOk;
}

int cmd_export_sdp(const CommonFlags& f) {
    ScenarioConfig cfg = resolve(f);
    const double v = visibility(cfg.noise_params(), cfg.protocol);
    DensityMatrix rho = isotropic_time_state(v, cfg.d);
    std::vector<LabeledPovm> povms;
    if (cfg.protocol == Protocol::P2)
        povms = {build_m0(cfg.d), build_m1_p2(cfg.d)};
    else
        povms = {build_m0(cfg.d), build_m1_p1(cfg.d), build_m2_p1(cfg.d)};
    SdpProblem prob = assemble_sdp(constraints_from_state(povms, rho), cfg.d,
                                   gauss_radau(cfg.quadrature_m));
    std::ofstream file;
    std::ostream& os = open_out(f.out_path, file);
    export_sdp(prob, os);
    return kExitOk;
}

int cmd_validate(const CommonFlags& f) {
    ScenarioConfig cfg = resolve(f);
    std::ofstream file;
    std::ostream& os = open_out(f.out_path, file);
    bool all_ok = true;
    auto report = [&](const std::string& name, bool ok, const std::string& detail) {
        os << (ok ? "[pass] " : "[FAIL] ") << name;
        if (!detail.empty()) os << "  (" << detail << ")";
        os << "\n";
        all_ok = all_ok && ok;
    };

    {  // POVM completeness
        double worst = 0.0;
        for (int d : {2, 4, 6}) {
            for (const auto& povm :
                 {build_m0(d), build_m1_p1(d), build_m2_p1(d), build_m1_p2(d)}) {
                Operator s = povm.sum();
                worst = std::max(worst,
                                 (s - Operator::Identity(d * d, d * d)).cwiseAbs().maxCoeff());
            }
        }
        report("povm completeness d={2,4,6}", worst <= 1e-10,
               "max deviation " + std::to_string(worst));
    }
    {  // quadrature moments
        bool ok = true;
        for (int m = 1; m <= 10; ++m) {
            Quadrature q = gauss_radau(m);
            for (int k = 0; k <= 2 * m - 2; ++k) {
                double s = 0.0;
                for (int i = 0; i < m; ++i) s += q.weights[i] * std::pow(q.nodes[i], k);
                ok = ok && std::abs(s - 1.0 / (k + 1)) <= 1e-10;
            }
        }
        report("gauss-radau moments m=1..10", ok, "");
    }
    {  // noise closed forms vs Monte Carlo (reduced frame count)
        NoiseParams np = cfg.noise_params();
        bool ok = true;
        std::string detail;
        for (Protocol proto : {Protocol::P1, Protocol::P2}) {
            auto mc = monte_carlo_estimate(np, proto, 2'000'000, cfg.seed);
            double dtt = std::abs(mc.p_tt11 - p_tt11(np, proto));
            double dg = std::abs(mc.p_good - p_good(np, proto));
            bool this_ok = dtt <= 4.0 * std::max(mc.stderr_tt11, 1e-12) &&
                           dg <= 4.0 * std::max(mc.stderr_good, 1e-12);
            if (!this_ok) detail += std::string(protocol_name(proto)) + " off ";
            ok = ok && this_ok;
        }
        report("noise closed forms vs monte carlo (2e6 frames, 4 sigma)", ok, detail);
    }
    {  // entropy: SDP bound must not exceed the oracle at the true state
        const int d = 2, m = 5;
        DensityMatrix rho = isotropic_time_state(0.9, d);
        auto cons = constraints_from_state({build_m0(d), build_m1_p1(d), build_m2_p1(d)}, rho);
        SdpSolution sol =
            solve_entropy_bound(assemble_sdp(std::move(cons), d, gauss_radau(m)));
        double oracle = direct_entropy_oracle(rho, d);
        bool ok = (sol.status == SolveStatus::optimal ||
                   sol.status == SolveStatus::near_optimal) &&
                  sol.objective_bits <= oracle + 1e-6;
        report("entropy bound below oracle (d=2, v=0.9, m=5)", ok,
               "bound " + std::to_string(sol.objective_bits) + " oracle " +
                   std::to_string(oracle));
    }
    return all_ok ? kExitOk : kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"asymptotic key-rate bounds for high-dimensional time-bin QKD"};
    app.require_subcommand(1);

    CommonFlags flags;
    auto* rate = app.add_subcommand("rate", "single-point key rate");
    auto* sweep_cmd = app.add_subcommand("sweep", "CSV sweep over solar rate or loss");
    auto* validate = app.add_subcommand("validate", "run the built-in validation suites");
    auto* quad = app.add_subcommand("quadrature", "print Gauss-Radau nodes and weights");
    auto* exp = app.add_subcommand("export-sdp", "write the canonical SDP problem file");
    for (auto* cmd : {rate, sweep_cmd, validate, quad, exp}) add_common(cmd, flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (rate->parsed()) return cmd_rate(flags);
        if (sweep_cmd->parsed()) return cmd_sweep(flags);
        if (validate->parsed()) return cmd_validate(flags);
        if (quad->parsed()) return cmd_quadrature(flags);
        if (exp->parsed()) return cmd_export_sdp(flags);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSolver;
    }
    return kExitConfig;
}
