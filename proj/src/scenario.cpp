#include "hdqkd/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace hdqkd {

std::vector<double> SweepSpec::grid() const {
    if (points < 1) throw ConfigError("sweep: points must be >= 1");
    if (points == 1) return {start};
    if (stop < start) throw ConfigError("sweep: stop < start");
    std::vector<double> g(points);
    if (log_scale) {
        if (start <= 0.0) throw ConfigError("sweep: log scale needs positive start");
        const double f = std::log(stop / start) / (points - 1);
        for (int i = 0; i < points; ++i) g[i] = start * std::exp(f * i);
    } else {
        const double step = (stop - start) / (points - 1);
        for (int i = 0; i < points; ++i) g[i] = start + step * i;
    }
    g.back() = stop;
    return g;
}

double ScenarioConfig::resolved_loss_prob() const {
    if (loss_prob) return *loss_prob;
    if (loss_db) return 1.0 - std::pow(10.0, -*loss_db / 10.0);
    return 1.0 - std::pow(10.0, -25.2 / 10.0);  // default 25.2 dB
}

double ScenarioConfig::resolved_loss_db() const {
    const double p = resolved_loss_prob();
    if (p >= 1.0) return std::numeric_limits<double>::infinity();
    return -10.0 * std::log10(1.0 - p);
}

NoiseParams ScenarioConfig::noise_params() const {
    return {frame_length_s, pair_rate_hz, dark_rate_hz, solar_rate_hz, eta_d,
            resolved_loss_prob()};
}

ProtocolConfig ScenarioConfig::protocol_config() const {
    ProtocolConfig pc;
    pc.protocol = protocol;
    pc.d = d;
    return pc;
}

void ScenarioConfig::validate() const {
    if (loss_db && loss_prob)
        throw ConfigError("loss_db and loss_prob are mutually exclusive");
    protocol_config().validate();
    noise_params().validate();
    if (quadrature_m < 1) throw ConfigError("quadrature_m must be >= 1");
    if (solver_tol <= 0.0) throw ConfigError("solver_tol must be positive");
    if (solver != "ipm") throw ConfigError("unknown solver backend: " + solver);
    if (sweep) sweep->grid();
}

namespace {

Protocol parse_protocol(const std::string& v) {
    if (v == "p1") return Protocol::P1;
    if (v == "p2") return Protocol::P2;
    if (v == "bbm92") return Protocol::BBM92;
    throw ConfigError("protocol must be one of p1, p2, bbm92 (got '" + v + "')");
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return x;
    } catch (const std::exception&) {
        throw ConfigError(key + ": not a number: '" + v + "'");
    }
}

long parse_long(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        long x = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return x;
    } catch (const std::exception&) {
        throw ConfigError(key + ": not an integer: '" + v + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError(key + ": not a boolean: '" + v + "'");
}

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    size_t b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

}  // namespace

void apply_override(ScenarioConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "protocol") cfg.protocol = parse_protocol(value);
    else if (key == "d") cfg.d = static_cast<int>(parse_long(key, value));
    else if (key == "frame_length_s") {
        const bool default_pair = cfg.pair_rate_hz == 0.1 / cfg.frame_length_s;
        cfg.frame_length_s = parse_double(key, value);
        if (default_pair) cfg.pair_rate_hz = 0.1 / cfg.frame_length_s;  // keep 0.1 per frame
    }
    else if (key == "pair_rate_hz") cfg.pair_rate_hz = parse_double(key, value);
    else if (key == "dark_rate_hz") cfg.dark_rate_hz = parse_double(key, value);
    else if (key == "solar_rate_hz") cfg.solar_rate_hz = parse_double(key, value);
    else if (key == "loss_db") cfg.loss_db = parse_double(key, value);
    else if (key == "loss_prob") cfg.loss_prob = parse_double(key, value);
    else if (key == "eta_d") cfg.eta_d = parse_double(key, value);
    else if (key == "quadrature_m" || key == "m") cfg.quadrature_m = static_cast<int>(parse_long(key, value));
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_long(key, value));
    else if (key == "solver") cfg.solver = value;
    else if (key == "solver_tol") cfg.solver_tol = parse_double(key, value);
    else if (key == "sweep_axis") {
        if (!cfg.sweep) cfg.sweep.emplace();
        if (value == "solar_rate") cfg.sweep->axis = SweepAxis::solar_rate;
        else if (value == "loss_db") cfg.sweep->axis = SweepAxis::loss_db;
        else throw ConfigError("sweep_axis must be solar_rate or loss_db");
        // solar sweeps default to log spacing, loss sweeps to linear
        cfg.sweep->log_scale = cfg.sweep->axis == SweepAxis::solar_rate;
    }
    else if (key == "sweep_start") { if (!cfg.sweep) cfg.sweep.emplace(); cfg.sweep->start = parse_double(key, value); }
    else if (key == "sweep_stop") { if (!cfg.sweep) cfg.sweep.emplace(); cfg.sweep->stop = parse_double(key, value); }
    else if (key == "sweep_points") { if (!cfg.sweep) cfg.sweep.emplace(); cfg.sweep->points = static_cast<int>(parse_long(key, value)); }
    else if (key == "sweep_log") { if (!cfg.sweep) cfg.sweep.emplace(); cfg.sweep->log_scale = parse_bool(key, value); }
    else throw ConfigError("unknown key: '" + key + "'");
}

ScenarioConfig parse_config(const std::string& path) {
    ScenarioConfig cfg;
    if (path.empty()) return cfg;
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string s = line;
        size_t hash = s.find('#');
        if (hash != std::string::npos) s = s.substr(0, hash);
        s = trim(s);
        if (s.empty()) continue;
        size_t eq = s.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
        try {
            apply_override(cfg, trim(s.substr(0, eq)), trim(s.substr(eq + 1)));
        } catch (const ConfigError& e) {
            throw ConfigError(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return cfg;
}

const char* const kCsvHeader =
    "protocol,d,m,frame_length_s,pair_rate_hz,dark_rate_hz,solar_rate_hz,loss_db,eta_d,"
    "v,qber,s_ae_lb_bits,h_ab_bits,rate_per_coincidence,rate_per_second,upper_bound_only,status";

namespace {

std::string num(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    double r = std::round(x * 1e9) / 1e9;
    if (r == 0.0) r = 0.0;  // normalize -0
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", r);
    return buf;
}

}  // namespace

std::string csv_row(const ScenarioConfig& cfg, const NoiseParams& params,
                    const KeyRateResult& r) {
    std::ostringstream os;
    const double loss_db =
        params.loss_prob_b >= 1.0 ? std::numeric_limits<double>::infinity()
                                  : -10.0 * std::log10(1.0 - params.loss_prob_b);
    os << protocol_name(cfg.protocol) << ',' << cfg.d << ',' << cfg.quadrature_m << ','
       << num(params.frame_length_s) << ',' << num(params.pair_rate_hz) << ','
       << num(params.dark_rate_hz) << ',' << num(params.solar_rate_hz) << ','
       << num(loss_db) << ',' << num(params.eta_d) << ',' << num(r.v) << ','
       << num(r.qber_value) << ',' << num(r.s_ae_lb) << ',' << num(r.h_ab) << ','
       << num(r.rate_per_coincidence) << ',' << num(r.rate_per_second) << ','
       << (r.upper_bound_only ? 1 : 0) << ',' << solve_status_name(r.status);
    return os.str();
}

}  // namespace hdqkd
