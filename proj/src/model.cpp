#include "hdqkd/model.hpp"

#include <cmath>

namespace hdqkd {

const char* protocol_name(Protocol p) {
    switch (p) {
        case Protocol::P1: return "p1";
        case Protocol::P2: return "p2";
        case Protocol::BBM92: return "bbm92";
    }
    return "?";
}

void ProtocolConfig::validate() const {
    if (d < 2 || d % 2 != 0)
        throw std::invalid_argument("ProtocolConfig: d must be even and >= 2");
    if (protocol == Protocol::BBM92 && d != 2)
        throw std::invalid_argument("ProtocolConfig: BBM92 requires d = 2");
}

Operator time_shift_op(int d) {
    if (d < 2) throw std::invalid_argument("time_shift_op: d < 2");
    Operator t = Operator::Zero(d, d);
    for (int n = 0; n + 1 < d; ++n) t(n + 1, n) = 1.0;
    return t;
}

Operator phase_shift_op(double phi, int dim_pol_time) {
    return std::exp(Complex(0.0, phi)) * Operator::Identity(dim_pol_time, dim_pol_time);
}

Operator interferometer_unitary_single(int d, double phi) {
    if (d < 2) throw std::invalid_argument("interferometer_unitary_single: d < 2");
    const int dt = d + 1;
    Operator u = Operator::Zero(2 * dt, 2 * dt);
    for (int n = 0; n < dt; ++n) u(n, n) = 1.0;  // H passthrough
    const Complex ph = std::exp(Complex(0.0, phi));
    for (int n = 0; n + 1 < dt; ++n) u(dt + n + 1, dt + n) = ph;  // V delayed one bin
    return u;
}

Ket superposition_ket(int i, Sign sign, int d) {
    if (i < 1 || i > d - 1)
        throw std::invalid_argument("superposition_ket: need 1 <= i <= d-1");
    Ket k = Ket::Zero(d);
    const double s = sign == Sign::plus ? 1.0 : -1.0;
    k(i) = 1.0 / std::sqrt(2.0);
    k(i - 1) = s / std::sqrt(2.0);
    return k;
}

Ket effective_meas_ket(int x, int i, double phi, int d) {
    if (x != 1 && x != 2) throw std::invalid_argument("effective_meas_ket: x must be 1 or 2");
    if (i < 1 || i > d - 1)
        throw std::invalid_argument("effective_meas_ket: need 1 <= i <= d-1");
    Ket k = Ket::Zero(2 * d);
    const double sgn = x == 1 ? 1.0 : -1.0;
    k(i) = 1.0 / std::sqrt(2.0);                                       // |H,i>
    k(d + i - 1) = sgn * std::exp(Complex(0.0, -phi)) / std::sqrt(2.0);  // |V,i-1>
    return k;
}

Ket maximally_entangled_time(int d) {
    Ket k = Ket::Zero(static_cast<Eigen::Index>(d) * d);
    for (int n = 0; n < d; ++n) k(static_cast<Eigen::Index>(n) * d + n) = 1.0 / std::sqrt(double(d));
    return k;
}

TargetState target_state(const ProtocolConfig& cfg) {
    cfg.validate();
    const int d = cfg.d;
    if (cfg.protocol == Protocol::P2) {
        // ((|HH> + |VV>)/sqrt2) (x) Phi_d, regrouped party-major:
        // (pol_A (x) time_A) (x) (pol_B (x) time_B)
        Ket full = Ket::Zero(static_cast<Eigen::Index>(4) * d * d);
        const double amp = 1.0 / std::sqrt(2.0 * d);
        for (int p = 0; p < 2; ++p)
            for (int k = 0; k < d; ++k) {
                Eigen::Index ia = static_cast<Eigen::Index>(p) * d + k;   // Alice pol,time
                Eigen::Index ib = static_cast<Eigen::Index>(p) * d + k;   // Bob pol,time
                full(ia * 2 * d + ib) = amp;
            }
        return {full};
    }
    return {maximally_entangled_time(d)};
}

DensityMatrix isotropic_time_state(double v, int d) {
    if (v < 0.0 || v > 1.0)
        throw std::invalid_argument("isotropic_time_state: v outside [0,1]");
    const Ket phi = maximally_entangled_time(d);
    const Eigen::Index n = phi.size();
    Operator rho = v * projector(phi) +
                   ((1.0 - v) / double(n)) * Operator::Identity(n, n);
    return DensityMatrix(std::move(rho));
}

}  // namespace hdqkd
