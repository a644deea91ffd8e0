#pragma once

#include "hdqkd/linalg.hpp"

// Time-bin states, interferometer unitaries, effective measurement kets and
// the isotropic noisy state.
//
// Polarization (x) time ordering inside one party: index p*d + n with
// p = 0 (H), p = 1 (V). Two-party states are party-major: A (x) B.

namespace hdqkd {

enum class Protocol { P1, P2, BBM92 };

const char* protocol_name(Protocol p);

struct ProtocolConfig {
    Protocol protocol = Protocol::P1;
    int d = 2;             // number of time-bins, even
    double phi_a = 0.0;    // interferometer phases (radians)
    double phi_b = 0.0;
    double eta_bs = 0.5;   // TOA/TSUP beamsplitter ratio; recorded only, never
                           // enters asymptotic rates

    void validate() const;  // d even >= 2; BBM92 implies d == 2
};

/// |n> -> |n+1> on the d-dimensional truncation; the column of |d-1> is zero.
Operator time_shift_op(int d);

/// e^{i phi} times the identity on a polarization (x) time space.
Operator phase_shift_op(double phi, int dim_pol_time);

/// Single-party TSUP interferometer on polarization (x) time with the time
/// axis extended to d+1 bins so the shift is an isometry on the physical
/// domain: |H,n> -> |H,n>, |V,n> -> e^{i phi} |V,n+1>. Size 2(d+1).
Operator interferometer_unitary_single(int d, double phi);

enum class Sign { plus, minus };

/// |i+-> := (|i> +- |i-1>)/sqrt(2), valid for 1 <= i <= d-1.
Ket superposition_ket(int i, Sign sign, int d);

/// Detector-x effective ket (|H,i> + (-1)^{x-1} e^{-i phi} |V,i-1>)/sqrt(2)
/// in the 2d-dimensional polarization (x) time space; x in {1,2}, 1 <= i <= d-1.
Ket effective_meas_ket(int x, int i, double phi, int d);

/// (1/sqrt(d)) sum_k |kk>, dimension d^2.
Ket maximally_entangled_time(int d);

struct TargetState {
    Ket ket;  // P1/BBM92: temporal d^2 (post-filter reduction); P2: (2d)^2
};

TargetState target_state(const ProtocolConfig& cfg);

/// rho(v) = v |Phi><Phi| + (1-v) 1/d^2 on the temporal d^2 space.
DensityMatrix isotropic_time_state(double v, int d);

}  // namespace hdqkd
