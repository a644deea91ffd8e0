#pragma once

#include "hdqkd/model.hpp"

#include <array>
#include <optional>
#include <vector>

// Measurement-setting POVMs on the temporal d^2 space and the labeled
// click-matrix algebra for both protocols.
//
// Sign<->detector convention (fixed globally): detector 1 <-> '+',
// detector 2 <-> '-' on both sides. All operators here are built at
// phi^A = phi^B = 0.

namespace hdqkd {

enum class ClickKind { TT, SS, TS, ST, Residual };

struct ClickLabel {
    ClickKind kind = ClickKind::TT;
    int i = -1, j = -1;            // time indices
    std::optional<int> a, b;       // detector indices in {1,2}; SS carries both,
                                   // ST only a, TS only b, TT neither
};

struct PovmElement {
    ClickLabel label;
    Operator op;       // acts on dim d^2
    double weight;     // click-matrix entry * weight == Tr(op * rho)
};

enum class Setting { M0, M1, M2 };

struct LabeledPovm {
    Setting setting;
    Protocol protocol;
    int d;
    std::vector<PovmElement> elements;

    Operator sum() const;  // completeness check helper
};

LabeledPovm build_m0(int d);
LabeledPovm build_m1_p1(int d);

/// d = 2 degenerates to the four corner TT projectors (a duplicate of M0);
/// constraint assembly deduplicates them.
LabeledPovm build_m2_p1(int d);

/// Includes the (1/3)-scaled residual element (ClickKind::Residual), kept for
/// completeness validation and excluded from SDP constraints.
LabeledPovm build_m1_p2(int d);

struct ClickMatrices {
    RealMatrix tt;                           // d x d, indices 0..d-1
    std::array<std::array<RealMatrix, 2>, 2> ss;  // [a-1][b-1], (d-1)x(d-1), i,j in 1..d-1
    std::array<RealMatrix, 2> ts;            // [b-1], d x (d-1)
    std::array<RealMatrix, 2> st;            // [a-1], (d-1) x d
};

ClickMatrices click_probabilities_p1(const DensityMatrix& rho_t, int d);
ClickMatrices click_probabilities_p2(const DensityMatrix& rho_t, int d);

/// Click-matrix entry addressed by a label; Residual labels are rejected.
double click_value(const ClickMatrices& c, const ClickLabel& label);

struct Constraint {
    Operator op;
    double value;
};

/// One equality constraint per POVM element, f_k = Tr(E_k rho). Residual
/// elements are dropped; elements with identical operators are deduplicated.
std::vector<Constraint> constraints_from_state(const std::vector<LabeledPovm>& povms,
                                               const DensityMatrix& rho);

}  // namespace hdqkd
