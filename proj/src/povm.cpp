#include "hdqkd/povm.hpp"

#include <cmath>

namespace hdqkd {

namespace {

Ket basis_ket(int i, int d) {
    Ket k = Ket::Zero(d);
    k(i) = 1.0;
    return k;
}

Ket side_ket(int idx, std::optional<Sign> sign, int d) {
    // TOA index when sign is empty, superposition |idx+-> otherwise
    return sign ? superposition_ket(idx, *sign, d) : basis_ket(idx, d);
}

int detector_of(Sign s) { return s == Sign::plus ? 1 : 2; }

void require_even(int d, const char* who) {
    if (d < 2 || d % 2 != 0)
        throw std::invalid_argument(std::string(who) + ": d must be even and >= 2");
}

double real_expect(const Ket& psi, const Operator& rho) {
    return std::real(Complex(psi.adjoint() * rho * psi));
}

}  // namespace

Operator LabeledPovm::sum() const {
    Operator s = Operator::Zero(d * d, d * d);
    for (const auto& e : elements) s += e.op;
    return s;
}

LabeledPovm build_m0(int d) {
    require_even(d, "build_m0");
    LabeledPovm povm{Setting::M0, Protocol::P1, d, {}};
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            ClickLabel lbl{ClickKind::TT, i, j, {}, {}};
            povm.elements.push_back(
                {lbl, projector(tensor(basis_ket(i, d), basis_ket(j, d))), 1.0});
        }
    return povm;
}

LabeledPovm build_m1_p1(int d) {
    require_even(d, "build_m1_p1");
    LabeledPovm povm{Setting::M1, Protocol::P1, d, {}};
    for (int i = 1; i < d; i += 2)
        for (int j = 1; j < d; j += 2)
            for (Sign sa : {Sign::plus, Sign::minus})
                for (Sign sb : {Sign::plus, Sign::minus}) {
                    ClickLabel lbl{ClickKind::SS, i, j, detector_of(sa), detector_of(sb)};
                    povm.elements.push_back(
                        {lbl,
                         projector(tensor(superposition_ket(i, sa, d),
                                          superposition_ket(j, sb, d))),
                         4.0});
                }
    return povm;
}

LabeledPovm build_m2_p1(int d) {
    require_even(d, "build_m2_p1");
    LabeledPovm povm{Setting::M2, Protocol::P1, d, {}};
    std::vector<int> interior;  // even i with 0 < i < d-1
    for (int i = 2; i < d - 1; i += 2) interior.push_back(i);
    const std::array<int, 2> boundary{0, d - 1};

    for (int i : interior)
        for (int j : interior)
            for (Sign sa : {Sign::plus, Sign::minus})
                for (Sign sb : {Sign::plus, Sign::minus}) {
                    ClickLabel lbl{ClickKind::SS, i, j, detector_of(sa), detector_of(sb)};
                    povm.elements.push_back(
                        {lbl,
                         projector(tensor(superposition_ket(i, sa, d),
                                          superposition_ket(j, sb, d))),
                         4.0});
                }
    for (int i : boundary)
        for (int j : interior)
            for (Sign sb : {Sign::plus, Sign::minus}) {
                ClickLabel lbl{ClickKind::TS, i, j, {}, detector_of(sb)};
                povm.elements.push_back(
                    {lbl,
                     projector(tensor(basis_ket(i, d), superposition_ket(j, sb, d))),
                     2.0});
            }
    for (int i : interior)
        for (int j : boundary)
            for (Sign sa : {Sign::plus, Sign::minus}) {
                ClickLabel lbl{ClickKind::ST, i, j, detector_of(sa), {}};
                povm.elements.push_back(
                    {lbl,
                     projector(tensor(superposition_ket(i, sa, d), basis_ket(j, d))),
                     2.0});
            }
    for (int i : boundary)
        for (int j : boundary) {
            ClickLabel lbl{ClickKind::TT, i, j, {}, {}};
            povm.elements.push_back(
                {lbl, projector(tensor(basis_ket(i, d), basis_ket(j, d))), 1.0});
        }
    return povm;
}

LabeledPovm build_m1_p2(int d) {
    require_even(d, "build_m1_p2");
    LabeledPovm povm{Setting::M1, Protocol::P2, d, {}};
    const double third = 1.0 / 3.0;
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

    // Phi_s / Phi_o interference projectors, all i,j in 1..d-1.
    for (int i = 1; i < d; ++i)
        for (int j = 1; j < d; ++j) {
            Ket pp = tensor(superposition_ket(i, Sign::plus, d), superposition_ket(j, Sign::plus, d));
            Ket mm = tensor(superposition_ket(i, Sign::minus, d), superposition_ket(j, Sign::minus, d));
            Ket pm = tensor(superposition_ket(i, Sign::plus, d), superposition_ket(j, Sign::minus, d));
            Ket mp = tensor(superposition_ket(i, Sign::minus, d), superposition_ket(j, Sign::plus, d));
            Ket phi_s = inv_sqrt2 * (pp + mm);
            Ket phi_o = inv_sqrt2 * (pm + mp);
            // SS_s(i,j) carries detectors (1,1); SS_o(i,j) detectors (1,2).
            povm.elements.push_back(
                {ClickLabel{ClickKind::SS, i, j, 1, 1}, third * projector(phi_s), 2.0 / 3.0});
            povm.elements.push_back(
                {ClickLabel{ClickKind::SS, i, j, 1, 2}, third * projector(phi_o), 2.0 / 3.0});
        }

    // Boundary TOA x TSUP elements. Odd indices only: the |j+->, j odd, pairs
    // tile the time space once per side, which is what makes the family sum
    // to 3*1 for every even d.
    const std::array<int, 2> boundary{0, d - 1};
    for (int i : boundary)
        for (int j = 1; j < d; j += 2)
            for (Sign sb : {Sign::plus, Sign::minus}) {
                ClickLabel lbl{ClickKind::TS, i, j, {}, detector_of(sb)};
                povm.elements.push_back(
                    {lbl,
                     third * projector(tensor(basis_ket(i, d), superposition_ket(j, sb, d))),
                     2.0 / 3.0});
            }
    for (int i = 1; i < d; i += 2)
        for (int j : boundary)
            for (Sign sa : {Sign::plus, Sign::minus}) {
                ClickLabel lbl{ClickKind::ST, i, j, detector_of(sa), {}};
                povm.elements.push_back(
                    {lbl,
                     third * projector(tensor(superposition_ket(i, sa, d), basis_ket(j, d))),
                     2.0 / 3.0});
            }

    // Redundant residual: (1/3)(1 - |00><00| - |d-1,d-1><d-1,d-1|), the TT
    // combination already measured by M0.
    Operator resid = Operator::Identity(d * d, d * d);
    resid -= projector(tensor(basis_ket(0, d), basis_ket(0, d)));
    resid -= projector(tensor(basis_ket(d - 1, d), basis_ket(d - 1, d)));
    povm.elements.push_back({ClickLabel{ClickKind::Residual, -1, -1, {}, {}}, third * resid, 1.0 / 3.0});
    return povm;
}

ClickMatrices click_probabilities_p1(const DensityMatrix& rho_t, int d) {
    require_even(d, "click_probabilities_p1");
    if (rho_t.dim() != d * d)
        throw std::invalid_argument("click_probabilities_p1: dimension mismatch");
    const Operator& rho = rho_t.entries();
    ClickMatrices c;
    c.tt = RealMatrix::Zero(d, d);
    for (auto& row : c.ss)
        for (auto& m : row) m = RealMatrix::Zero(d - 1, d - 1);
    for (auto& m : c.ts) m = RealMatrix::Zero(d, d - 1);
    for (auto& m : c.st) m = RealMatrix::Zero(d - 1, d);

    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            c.tt(i, j) = real_expect(tensor(basis_ket(i, d), basis_ket(j, d)), rho);

    const std::array<Sign, 2> signs{Sign::plus, Sign::minus};
    for (int i = 1; i < d; ++i)
        for (int j = 1; j < d; ++j)
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b)
                    c.ss[a][b](i - 1, j - 1) =
                        0.25 * real_expect(tensor(superposition_ket(i, signs[a], d),
                                                  superposition_ket(j, signs[b], d)),
                                           rho);
    for (int i = 0; i < d; ++i)
        for (int j = 1; j < d; ++j)
            for (int b = 0; b < 2; ++b)
                c.ts[b](i, j - 1) =
                    0.5 * real_expect(tensor(basis_ket(i, d), superposition_ket(j, signs[b], d)), rho);
    for (int i = 1; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int a = 0; a < 2; ++a)
                c.st[a](i - 1, j) =
                    0.5 * real_expect(tensor(superposition_ket(i, signs[a], d), basis_ket(j, d)), rho);
    return c;
}

ClickMatrices click_probabilities_p2(const DensityMatrix& rho_t, int d) {
    ClickMatrices c = click_probabilities_p1(rho_t, d);  // TT, TS, ST coincide
    const Operator& rho = rho_t.entries();
    for (int i = 1; i < d; ++i)
        for (int j = 1; j < d; ++j) {
            Ket pp = tensor(superposition_ket(i, Sign::plus, d), superposition_ket(j, Sign::plus, d));
            Ket mm = tensor(superposition_ket(i, Sign::minus, d), superposition_ket(j, Sign::minus, d));
            Ket pm = tensor(superposition_ket(i, Sign::plus, d), superposition_ket(j, Sign::minus, d));
            Ket mp = tensor(superposition_ket(i, Sign::minus, d), superposition_ket(j, Sign::plus, d));
            double same = 0.125 * std::real(Complex(pp.adjoint() * rho * pp) + Complex(pp.adjoint() * rho * mm) +
                                            Complex(mm.adjoint() * rho * pp) + Complex(mm.adjoint() * rho * mm));
            double opp = 0.125 * std::real(Complex(pm.adjoint() * rho * pm) + Complex(pm.adjoint() * rho * mp) +
                                           Complex(mp.adjoint() * rho * pm) + Complex(mp.adjoint() * rho * mp));
            c.ss[0][0](i - 1, j - 1) = same;
            c.ss[1][1](i - 1, j - 1) = same;
            c.ss[0][1](i - 1, j - 1) = opp;
            c.ss[1][0](i - 1, j - 1) = opp;
        }
    return c;
}

double click_value(const ClickMatrices& c, const ClickLabel& label) {
    switch (label.kind) {
        case ClickKind::TT:
            return c.tt(label.i, label.j);
        case ClickKind::SS:
            return c.ss[*label.a - 1][*label.b - 1](label.i - 1, label.j - 1);
        case ClickKind::TS:
            return c.ts[*label.b - 1](label.i, label.j - 1);
        case ClickKind::ST:
            return c.st[*label.a - 1](label.i - 1, label.j);
        case ClickKind::Residual:
            throw std::invalid_argument("click_value: residual label has no single click entry");
    }
    throw std::logic_error("click_value: bad label kind");
}

std::vector<Constraint> constraints_from_state(const std::vector<LabeledPovm>& povms,
                                               const DensityMatrix& rho) {
    std::vector<Constraint> out;
    for (const auto& povm : povms) {
        if (povm.d * povm.d != rho.dim())
            throw std::invalid_argument("constraints_from_state: dimension mismatch");
        for (const auto& e : povm.elements) {
            if (e.label.kind == ClickKind::Residual) continue;
            double f = std::real((e.op * rho.entries()).trace());
            bool dup = false;
            for (const auto& c : out)
                if ((c.op - e.op).cwiseAbs().maxCoeff() < 1e-12) {
                    dup = true;
                    break;
                }
            if (!dup) out.push_back({e.op, f});
        }
    }
    return out;
}

}  // namespace hdqkd
