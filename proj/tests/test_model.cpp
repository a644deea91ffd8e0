#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hdqkd/model.hpp"

using namespace hdqkd;

namespace {

double maxabs(const Operator& m) { return m.cwiseAbs().maxCoeff(); }

Ket basis(int i, int d) {
    Ket k = Ket::Zero(d);
    k(i) = 1.0;
    return k;
}

}  // namespace

TEST_CASE("config validation") {
    ProtocolConfig cfg;
    cfg.d = 3;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.d = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.protocol = Protocol::BBM92;
    cfg.d = 4;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.d = 2;
    CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("time shift on the truncated space") {
    Operator t = time_shift_op(2);
    CHECK(maxabs(t * basis(0, 2) - basis(1, 2)) == 0.0);
    CHECK((t * basis(1, 2)).norm() == 0.0);  // |d-1> truncates to zero

    for (int d : {2, 4, 6}) {
        Operator td = time_shift_op(d);
        Operator expect = Operator::Identity(d, d);
        expect(d - 1, d - 1) = 0.0;
        CHECK(maxabs(td.adjoint() * td - expect) < 1e-15);
    }
}

TEST_CASE("phase shift") {
    CHECK(maxabs(phase_shift_op(0.0, 4) - Operator::Identity(4, 4)) == 0.0);
    CHECK(maxabs(phase_shift_op(M_PI, 4) + Operator::Identity(4, 4)) < 1e-15);
    CHECK(maxabs(phase_shift_op(0.7, 5) * phase_shift_op(-0.7, 5) -
                 Operator::Identity(5, 5)) < 1e-14);
}

TEST_CASE("single-party interferometer action") {
    const int d = 4;
    const double phi = 0.3;
    Operator u = interferometer_unitary_single(d, phi);
    const int dt = d + 1;
    // |H,0> passes untouched
    Ket h0 = Ket::Zero(2 * dt);
    h0(0) = 1.0;
    CHECK(maxabs(u * h0 - h0) == 0.0);
    // |V,0> -> e^{i phi} |V,1>
    Ket v0 = Ket::Zero(2 * dt), v1 = Ket::Zero(2 * dt);
    v0(dt) = 1.0;
    v1(dt + 1) = 1.0;
    CHECK(maxabs(u * v0 - std::exp(Complex(0, phi)) * v1) < 1e-15);
}

TEST_CASE("interferometer restriction to the physical domain is an isometry") {
    for (int d : {2, 4}) {
        Operator u = interferometer_unitary_single(d, 0.4);
        const int dt = d + 1;
        // physical columns: (H, n) and (V, n) for n < d
        std::vector<int> cols;
        for (int n = 0; n < d; ++n) cols.push_back(n);
        for (int n = 0; n < d; ++n) cols.push_back(dt + n);
        Operator r(2 * dt, 2 * d);
        for (size_t c = 0; c < cols.size(); ++c) r.col(c) = u.col(cols[c]);
        CHECK(maxabs(r.adjoint() * r - Operator::Identity(2 * d, 2 * d)) < 1e-12);
    }
}

TEST_CASE("superposition kets") {
    const int d = 4;
    for (int i = 1; i < d; ++i) {
        Ket plus = superposition_ket(i, Sign::plus, d);
        Ket minus = superposition_ket(i, Sign::minus, d);
        CHECK(std::abs(plus.norm() - 1.0) < 1e-15);
        CHECK(std::abs(Complex(plus.adjoint() * minus)) < 1e-15);  // <i+|i-> = 0
    }
    Ket p = superposition_ket(1, Sign::plus, 2);
    CHECK(p(0) == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(p(1) == doctest::Approx(1.0 / std::sqrt(2.0)));
    // <1+|0> = 1/sqrt(2) for any d
    for (int d2 : {2, 4, 8})
        CHECK(std::abs(Complex(superposition_ket(1, Sign::plus, d2).adjoint() * basis(0, d2))) ==
              doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK_THROWS_AS(superposition_ket(0, Sign::plus, 4), std::invalid_argument);
    CHECK_THROWS_AS(superposition_ket(4, Sign::plus, 4), std::invalid_argument);
}

TEST_CASE("effective measurement kets") {
    const int d = 4;
    const double phi = 0.0;
    // x=2, phi=0: overlap with |H,i> is 1/sqrt(2)
    Ket psi2 = effective_meas_ket(2, 2, phi, d);
    Ket h2 = Ket::Zero(2 * d);
    h2(2) = 1.0;
    CHECK(std::abs(Complex(h2.adjoint() * psi2)) == doctest::Approx(1.0 / std::sqrt(2.0)));

    // detector orthogonality for any phase
    for (double ph : {0.0, 0.4, 2.1})
        for (int i = 1; i < d; ++i)
            CHECK(std::abs(Complex(effective_meas_ket(1, i, ph, d).adjoint() *
                                   effective_meas_ket(2, i, ph, d))) < 1e-14);

    // <D, i+|Psi_1(i, 0)> = 1 with |D,i+> = (|H>+|V>)/sqrt2 (x) |i+>
    for (int i = 1; i < d; ++i) {
        Ket pol_d(2);
        pol_d << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
        // embed |D> (x) |i+> into the pol (x) time ordering, where |i+>
        // mixes time bins i and i-1
        Ket di = Ket::Zero(2 * d);
        Ket sup = superposition_ket(i, Sign::plus, d);
        for (int p = 0; p < 2; ++p)
            for (int n = 0; n < d; ++n) di(p * d + n) = pol_d(p) * sup(n);
        // the V component of Psi_1 sits at time i-1, the H component at i
        CHECK(std::abs(Complex(di.adjoint() * effective_meas_ket(1, i, 0.0, d))) ==
              doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("effective kets equal the interferometer pullback of detector projections") {
    // U_I^dag |D,i> = Psi_1(i, phi), U_I^dag |A,i> = Psi_2(i, phi) on the
    // embedded space, for all i in 1..d-1
    for (int d : {2, 4}) {
        for (double phi : {0.0, 0.7}) {
            Operator u = interferometer_unitary_single(d, phi);
            const int dt = d + 1;
            for (int i = 1; i < d; ++i) {
                for (int x : {1, 2}) {
                    Ket det = Ket::Zero(2 * dt);  // |D/A, i> embedded
                    const double s = x == 1 ? 1.0 : -1.0;
                    det(i) = 1.0 / std::sqrt(2.0);
                    det(dt + i) = s / std::sqrt(2.0);
                    Ket pulled = u.adjoint() * det;
                    Ket expect_small = effective_meas_ket(x, i, phi, d);
                    Ket expect = Ket::Zero(2 * dt);
                    for (int n = 0; n < d; ++n) {
                        expect(n) = expect_small(n);
                        expect(dt + n) = expect_small(d + n);
                    }
                    CHECK((pulled - expect).norm() < 1e-12);
                }
            }
        }
    }
}

TEST_CASE("effective kets span the same subspace as {|H,i>, |V,i-1>}") {
    const int d = 4;
    for (double phi : {0.0, 1.3}) {
        for (int i = 1; i < d; ++i) {
            Operator p1 = projector(effective_meas_ket(1, i, phi, d)) +
                          projector(effective_meas_ket(2, i, phi, d));
            Ket hi = Ket::Zero(2 * d), vim = Ket::Zero(2 * d);
            hi(i) = 1.0;
            vim(d + i - 1) = 1.0;
            Operator p2 = projector(hi) + projector(vim);
            CHECK(maxabs(p1 - p2) < 1e-12);
        }
    }
}

TEST_CASE("superposition pairs tile the time space") {
    for (int d : {2, 4, 6, 8}) {
        // {|i+->, i odd} is an orthonormal basis
        std::vector<Ket> odd;
        for (int i = 1; i < d; i += 2) {
            odd.push_back(superposition_ket(i, Sign::plus, d));
            odd.push_back(superposition_ket(i, Sign::minus, d));
        }
        REQUIRE(static_cast<int>(odd.size()) == d);
        for (size_t a = 0; a < odd.size(); ++a)
            for (size_t b = 0; b < odd.size(); ++b)
                CHECK(std::abs(Complex(odd[a].adjoint() * odd[b]) -
                               Complex(a == b ? 1.0 : 0.0)) < 1e-12);

        // {|0>, |d-1>} plus the even interior pairs likewise
        std::vector<Ket> even{basis(0, d), basis(d - 1, d)};
        for (int i = 2; i < d - 1; i += 2) {
            even.push_back(superposition_ket(i, Sign::plus, d));
            even.push_back(superposition_ket(i, Sign::minus, d));
        }
        REQUIRE(static_cast<int>(even.size()) == d);
        for (size_t a = 0; a < even.size(); ++a)
            for (size_t b = 0; b < even.size(); ++b)
                CHECK(std::abs(Complex(even[a].adjoint() * even[b]) -
                               Complex(a == b ? 1.0 : 0.0)) < 1e-12);
    }
}

TEST_CASE("target states") {
    ProtocolConfig p1{Protocol::P1, 2};
    TargetState t1 = target_state(p1);
    CHECK(t1.ket.size() == 4);
    CHECK(t1.ket(0) == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(t1.ket(3) == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(std::abs(t1.ket.norm() - 1.0) < 1e-12);

    // P2, d=2: norm 1 and Schmidt rank 4 = 2d across the A|B cut
    ProtocolConfig p2{Protocol::P2, 2};
    TargetState t2 = target_state(p2);
    CHECK(t2.ket.size() == 16);
    CHECK(std::abs(t2.ket.norm() - 1.0) < 1e-12);
    Eigen::Map<const Operator> m(t2.ket.data(), 4, 4);  // B fast index
    Eigen::JacobiSVD<Operator> svd(m);
    int rank = 0;
    for (int i = 0; i < 4; ++i)
        if (svd.singularValues()(i) > 1e-12) ++rank;
    CHECK(rank == 4);

    // flat-state overlap: Tr[rho_mix |Phi><Phi|] = 1/d^2
    for (int d : {2, 4}) {
        Ket phi = maximally_entangled_time(d);
        const double overlap =
            (projector(phi) * Operator::Identity(d * d, d * d) / double(d * d)).trace().real();
        CHECK(overlap == doctest::Approx(1.0 / double(d * d)).epsilon(1e-12));
    }
}

TEST_CASE("isotropic state") {
    CHECK_THROWS_AS(isotropic_time_state(-0.1, 2), std::invalid_argument);
    CHECK_THROWS_AS(isotropic_time_state(1.1, 2), std::invalid_argument);

    DensityMatrix pure = isotropic_time_state(1.0, 2);
    CHECK(maxabs(pure.entries() - projector(maximally_entangled_time(2))) < 1e-15);

    DensityMatrix flat = isotropic_time_state(0.0, 2);
    CHECK(maxabs(flat.entries() - Operator::Identity(4, 4) / 4.0) < 1e-15);

    // d=2, v=0.9: spectrum {0.925, 0.025 x3}
    DensityMatrix r = isotropic_time_state(0.9, 2);
    EigResult e = eig_hermitian(r.entries());
    CHECK(e.values(3) == doctest::Approx(0.925));
    for (int i = 0; i < 3; ++i) CHECK(e.values(i) == doctest::Approx(0.025));

    // fidelity with the maximally entangled state: v + (1-v)/d^2
    for (int d : {2, 4})
        for (double v : {0.3, 0.85}) {
            DensityMatrix rho = isotropic_time_state(v, d);
            Ket phi = maximally_entangled_time(d);
            double fid = (phi.adjoint() * rho.entries() * phi).real()(0);
            CHECK(fid == doctest::Approx(v + (1.0 - v) / (d * d)).epsilon(1e-12));
        }
}
