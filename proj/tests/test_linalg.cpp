#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hdqkd/linalg.hpp"

#include <random>

using namespace hdqkd;

namespace {

std::mt19937_64 rng(7);

Operator random_matrix(int r, int c) {
    std::normal_distribution<double> g;
    Operator m(r, c);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) m(i, j) = Complex(g(rng), g(rng));
    return m;
}

Operator random_hermitian(int n) {
    Operator a = random_matrix(n, n);
    return 0.5 * (a + a.adjoint());
}

Operator random_density(int n) {
    Operator a = random_matrix(n, n);
    Operator rho = a * a.adjoint();
    rho /= rho.trace();
    return 0.5 * (rho + rho.adjoint());
}

Operator random_unitary(int n) {
    Eigen::HouseholderQR<Operator> qr(random_matrix(n, n));
    Operator q = qr.householderQ();
    return q;
}

double maxabs(const Operator& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("tensor identity and basis bookkeeping") {
    Operator i2 = Operator::Identity(2, 2);
    CHECK(maxabs(tensor(i2, i2) - Operator::Identity(4, 4)) == 0.0);

    Ket e0 = Ket::Zero(2), e1 = Ket::Zero(2);
    e0(0) = 1.0;
    e1(1) = 1.0;
    Operator p = tensor(projector(e0), projector(e1));
    CHECK(p(1, 1) == Complex(1.0));  // basis index 0*2+1: left factor is slow
    CHECK(maxabs(p - projector(tensor(e0, e1))) < 1e-15);
}

TEST_CASE("tensor mixed product identity") {
    for (int rep = 0; rep < 5; ++rep) {
        Operator a = random_matrix(2, 2), b = random_matrix(2, 2);
        Operator c = random_matrix(2, 2), d = random_matrix(2, 2);
        CHECK(maxabs(tensor(a, b) * tensor(c, d) - tensor((a * c).eval(), (b * d).eval())) <
              1e-12);
    }
}

TEST_CASE("tensor associativity up to dim 16") {
    Operator a = random_matrix(2, 2), b = random_matrix(2, 2), c = random_matrix(4, 4);
    CHECK(maxabs(tensor(tensor(a, b), c) - tensor(a, tensor(b, c))) < 1e-12);
}

TEST_CASE("partial trace of a maximally entangled state") {
    Ket phi = Ket::Zero(4);
    phi(0) = phi(3) = 1.0 / std::sqrt(2.0);
    Operator r = partial_trace(projector(phi), {2, 2}, {0});
    CHECK(maxabs(r - 0.5 * Operator::Identity(2, 2)) < 1e-15);
    r = partial_trace(projector(phi), {2, 2}, {1});
    CHECK(maxabs(r - 0.5 * Operator::Identity(2, 2)) < 1e-15);
}

TEST_CASE("partial trace of a product") {
    Operator a = random_hermitian(2), b = random_hermitian(3);
    Operator r = partial_trace(tensor(a, b), {2, 3}, {0});
    CHECK(maxabs(r - a * b.trace()) < 1e-12);
}

TEST_CASE("partial trace against the explicit index-sum oracle") {
    Operator rho = random_density(4);
    Operator r = partial_trace(rho, {2, 2}, {1});
    Operator expect = Operator::Zero(2, 2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k) expect(i, j) += rho(k * 2 + i, k * 2 + j);
    CHECK(maxabs(r - expect) < 1e-14);
    CHECK(std::abs(r.trace() - rho.trace()) < 1e-12);
}

TEST_CASE("partial trace over everything equals the scalar trace") {
    Operator rho = random_density(8);
    Operator r = partial_trace(rho, {2, 2, 2}, {});
    CHECK(r.rows() == 1);
    CHECK(std::abs(r(0, 0) - rho.trace()) < 1e-12);
}

TEST_CASE("partial trace rejects dimension mismatch") {
    Operator rho = random_density(4);
    CHECK_THROWS_AS(partial_trace(rho, {2, 3}, {0}), std::invalid_argument);
}

TEST_CASE("eig_hermitian basics") {
    EigResult r = eig_hermitian(Operator::Identity(3, 3));
    for (int i = 0; i < 3; ++i) CHECK(r.values(i) == doctest::Approx(1.0));

    Operator d = Operator::Zero(2, 2);
    d(0, 0) = 2.0;
    d(1, 1) = -1.0;
    r = eig_hermitian(d);
    CHECK(r.values(0) == doctest::Approx(-1.0));
    CHECK(r.values(1) == doctest::Approx(2.0));
}

TEST_CASE("eig_hermitian reconstruction on random 8x8") {
    Operator h = random_hermitian(8);
    EigResult r = eig_hermitian(h);
    Operator rec = r.vectors * r.values.asDiagonal() * r.vectors.adjoint();
    CHECK(maxabs(rec - h) < 1e-9 * std::max(1.0, maxabs(h)));
    CHECK(maxabs(r.vectors * r.vectors.adjoint() - Operator::Identity(8, 8)) < 1e-9);
}

TEST_CASE("eig_hermitian rejects non-Hermitian input") {
    Operator m = random_matrix(3, 3);
    m(0, 1) += 1.0;  // ensure asymmetry
    CHECK_THROWS_AS(eig_hermitian(m), std::invalid_argument);
}

TEST_CASE("von Neumann entropy: pure, flat and isotropic spectra") {
    Ket psi = Ket::Zero(4);
    psi(2) = 1.0;
    CHECK(von_neumann_entropy(DensityMatrix(projector(psi))) == doctest::Approx(0.0));

    for (int d : {2, 4, 8})
        CHECK(von_neumann_entropy(DensityMatrix(Operator::Identity(d, d) / double(d))) ==
              doctest::Approx(std::log2(double(d))));

    // isotropic v = 0.9 on dim 4: spectrum {v + (1-v)/4, (1-v)/4 x3}
    const double v = 0.9;
    Ket phi = Ket::Zero(4);
    phi(0) = phi(3) = 1.0 / std::sqrt(2.0);
    Operator rho = v * projector(phi) + (1.0 - v) / 4.0 * Operator::Identity(4, 4);
    const double lam1 = v + (1.0 - v) / 4.0, lam2 = (1.0 - v) / 4.0;
    const double expect = -(lam1 * std::log2(lam1) + 3.0 * lam2 * std::log2(lam2));
    CHECK(von_neumann_entropy(DensityMatrix(rho)) == doctest::Approx(expect).epsilon(1e-10));
}

TEST_CASE("entropy is invariant under unitary conjugation") {
    Operator rho = random_density(6);
    Operator u = random_unitary(6);
    double s1 = von_neumann_entropy(DensityMatrix(rho));
    double s2 = von_neumann_entropy(DensityMatrix((u * rho * u.adjoint()).eval()));
    CHECK(s1 == doctest::Approx(s2).epsilon(1e-9));
}

TEST_CASE("complex_to_real_embedding spectrum doubling") {
    Operator h(2, 2);
    h << 0.0, Complex(0, 1), Complex(0, -1), 0.0;
    RealMatrix e = complex_to_real_embedding(h);
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(e);
    CHECK(es.eigenvalues()(0) == doctest::Approx(-1.0));
    CHECK(es.eigenvalues()(1) == doctest::Approx(-1.0));
    CHECK(es.eigenvalues()(2) == doctest::Approx(1.0));
    CHECK(es.eigenvalues()(3) == doctest::Approx(1.0));

    for (int rep = 0; rep < 4; ++rep) {
        Operator hr = random_hermitian(5);
        EigResult r = eig_hermitian(hr);
        Eigen::SelfAdjointEigenSolver<RealMatrix> er(complex_to_real_embedding(hr));
        for (int i = 0; i < 5; ++i) {
            CHECK(er.eigenvalues()(2 * i) == doctest::Approx(r.values(i)).epsilon(1e-10));
            CHECK(er.eigenvalues()(2 * i + 1) == doctest::Approx(r.values(i)).epsilon(1e-10));
        }
    }
}

TEST_CASE("embedding preserves PSD status both ways") {
    Operator a = random_matrix(4, 4);
    Operator psd = a * a.adjoint();
    Eigen::SelfAdjointEigenSolver<RealMatrix> ep(complex_to_real_embedding(psd));
    CHECK(ep.eigenvalues().minCoeff() > -1e-10);

    Operator indef = random_hermitian(4);
    indef -= (eig_hermitian(indef).values(3) * 0.5) * Operator::Identity(4, 4);
    Eigen::SelfAdjointEigenSolver<RealMatrix> ei(complex_to_real_embedding(indef));
    CHECK(ei.eigenvalues().minCoeff() ==
          doctest::Approx(eig_hermitian(indef).values(0)).epsilon(1e-10));
}

TEST_CASE("embedding of a real symmetric matrix is block diagonal") {
    Operator h = random_hermitian(3);
    h = 0.5 * (h + h.conjugate()).eval();  // real symmetric
    RealMatrix e = complex_to_real_embedding(h);
    CHECK(e.topRightCorner(3, 3).cwiseAbs().maxCoeff() == 0.0);
    CHECK((e.topLeftCorner(3, 3) - e.bottomRightCorner(3, 3)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("DensityMatrix invariants enforced") {
    CHECK_THROWS_AS(DensityMatrix(Operator::Identity(2, 2)), std::invalid_argument);  // trace 2
    Operator bad = Operator::Zero(2, 2);
    bad(0, 0) = 1.5;
    bad(1, 1) = -0.5;
    CHECK_THROWS_AS(DensityMatrix(bad), std::invalid_argument);  // negative eigenvalue
    Operator nh = Operator::Zero(2, 2);
    nh(0, 0) = nh(1, 1) = 0.5;
    nh(0, 1) = Complex(0.1, 0.0);
    CHECK_THROWS_AS(DensityMatrix(nh), std::invalid_argument);  // not Hermitian
}
