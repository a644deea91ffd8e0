#include "hdqkd/linalg.hpp"

#include <cmath>

namespace hdqkd {

Operator tensor(const Operator& a, const Operator& b) {
    Operator out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

Ket tensor(const Ket& a, const Ket& b) {
    Ket out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i)
        out.segment(i * b.size(), b.size()) = a(i) * b;
    return out;
}

Operator projector(const Ket& psi) { return psi * psi.adjoint(); }

Operator partial_trace(const Operator& m, const std::vector<int>& dims,
                       const std::vector<int>& keep) {
    long total = 1;
    for (int d : dims) {
        if (d <= 0) throw std::invalid_argument("partial_trace: nonpositive subsystem dim");
        total *= d;
    }
    if (m.rows() != m.cols() || m.rows() != total)
        throw std::invalid_argument("partial_trace: dims do not match matrix size");

    const int n = static_cast<int>(dims.size());
    std::vector<bool> kept(n, false);
    for (int k : keep) {
        if (k < 0 || k >= n) throw std::invalid_argument("partial_trace: keep index out of range");
        kept[k] = true;
    }

    // strides, slow index first
    std::vector<long> stride(n, 1);
    for (int i = n - 2; i >= 0; --i) stride[i] = stride[i + 1] * dims[i + 1];

    long dim_keep = 1, dim_tr = 1;
    std::vector<int> keep_idx, tr_idx;
    for (int i = 0; i < n; ++i) {
        if (kept[i]) {
            keep_idx.push_back(i);
            dim_keep *= dims[i];
        } else {
            tr_idx.push_back(i);
            dim_tr *= dims[i];
        }
    }

    auto offset = [&](const std::vector<int>& idx, long flat) {
        long off = 0;
        for (int i = static_cast<int>(idx.size()) - 1; i >= 0; --i) {
            int d = dims[idx[i]];
            off += (flat % d) * stride[idx[i]];
            flat /= d;
        }
        return off;
    };

    Operator out = Operator::Zero(dim_keep, dim_keep);
    for (long r = 0; r < dim_keep; ++r) {
        long row_off = offset(keep_idx, r);
        for (long c = 0; c < dim_keep; ++c) {
            long col_off = offset(keep_idx, c);
            Complex sum = 0.0;
            for (long t = 0; t < dim_tr; ++t) {
                long tr_off = offset(tr_idx, t);
                sum += m(row_off + tr_off, col_off + tr_off);
            }
            out(r, c) = sum;
        }
    }
    return out;
}

EigResult eig_hermitian(const Operator& h, double herm_tol) {
    if (h.rows() != h.cols()) throw std::invalid_argument("eig_hermitian: not square");
    double dev = (h - h.adjoint()).cwiseAbs().maxCoeff();
    double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
    if (dev > herm_tol * scale)
        throw std::invalid_argument("eig_hermitian: input not Hermitian within tolerance");
    Eigen::SelfAdjointEigenSolver<Operator> es(0.5 * (h + h.adjoint()));
    if (es.info() != Eigen::Success)
        throw std::runtime_error("eig_hermitian: eigensolver failed");
    return {es.eigenvalues(), es.eigenvectors()};
}

double entropy_bits(const RealVector& eigenvalues, double cutoff) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
        double lam = eigenvalues(i);
        if (lam > cutoff) s -= lam * std::log2(lam);
    }
    return s;
}

RealMatrix complex_to_real_embedding(const Operator& h) {
    const Eigen::Index n = h.rows();
    if (h.cols() != n) throw std::invalid_argument("complex_to_real_embedding: not square");
    RealMatrix out(2 * n, 2 * n);
    out.topLeftCorner(n, n) = h.real();
    out.topRightCorner(n, n) = -h.imag();
    out.bottomLeftCorner(n, n) = h.imag();
    out.bottomRightCorner(n, n) = h.real();
    return out;
}

DensityMatrix::DensityMatrix(Operator entries) : entries_(std::move(entries)) {
    if (entries_.rows() != entries_.cols())
        throw std::invalid_argument("DensityMatrix: not square");
    if ((entries_ - entries_.adjoint()).cwiseAbs().maxCoeff() > kHermTol)
        throw std::invalid_argument("DensityMatrix: not Hermitian");
    if (std::abs(entries_.trace() - Complex(1.0)) > kTraceTol)
        throw std::invalid_argument("DensityMatrix: trace != 1");
    Eigen::SelfAdjointEigenSolver<Operator> es(entries_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < kPsdTol)
        throw std::invalid_argument("DensityMatrix: not positive semidefinite");
}

double von_neumann_entropy(const DensityMatrix& rho) {
    return entropy_bits(eig_hermitian(rho.entries(), 1e-10).values);
}

}  // namespace hdqkd
