#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <vector>

// Dense complex linear algebra and entropy primitives shared by all modules.
//
// Tensor-product index convention (fixed globally): the left factor is the
// slow (most significant) index, i.e. (A (x) B)(ia*rows_b + ib, ja*cols_b + jb)
// = A(ia,ja) * B(ib,jb).

namespace hdqkd {

using Complex = std::complex<double>;
using Ket = Eigen::VectorXcd;
using Operator = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

Operator tensor(const Operator& a, const Operator& b);
Ket tensor(const Ket& a, const Ket& b);

Operator projector(const Ket& psi);

/// Trace over the subsystems not listed in `keep`. `dims` are the subsystem
/// dimensions, slow index first; their product must equal the matrix size.
/// Kept subsystems stay in their original relative order.
Operator partial_trace(const Operator& m, const std::vector<int>& dims,
                       const std::vector<int>& keep);

struct EigResult {
    RealVector values;  // ascending
    Operator vectors;   // columns are eigenvectors
};

/// Eigendecomposition of a Hermitian matrix. Rejects inputs with
/// max |h - h†| > herm_tol.
EigResult eig_hermitian(const Operator& h, double herm_tol = 1e-10);

/// -sum_i lambda_i log2(lambda_i) with 0 log 0 := 0. Eigenvalues below
/// `cutoff` are treated as exact zeros.
double entropy_bits(const RealVector& eigenvalues, double cutoff = 1e-14);

/// [[Re h, -Im h], [Im h, Re h]]; PSD iff h is, every eigenvalue doubled.
RealMatrix complex_to_real_embedding(const Operator& h);

class DensityMatrix {
  public:
    static constexpr double kHermTol = 1e-12;
    static constexpr double kTraceTol = 1e-12;
    static constexpr double kPsdTol = -1e-10;

    explicit DensityMatrix(Operator entries);

    const Operator& entries() const { return entries_; }
    int dim() const { return static_cast<int>(entries_.rows()); }

  private:
    Operator entries_;
};

double von_neumann_entropy(const DensityMatrix& rho);

}  // namespace hdqkd
