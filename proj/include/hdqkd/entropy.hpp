#pragma once

#include "hdqkd/povm.hpp"
#include "hdqkd/quadrature.hpp"
#include "hdqkd/sdp.hpp"

#include <iosfwd>
#include <optional>

// Gauss-Radau relaxation of the conditional von Neumann entropy:
//
//   min  c_m + sum_{i,a} w_i/(t_i ln 2) [ Tr{P_a (zeta + zeta' + (1-t_i) eta)} + t_i Tr{theta} ]
//   s.t. Tr sigma = 1,  Tr(E_k sigma) = f_k,
//        [[sigma, zeta],[zeta', eta]] >= 0,  [[sigma, zeta'],[zeta, theta]] >= 0
//
// one (zeta, eta, theta) triple per key symbol a and quadrature node i,
// P_a = |a><a| (x) 1. The optimal value lower-bounds S(A|E) over all states
// compatible with the constraints.

namespace hdqkd {

struct SdpProblem {
    int dim = 0;        // d^2, size of sigma
    int outcomes = 0;   // d, Alice's key symbols
    Quadrature quadrature;
    std::vector<Constraint> constraints;
    std::vector<Operator> key_projectors;
};

/// d projectors |a><a| (x) 1_d on the temporal d^2 space.
std::vector<Operator> key_pinching_projectors(int d);

SdpProblem assemble_sdp(std::vector<Constraint> constraints, int d, Quadrature quadrature);

enum class SolveStatus { optimal, near_optimal, infeasible, numerical_failure };

const char* solve_status_name(SolveStatus s);

struct SolverOptions {
    double gap_tol = 1e-8;
    double feas_tol = 1e-8;
    int max_iters = 120;
    int threads = 1;
    bool verbose = false;
    bool force_embedding = false;  // use the complex embedding even for real data
};

struct SdpSolution {
    double objective_bits = 0.0;  // safe lower bound: solver objective minus |gap|
    SolveStatus status = SolveStatus::numerical_failure;
    double duality_gap = 0.0;
    std::optional<DensityMatrix> sigma_star;
    int iterations = 0;
    std::string message;
};

/// Compile the program to the canonical conic form and run the backend.
/// Real constraint data is assembled as real symmetric blocks of size 2*dim;
/// complex data goes through the Hermitian-to-real embedding (size 4*dim).
SdpSolution solve_entropy_bound(const SdpProblem& problem, const SolverOptions& opts = {});

/// Conic form handed to the backend; exposed for the export interface and
/// for plugging third-party solvers.
ConicLmiProblem compile_entropy_sdp(const SdpProblem& problem, bool force_embedding = false);

/// S(A|E) evaluated at a specific state: purify rho_AB, pinch Alice's
/// register, return S(rho_AE~) - S(rho_E) in bits.
double direct_entropy_oracle(const DensityMatrix& rho_ab, int d);

/// Self-describing canonical problem export (JSON); see README for the field
/// documentation.
void export_sdp(const SdpProblem& problem, std::ostream& out);

}  // namespace hdqkd
