#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

// Canonical conic form and the interior-point backend.
//
//   minimize    c'x + c0
//   subject to  G x = h                          (equalities, dense rows)
//               sum_k x_k F_k  >= 0              (block-diagonal LMI)
//
// Every F_k is sparse symmetric (a handful of symmetrized units per block).
// Variables are partitioned into groups: group 0 may appear in every block,
// every other group only in blocks owned by it. The Schur complement is
// eliminated group-by-group (arrow structure), which is what keeps the
// entropy programs tractable. Equality rows may touch group-0 variables only.

namespace hdqkd {

struct SymUnit {
    int row, col;   // row <= col; off-diagonal units are implicitly symmetrized
    double value;
};

struct BlockVarCoeff {
    int var;                    // global variable index
    std::vector<SymUnit> units;
};

struct LmiBlock {
    int n = 0;                  // block size
    int group = 0;              // owning local group (0 = shared only)
    std::vector<BlockVarCoeff> coeffs;
};

struct VarGroup {
    int start = 0;
    int size = 0;
};

struct ConicLmiProblem {
    int n_vars = 0;
    Eigen::VectorXd c;
    double c0 = 0.0;
    std::vector<VarGroup> groups;      // group 0 first; contiguous, covering all vars
    std::vector<LmiBlock> blocks;
    Eigen::MatrixXd eq;                // n_eq x size(group 0)
    Eigen::VectorXd eq_rhs;

    void validate() const;
};

enum class ConicStatus { optimal, near_optimal, infeasible, numerical_failure };

const char* conic_status_name(ConicStatus s);

struct ConicOptions {
    double gap_tol = 1e-8;       // relative duality gap
    double feas_tol = 1e-8;      // scaled residual norms
    int max_iters = 120;
    int threads = 1;
    bool verbose = false;
};

struct ConicResult {
    ConicStatus status = ConicStatus::numerical_failure;
    Eigen::VectorXd x;
    double primal_objective = 0.0;   // c'x + c0
    double dual_objective = 0.0;     // h'lambda + c0 (lower bound at feasibility)
    double gap = 0.0;                // primal - dual
    double stat_slack = 0.0;         // measured |x'r| + |lambda'r_eq| at the
                                     // reported iterate; the dual value is
                                     // only trustworthy up to this amount
    int iterations = 0;
    std::string message;
};

/// Primal-dual HKM interior-point method with Mehrotra predictor-corrector.
ConicResult solve_conic(const ConicLmiProblem& prob, const ConicOptions& opts = {});

}  // namespace hdqkd
