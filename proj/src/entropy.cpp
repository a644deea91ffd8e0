#include "hdqkd/entropy.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <ostream>

namespace hdqkd {

const char* solve_status_name(SolveStatus s) {
    switch (s) {
        case SolveStatus::optimal: return "optimal";
        case SolveStatus::near_optimal: return "near_optimal";
        case SolveStatus::infeasible: return "infeasible";
        case SolveStatus::numerical_failure: return "numerical_failure";
    }
    return "?";
}

std::vector<Operator> key_pinching_projectors(int d) {
    if (d < 2) throw std::invalid_argument("key_pinching_projectors: d < 2");
    std::vector<Operator> out;
    out.reserve(d);
    for (int a = 0; a < d; ++a) {
        Operator p = Operator::Zero(d * d, d * d);
        for (int k = 0; k < d; ++k) p(a * d + k, a * d + k) = 1.0;
        out.push_back(std::move(p));
    }
    return out;
}

SdpProblem assemble_sdp(std::vector<Constraint> constraints, int d, Quadrature quadrature) {
    if (d < 2) throw std::invalid_argument("assemble_sdp: d < 2");
    if (quadrature.m < 1 || quadrature.nodes.size() != size_t(quadrature.m))
        throw std::invalid_argument("assemble_sdp: bad quadrature");
    const int n = d * d;
    for (const auto& c : constraints) {
        if (c.op.rows() != n || c.op.cols() != n)
            throw std::invalid_argument("assemble_sdp: constraint dimension mismatch");
        if ((c.op - c.op.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
            throw std::invalid_argument("assemble_sdp: constraint operator not Hermitian");
        if (c.value < -1e-10 || c.value > 1.0 + 1e-10)
            throw std::invalid_argument("assemble_sdp: constraint value outside [0,1]");
    }
    SdpProblem p;
    p.dim = n;
    p.outcomes = d;
    p.quadrature = std::move(quadrature);
    p.constraints = std::move(constraints);
    p.key_projectors = key_pinching_projectors(d);
    return p;
}

namespace {

constexpr double kRealTol = 1e-13;

bool all_real(const SdpProblem& p) {
    for (const auto& c : p.constraints)
        if (c.op.imag().cwiseAbs().maxCoeff() > kRealTol) return false;
    return true;
}

int sym_index(int p, int q, int n) {  // packed upper triangle, p <= q
    return p * n - p * (p - 1) / 2 + (q - p);
}

// Real path: sigma_pq (p<=q), then per (a,i) zeta (n x n), eta and theta
// (symmetric n x n); two PSD blocks of size 2n per (a,i).
ConicLmiProblem compile_real(const SdpProblem& prob) {
    constexpr bool reduced = false;
    const int n = prob.dim;
    const int d = prob.outcomes;
    const int m = prob.quadrature.m;
    const int nsym = n * (n + 1) / 2;
    const int zeta_cols = reduced ? d : n;
    const int eta_dim = reduced ? d : n;
    const int eta_sym = eta_dim * (eta_dim + 1) / 2;
    const int per_ai = n * zeta_cols + eta_sym + nsym;

    ConicLmiProblem cp;
    cp.groups.push_back({0, nsym});
    int cursor = nsym;
    for (int ai = 0; ai < d * m; ++ai) {
        cp.groups.push_back({cursor, per_ai});
        cursor += per_ai;
    }
    cp.n_vars = cursor;
    cp.c = Eigen::VectorXd::Zero(cp.n_vars);

    const double ln2 = std::log(2.0);
    double cm = 0.0;
    for (int i = 0; i < m; ++i) cm += prob.quadrature.weights[i] / (prob.quadrature.nodes[i] * ln2);
    cp.c0 = cm;

    for (int a = 0; a < d; ++a)
        for (int i = 0; i < m; ++i) {
            const int g = 1 + a * m + i;
            const int base = cp.groups[g].start;
            const int zeta0 = base;
            const int eta0 = base + n * zeta_cols;
            const int theta0 = eta0 + eta_sym;
            const double t = prob.quadrature.nodes[i];
            const double coef = prob.quadrature.weights[i] / (t * ln2);
            const int ka = a * d;  // zeta column c corresponds to sigma column ka + c when reduced

            LmiBlock b1, b2;
            b1.n = n + eta_dim;
            b2.n = 2 * n;
            b1.group = b2.group = g;
            for (int p = 0; p < n; ++p)
                for (int q = p; q < n; ++q) {
                    const int sv = sym_index(p, q, n);
                    b1.coeffs.push_back({sv, {{p, q, 1.0}}});
                    b2.coeffs.push_back({sv, {{p, q, 1.0}}});
                    b2.coeffs.push_back({theta0 + sym_index(p, q, n), {{n + p, n + q, 1.0}}});
                }
            for (int p = 0; p < eta_dim; ++p)
                for (int q = p; q < eta_dim; ++q)
                    b1.coeffs.push_back({eta0 + sym_index(p, q, eta_dim), {{n + p, n + q, 1.0}}});
            for (int p = 0; p < n; ++p)
                for (int c = 0; c < zeta_cols; ++c) {
                    const int zv = zeta0 + p * zeta_cols + c;
                    const int q = reduced ? ka + c : c;  // column in sigma space
                    b1.coeffs.push_back({zv, {{p, n + c, 1.0}}});   // Gamma1 top-right = zeta
                    b2.coeffs.push_back({zv, {{q, n + p, 1.0}}});   // Gamma2 top-right = zeta'
                }
            cp.blocks.push_back(std::move(b1));
            cp.blocks.push_back(std::move(b2));

            for (int k = 0; k < d; ++k) {
                const int col = reduced ? k : ka + k;
                cp.c(zeta0 + (ka + k) * zeta_cols + col) += 2.0 * coef;      // zeta + zeta'
                const int ek = reduced ? k : ka + k;
                cp.c(eta0 + sym_index(ek, ek, eta_dim)) += (1.0 - t) * coef;
            }
            for (int p = 0; p < n; ++p) cp.c(theta0 + sym_index(p, p, n)) += t * coef;
        }

    const int neq = 1 + static_cast<int>(prob.constraints.size());
    cp.eq = Eigen::MatrixXd::Zero(neq, nsym);
    cp.eq_rhs = Eigen::VectorXd::Zero(neq);
    for (int p = 0; p < n; ++p) cp.eq(0, sym_index(p, p, n)) = 1.0;  // Tr sigma = 1
    cp.eq_rhs(0) = 1.0;
    for (size_t k = 0; k < prob.constraints.size(); ++k) {
        const auto& e = prob.constraints[k].op;
        for (int p = 0; p < n; ++p) {
            cp.eq(1 + k, sym_index(p, p, n)) = e(p, p).real();
            for (int q = p + 1; q < n; ++q)
                cp.eq(1 + k, sym_index(p, q, n)) = 2.0 * e(p, q).real();
        }
        cp.eq_rhs(1 + k) = prob.constraints[k].value;
    }
    return cp;
}

// Embedding path helpers: a variable contributing z to the Hermitian slot
// (r,c) of a complex block of size nn (with conj(z) implied at (c,r)) turns
// into symmetrized units of the 2*nn real embedding.
void add_embedded(std::vector<SymUnit>& units, int r, int c, Complex z, int nn) {
    const double re = z.real(), im = z.imag();
    if (r == c) {
        units.push_back({r, r, re});
        units.push_back({nn + r, nn + r, re});
        return;  // diagonal slots of Hermitian matrices are real
    }
    if (re != 0.0) {
        units.push_back({r, c, re});
        units.push_back({nn + r, nn + c, re});
    }
    if (im != 0.0) {
        units.push_back({r, nn + c, -im});
        units.push_back({c, nn + r, im});
    }
}

// Embedded path, same layout as compile_real with Re/Im splits; Hermitian
// blocks realized through the real embedding (sizes 2x).
ConicLmiProblem compile_embedded(const SdpProblem& prob) {
    constexpr bool reduced = false;
    const int n = prob.dim;
    const int d = prob.outcomes;
    const int m = prob.quadrature.m;
    const int nsym = n * (n + 1) / 2;
    const int nherm = n * n;
    const int zeta_cols = reduced ? d : n;
    const int eta_dim = reduced ? d : n;
    const int eta_herm = eta_dim * eta_dim;
    const int per_ai = 2 * n * zeta_cols + eta_herm + nherm;

    ConicLmiProblem cp;
    cp.groups.push_back({0, nherm});
    int cursor = nherm;
    for (int ai = 0; ai < d * m; ++ai) {
        cp.groups.push_back({cursor, per_ai});
        cursor += per_ai;
    }
    cp.n_vars = cursor;
    cp.c = Eigen::VectorXd::Zero(cp.n_vars);

    const double ln2 = std::log(2.0);
    double cm = 0.0;
    for (int i = 0; i < m; ++i) cm += prob.quadrature.weights[i] / (prob.quadrature.nodes[i] * ln2);
    cp.c0 = cm;

    auto herm_re = [&](int p, int q, int nd) { return sym_index(p, q, nd); };
    auto herm_im = [&](int p, int q, int nd) {  // strictly upper, p < q
        return nd * (nd + 1) / 2 + p * nd - p * (p + 1) / 2 + (q - p - 1);
    };

    for (int a = 0; a < d; ++a)
        for (int i = 0; i < m; ++i) {
            const int g = 1 + a * m + i;
            const int base = cp.groups[g].start;
            const int zre0 = base, zim0 = base + n * zeta_cols;
            const int eta0 = base + 2 * n * zeta_cols, theta0 = eta0 + eta_herm;
            const double t = prob.quadrature.nodes[i];
            const double coef = prob.quadrature.weights[i] / (t * ln2);
            const int ka = a * d;

            LmiBlock b1, b2;
            const int nn1 = n + eta_dim;  // complex size of Gamma1
            const int nn2 = 2 * n;        // complex size of Gamma2
            b1.n = 2 * nn1;
            b2.n = 2 * nn2;
            b1.group = b2.group = g;

            auto add_var = [&](LmiBlock& blk, int var, int r, int c, Complex w, int nn) {
                BlockVarCoeff vc{var, {}};
                add_embedded(vc.units, r, c, w, nn);
                blk.coeffs.push_back(std::move(vc));
            };

            for (int p = 0; p < n; ++p)
                for (int q = p; q < n; ++q) {
                    add_var(b1, herm_re(p, q, n), p, q, 1.0, nn1);
                    add_var(b2, herm_re(p, q, n), p, q, 1.0, nn2);
                    add_var(b2, theta0 + herm_re(p, q, n), n + p, n + q, 1.0, nn2);
                    if (p < q) {
                        add_var(b1, herm_im(p, q, n), p, q, Complex(0, 1), nn1);
                        add_var(b2, herm_im(p, q, n), p, q, Complex(0, 1), nn2);
                        add_var(b2, theta0 + herm_im(p, q, n), n + p, n + q, Complex(0, 1), nn2);
                    }
                }
            for (int p = 0; p < eta_dim; ++p)
                for (int q = p; q < eta_dim; ++q) {
                    add_var(b1, eta0 + herm_re(p, q, eta_dim), n + p, n + q, 1.0, nn1);
                    if (p < q)
                        add_var(b1, eta0 + herm_im(p, q, eta_dim), n + p, n + q, Complex(0, 1), nn1);
                }
            for (int p = 0; p < n; ++p)
                for (int c = 0; c < zeta_cols; ++c) {
                    const int vre = zre0 + p * zeta_cols + c, vim = zim0 + p * zeta_cols + c;
                    const int q = reduced ? ka + c : c;  // column in sigma space
                    add_var(b1, vre, p, n + c, 1.0, nn1);       // Gamma1 top-right = zeta
                    add_var(b1, vim, p, n + c, Complex(0, 1), nn1);
                    add_var(b2, vre, q, n + p, 1.0, nn2);       // Gamma2 top-right = zeta'
                    add_var(b2, vim, q, n + p, Complex(0, -1), nn2);
                }
            cp.blocks.push_back(std::move(b1));
            cp.blocks.push_back(std::move(b2));

            for (int k = 0; k < d; ++k) {
                const int col = reduced ? k : ka + k;
                cp.c(zre0 + (ka + k) * zeta_cols + col) += 2.0 * coef;
                const int ek = reduced ? k : ka + k;
                cp.c(eta0 + herm_re(ek, ek, eta_dim)) += (1.0 - t) * coef;
            }
            for (int p = 0; p < n; ++p) cp.c(theta0 + herm_re(p, p, n)) += t * coef;
        }

    const int neq = 1 + static_cast<int>(prob.constraints.size());
    cp.eq = Eigen::MatrixXd::Zero(neq, nherm);
    cp.eq_rhs = Eigen::VectorXd::Zero(neq);
    for (int p = 0; p < n; ++p) cp.eq(0, herm_re(p, p, n)) = 1.0;
    cp.eq_rhs(0) = 1.0;
    for (size_t k = 0; k < prob.constraints.size(); ++k) {
        const auto& e = prob.constraints[k].op;
        for (int p = 0; p < n; ++p) {
            cp.eq(1 + k, herm_re(p, p, n)) = e(p, p).real();
            for (int q = p + 1; q < n; ++q) {
                cp.eq(1 + k, herm_re(p, q, n)) = 2.0 * e(p, q).real();
                cp.eq(1 + k, herm_im(p, q, n)) = 2.0 * e(p, q).imag();
            }
        }
        cp.eq_rhs(1 + k) = prob.constraints[k].value;
    }
    return cp;
}

DensityMatrix sigma_from_solution(const SdpProblem& prob, const Eigen::VectorXd& x, bool real_path) {
    const int n = prob.dim;
    Operator sigma = Operator::Zero(n, n);
    int idx = 0;
    for (int p = 0; p < n; ++p)
        for (int q = p; q < n; ++q) {
            sigma(p, q) = x(idx);
            sigma(q, p) = x(idx);
            ++idx;
        }
    if (!real_path) {
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) {
                sigma(p, q) += Complex(0, x(idx));
                sigma(q, p) -= Complex(0, x(idx));
                ++idx;
            }
    }
    // clean up solver dust so the value-type invariants hold
    Eigen::SelfAdjointEigenSolver<Operator> es(sigma);
    Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0);
    sigma = es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().adjoint();
    sigma /= sigma.trace().real();
    sigma = 0.5 * (sigma + sigma.adjoint()).eval();
    return DensityMatrix(sigma);
}

}  // namespace

ConicLmiProblem compile_entropy_sdp(const SdpProblem& problem, bool force_embedding) {
    if (!force_embedding && all_real(problem)) return compile_real(problem);
    return compile_embedded(problem);
}

SdpSolution solve_entropy_bound(const SdpProblem& problem, const SolverOptions& opts) {
    const bool real_path = !opts.force_embedding && all_real(problem);
    ConicLmiProblem cp = real_path ? compile_real(problem) : compile_embedded(problem);

    ConicOptions copts;
    copts.gap_tol = opts.gap_tol;
    copts.feas_tol = opts.feas_tol;
    copts.max_iters = opts.max_iters;
    copts.threads = opts.threads;
    copts.verbose = opts.verbose;
    ConicResult r = solve_conic(cp, copts);

    SdpSolution sol;
    sol.iterations = r.iterations;
    sol.message = r.message;
    sol.duality_gap = std::abs(r.gap) + r.stat_slack;
    switch (r.status) {
        case ConicStatus::optimal: sol.status = SolveStatus::optimal; break;
        case ConicStatus::near_optimal: sol.status = SolveStatus::near_optimal; break;
        case ConicStatus::infeasible: sol.status = SolveStatus::infeasible; break;
        case ConicStatus::numerical_failure: sol.status = SolveStatus::numerical_failure; break;
    }
    if (sol.status == SolveStatus::optimal || sol.status == SolveStatus::near_optimal) {
        sol.objective_bits = r.primal_objective - sol.duality_gap;
        try {
            sol.sigma_star = sigma_from_solution(problem, r.x, real_path);
        } catch (const std::exception&) {
            sol.sigma_star.reset();  // diagnostic only
        }
    }
    return sol;
}

double direct_entropy_oracle(const DensityMatrix& rho_ab, int d) {
    const int n = d * d;
    if (rho_ab.dim() != n) throw std::invalid_argument("direct_entropy_oracle: dim mismatch");
    EigResult eig = eig_hermitian(rho_ab.entries());

    std::vector<int> kept;
    for (int k = 0; k < n; ++k)
        if (eig.values(k) > 1e-14) kept.push_back(k);
    const int r = static_cast<int>(kept.size());

    // |psi> = sum_k sqrt(lam_k) |e_k>_AB |k>_E; rho_E^a = Tr_AB[(P_a x 1)|psi><psi|]
    // has entries sum_{s in K_a} <s|e_k> conj(<s|e_l>) sqrt(lam_k lam_l).
    Eigen::VectorXd all_eigs(d * r);
    Operator rho_e = Operator::Zero(r, r);
    int pos = 0;
    for (int a = 0; a < d; ++a) {
        Operator block = Operator::Zero(r, r);
        for (int k = 0; k < r; ++k)
            for (int l = 0; l < r; ++l) {
                Complex s = 0.0;
                for (int t = a * d; t < (a + 1) * d; ++t)
                    s += eig.vectors(t, kept[k]) * std::conj(eig.vectors(t, kept[l]));
                block(k, l) = std::sqrt(eig.values(kept[k]) * eig.values(kept[l])) * s;
            }
        rho_e += block;
        Eigen::SelfAdjointEigenSolver<Operator> es(block, Eigen::EigenvaluesOnly);
        all_eigs.segment(pos, r) = es.eigenvalues();
        pos += r;
    }
    const double s_ae = entropy_bits(all_eigs);
    Eigen::SelfAdjointEigenSolver<Operator> es(rho_e, Eigen::EigenvaluesOnly);
    const double s_e = entropy_bits(es.eigenvalues());
    return s_ae - s_e;
}

void export_sdp(const SdpProblem& problem, std::ostream& out) {
    nlohmann::json j;
    j["format"] = "hdqkd-sdp";
    j["version"] = 1;
    j["dim"] = problem.dim;
    j["outcomes"] = problem.outcomes;
    j["quadrature"] = {{"m", problem.quadrature.m},
                       {"nodes", problem.quadrature.nodes},
                       {"weights", problem.quadrature.weights}};
    const double ln2 = std::log(2.0);
    double cm = 0.0;
    for (int i = 0; i < problem.quadrature.m; ++i)
        cm += problem.quadrature.weights[i] / (problem.quadrature.nodes[i] * ln2);
    j["objective_constant_bits"] = cm;

    auto coords = [](const Operator& op) {
        nlohmann::json entries = nlohmann::json::array();
        for (int r = 0; r < op.rows(); ++r)
            for (int c = 0; c < op.cols(); ++c)
                if (std::abs(op(r, c)) > 0.0)
                    entries.push_back({r, c, op(r, c).real(), op(r, c).imag()});
        return entries;
    };

    j["constraints"] = nlohmann::json::array();
    for (const auto& c : problem.constraints)
        j["constraints"].push_back({{"value", c.value}, {"entries", coords(c.op)}});
    j["key_projectors"] = nlohmann::json::array();
    for (const auto& p : problem.key_projectors) j["key_projectors"].push_back(coords(p));

    nlohmann::json blocks = nlohmann::json::array();
    for (int a = 0; a < problem.outcomes; ++a)
        for (int i = 0; i < problem.quadrature.m; ++i) {
            blocks.push_back({{"a", a}, {"node", i}, {"name", "gamma1"}, {"size", 2 * problem.dim}});
            blocks.push_back({{"a", a}, {"node", i}, {"name", "gamma2"}, {"size", 2 * problem.dim}});
        }
    j["psd_blocks"] = std::move(blocks);
    out << j.dump(2) << "\n";
}

}  // namespace hdqkd
