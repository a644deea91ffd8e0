#include "hdqkd/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace hdqkd {

using Eigen::MatrixXd;
using Eigen::VectorXd;

const char* conic_status_name(ConicStatus s) {
    switch (s) {
        case ConicStatus::optimal: return "optimal";
        case ConicStatus::near_optimal: return "near_optimal";
        case ConicStatus::infeasible: return "infeasible";
        case ConicStatus::numerical_failure: return "numerical_failure";
    }
    return "?";
}

void ConicLmiProblem::validate() const {
    if (n_vars <= 0) throw std::invalid_argument("ConicLmiProblem: no variables");
    if (c.size() != n_vars) throw std::invalid_argument("ConicLmiProblem: c size mismatch");
    if (groups.empty()) throw std::invalid_argument("ConicLmiProblem: no variable groups");
    int cursor = 0;
    for (const auto& g : groups) {
        if (g.start != cursor || g.size < 0)
            throw std::invalid_argument("ConicLmiProblem: groups must be contiguous");
        cursor += g.size;
    }
    if (cursor != n_vars)
        throw std::invalid_argument("ConicLmiProblem: groups do not cover variables");
    for (const auto& b : blocks) {
        if (b.n <= 0) throw std::invalid_argument("ConicLmiProblem: empty block");
        if (b.group < 0 || b.group >= static_cast<int>(groups.size()))
            throw std::invalid_argument("ConicLmiProblem: bad block group");
        for (const auto& vc : b.coeffs) {
            if (vc.var < 0 || vc.var >= n_vars)
                throw std::invalid_argument("ConicLmiProblem: coefficient var out of range");
            const auto& g0 = groups[0];
            const auto& gb = groups[b.group];
            bool in0 = vc.var < g0.start + g0.size;
            bool inb = vc.var >= gb.start && vc.var < gb.start + gb.size;
            if (!in0 && !inb)
                throw std::invalid_argument("ConicLmiProblem: var outside block's groups");
            for (const auto& u : vc.units)
                if (u.row < 0 || u.col < u.row || u.col >= b.n)
                    throw std::invalid_argument("ConicLmiProblem: bad unit position");
        }
    }
    if (eq.rows() != eq_rhs.size())
        throw std::invalid_argument("ConicLmiProblem: eq rhs size mismatch");
    if (eq.rows() > 0 && eq.cols() != groups[0].size)
        throw std::invalid_argument("ConicLmiProblem: equalities must touch group 0 only");
}

namespace {

// Tr(U1 X U2 Sinv) for symmetrized units U(r,c) (both off-diagonal entries
// when r != c).
inline double pair_term(const MatrixXd& X, const MatrixXd& Sinv, const SymUnit& u1,
                        const SymUnit& u2) {
    const int a = u1.row, b = u1.col, c = u2.row, d = u2.col;
    double t;
    if (a == b) {
        if (c == d)
            t = X(a, c) * Sinv(c, a);
        else
            t = X(a, c) * Sinv(d, a) + X(a, d) * Sinv(c, a);
    } else {
        if (c == d)
            t = X(b, c) * Sinv(c, a) + X(a, c) * Sinv(c, b);
        else
            t = X(b, c) * Sinv(d, a) + X(b, d) * Sinv(c, a) + X(a, c) * Sinv(d, b) +
                X(a, d) * Sinv(c, b);
    }
    return u1.value * u2.value * t;
}

inline double trace_units(const std::vector<SymUnit>& units, const MatrixXd& y) {
    // Tr(F Y) where F = sum of symmetrized units; Y need not be symmetric.
    double t = 0.0;
    for (const auto& u : units)
        t += u.row == u.col ? u.value * y(u.row, u.row)
                            : u.value * (y(u.row, u.col) + y(u.col, u.row));
    return t;
}

struct BlockWork {
    MatrixXd S, X, Sinv, W, Rd, dS, dX, dSaff, dXaff;
    Eigen::LLT<MatrixXd> sllt, xllt;

    // Nesterov-Todd scaling point: W S W = X
    bool compute_scaling() {
        sllt.compute(S);
        xllt.compute(X);
        if (sllt.info() != Eigen::Success || xllt.info() != Eigen::Success) return false;
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(S);
        if (es.info() != Eigen::Success) return false;
        const auto& u = es.eigenvectors();
        Eigen::VectorXd ev = es.eigenvalues().cwiseMax(1e-300);
        Eigen::VectorXd rt = ev.cwiseSqrt();
        MatrixXd shalf = u * rt.asDiagonal() * u.transpose();
        MatrixXd sinvhalf = u * rt.cwiseInverse().asDiagonal() * u.transpose();
        Sinv = u * ev.cwiseInverse().asDiagonal() * u.transpose();
        MatrixXd b = shalf * X * shalf;
        Eigen::SelfAdjointEigenSolver<MatrixXd> eb(0.5 * (b + b.transpose()));
        if (eb.info() != Eigen::Success) return false;
        MatrixXd bhalf = eb.eigenvectors() *
                         eb.eigenvalues().cwiseMax(1e-300).cwiseSqrt().asDiagonal() *
                         eb.eigenvectors().transpose();
        W = sinvhalf * bhalf * sinvhalf;
        W = 0.5 * (W + W.transpose()).eval();
        return true;
    }
};

class Ipm {
  public:
    Ipm(const ConicLmiProblem& p, const ConicOptions& o) : prob_(p), opts_(o) {
        n_ = p.n_vars;
        n0_ = p.groups[0].size;
        n_groups_ = static_cast<int>(p.groups.size());
        blocks_of_group_.resize(n_groups_);
        for (int bi = 0; bi < static_cast<int>(p.blocks.size()); ++bi)
            blocks_of_group_[p.blocks[bi].group].push_back(bi);
        for (int bi : blocks_of_group_[0])
            (void)bi;  // group-0-only blocks handled with the shared pass below
        work_.resize(p.blocks.size());
        for (size_t bi = 0; bi < p.blocks.size(); ++bi) {
            const int bn = p.blocks[bi].n;
            auto& w = work_[bi];
            w.S = MatrixXd::Identity(bn, bn);
            w.X = MatrixXd::Identity(bn, bn);
        }
        x_ = VectorXd::Zero(n_);
        reduce_equalities();
    }

    ConicResult run();

  private:
    void reduce_equalities();
    void eval_lmi();
    double max_step(const Eigen::LLT<MatrixXd>& llt, const MatrixXd& delta) const;
    void assemble_schur();
    void factor_schur();
    void apply_schur(const VectorXd& v, VectorXd& out) const;
    void solve_kkt_once(const VectorXd& rhs, const VectorXd& req, VectorXd& dx,
                        VectorXd& dlam) const;
    void solve_kkt(const VectorXd& rhs, const VectorXd& req, VectorXd& dx, VectorXd& dlam) const;
    void scatter_ds(const VectorXd& dx, bool affine);

    const ConicLmiProblem& prob_;
    ConicOptions opts_;
    int n_ = 0, n0_ = 0, n_groups_ = 0;
    std::vector<std::vector<int>> blocks_of_group_;
    std::vector<BlockWork> work_;

    VectorXd x_, lam_;
    MatrixXd geq_;    // row-reduced equalities
    VectorXd heq_;
    bool eq_inconsistent_ = false;

    // per-iteration Schur data
    MatrixXd m00_, mtilde_;
    std::vector<MatrixXd> mll_, m0l_;   // per group (index 0 unused)
    std::vector<Eigen::LLT<MatrixXd>> mll_llt_;
    std::vector<MatrixXd> kl_;          // Mll^{-1} Ml0
    Eigen::LLT<MatrixXd> mtilde_llt_, hmat_llt_;
    MatrixXd wmat_;                     // Mtilde^{-1} G'
    VectorXd gvec_, hxvec_, qvec_, trfx_;
};

void Ipm::reduce_equalities() {
    const auto& G = prob_.eq;
    const auto& h = prob_.eq_rhs;
    if (G.rows() == 0) {
        geq_.resize(0, n0_);
        heq_.resize(0);
        lam_.resize(0);
        return;
    }
    Eigen::JacobiSVD<MatrixXd> svd(G, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double tol = 1e-12 * std::max(1.0, svd.singularValues()(0));
    int rank = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) > tol) ++rank;
    geq_.resize(rank, n0_);
    heq_.resize(rank);
    for (int i = 0; i < rank; ++i) {
        geq_.row(i) = svd.singularValues()(i) * svd.matrixV().col(i).transpose();
        heq_(i) = svd.matrixU().col(i).dot(h);
    }
    // rows outside the range of G must be consistent with h
    VectorXd hproj = VectorXd::Zero(h.size());
    for (int i = 0; i < rank; ++i) hproj += svd.matrixU().col(i) * heq_(i);
    eq_inconsistent_ = (h - hproj).lpNorm<Eigen::Infinity>() > 1e-9 * (1.0 + h.lpNorm<Eigen::Infinity>());
    lam_ = VectorXd::Zero(rank);
    if (!eq_inconsistent_ && rank > 0) {
        // start from the minimum-norm equality-feasible point
        for (int i = 0; i < rank; ++i)
            x_.head(n0_) += svd.matrixV().col(i) * (heq_(i) / svd.singularValues()(i));
    }
}

void Ipm::eval_lmi() {
    for (size_t bi = 0; bi < prob_.blocks.size(); ++bi) {
        const auto& b = prob_.blocks[bi];
        auto& w = work_[bi];
        w.Rd = -w.S;
        for (const auto& vc : b.coeffs) {
            const double xv = x_(vc.var);
            if (xv == 0.0) continue;
            for (const auto& u : vc.units) {
                w.Rd(u.row, u.col) += u.value * xv;
                if (u.row != u.col) w.Rd(u.col, u.row) += u.value * xv;
            }
        }
    }
}

double Ipm::max_step(const Eigen::LLT<MatrixXd>& llt, const MatrixXd& delta) const {
    MatrixXd b = llt.matrixL().solve(delta);
    b = llt.matrixL().solve(b.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (b + b.transpose()),
                                               Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues().minCoeff();
    if (lmin >= -1e-14) return std::numeric_limits<double>::infinity();
    return -1.0 / lmin;
}

void Ipm::assemble_schur() {
    m00_.setZero(n0_, n0_);
    gvec_.setZero(n_);
    hxvec_.setZero(n_);
    trfx_.setZero(n_);
    for (int g = 1; g < n_groups_; ++g) {
        const auto& grp = prob_.groups[g];
        mll_[g].setZero(grp.size, grp.size);
        m0l_[g].setZero(n0_, grp.size);
    }

    auto process_block = [&](int bi, MatrixXd& m00_acc, VectorXd& g_acc, VectorXd& hx_acc,
                             VectorXd& trfx_acc) {
        const auto& b = prob_.blocks[bi];
        auto& w = work_[bi];
        const int grp = b.group;
        const int lstart = prob_.groups[grp].start;
        MatrixXd y = w.W * w.Rd * w.W;
        for (size_t p = 0; p < b.coeffs.size(); ++p) {
            const auto& cp = b.coeffs[p];
            g_acc(cp.var) += trace_units(cp.units, w.Sinv);
            hx_acc(cp.var) += trace_units(cp.units, y);
            trfx_acc(cp.var) += trace_units(cp.units, w.X);
            for (size_t q = p; q < b.coeffs.size(); ++q) {
                const auto& cq = b.coeffs[q];
                double m = 0.0;
                for (const auto& u1 : cp.units)
                    for (const auto& u2 : cq.units) m += pair_term(w.W, w.W, u1, u2);
                const bool p0 = cp.var < n0_, q0 = cq.var < n0_;
                if (p0 && q0) {
                    m00_acc(cp.var, cq.var) += m;
                    if (cp.var != cq.var) m00_acc(cq.var, cp.var) += m;
                } else if (!p0 && !q0) {
                    const int pl = cp.var - lstart, ql = cq.var - lstart;
                    mll_[grp](pl, ql) += m;
                    if (pl != ql) mll_[grp](ql, pl) += m;
                } else if (p0) {
                    m0l_[grp](cp.var, cq.var - lstart) += m;
                } else {
                    m0l_[grp](cq.var, cp.var - lstart) += m;
                }
            }
        }
    };

    const int threads = std::max(1, opts_.threads);
    if (threads == 1 || n_groups_ <= 2) {
        for (size_t bi = 0; bi < prob_.blocks.size(); ++bi)
            process_block(static_cast<int>(bi), m00_, gvec_, hxvec_, trfx_);
    } else {
        // groups are independent accumulation targets except for the shared
        // group-0 pieces, which each task accumulates privately
        std::vector<MatrixXd> m00_t(threads, MatrixXd::Zero(n0_, n0_));
        std::vector<VectorXd> g_t(threads, VectorXd::Zero(n_)),
            hx_t(threads, VectorXd::Zero(n_)), fx_t(threads, VectorXd::Zero(n_));
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t)
            pool.emplace_back([&, t] {
                for (int g = 1 + t; g < n_groups_; g += threads)
                    for (int bi : blocks_of_group_[g])
                        process_block(bi, m00_t[t], g_t[t], hx_t[t], fx_t[t]);
            });
        for (auto& th : pool) th.join();
        for (int bi : blocks_of_group_[0]) process_block(bi, m00_, gvec_, hxvec_, trfx_);
        for (int t = 0; t < threads; ++t) {
            m00_ += m00_t[t];
            gvec_ += g_t[t];
            hxvec_ += hx_t[t];
            trfx_ += fx_t[t];
        }
    }
}

void Ipm::factor_schur() {
    mtilde_ = m00_;
    const int threads = std::max(1, opts_.threads);
    auto factor_group = [&](int g) {
        // tiny relative regularization keeps the late ill-conditioned
        // factorizations alive
        mll_[g].diagonal().array() += 1e-14 * (1.0 + mll_[g].diagonal().maxCoeff());
        mll_llt_[g].compute(mll_[g]);
        kl_[g] = mll_llt_[g].solve(m0l_[g].transpose());
    };
    if (threads == 1 || n_groups_ <= 2) {
        for (int g = 1; g < n_groups_; ++g) factor_group(g);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t)
            pool.emplace_back([&, t] {
                for (int g = 1 + t; g < n_groups_; g += threads) factor_group(g);
            });
        for (auto& th : pool) th.join();
    }
    for (int g = 1; g < n_groups_; ++g) mtilde_ -= m0l_[g] * kl_[g];
    if (n0_ > 0)
        mtilde_.diagonal().array() += 1e-14 * (1.0 + mtilde_.diagonal().maxCoeff());
    mtilde_llt_.compute(mtilde_);
    if (geq_.rows() > 0) {
        wmat_ = mtilde_llt_.solve(geq_.transpose());
        MatrixXd hm = geq_ * wmat_;
        hm.diagonal().array() += 1e-14 * (1.0 + hm.diagonal().maxCoeff());
        hmat_llt_.compute(hm);
    }
}

void Ipm::apply_schur(const VectorXd& v, VectorXd& out) const {
    out.resize(n_);
    if (n0_ > 0) out.head(n0_) = m00_ * v.head(n0_);
    for (int g = 1; g < n_groups_; ++g) {
        const auto& grp = prob_.groups[g];
        const auto vl = v.segment(grp.start, grp.size);
        if (n0_ > 0) {
            out.head(n0_) += m0l_[g] * vl;
            out.segment(grp.start, grp.size) =
                mll_[g] * vl + m0l_[g].transpose() * v.head(n0_);
        } else {
            out.segment(grp.start, grp.size) = mll_[g] * vl;
        }
    }
}

void Ipm::solve_kkt_once(const VectorXd& rhs, const VectorXd& req, VectorXd& dx,
                         VectorXd& dlam) const {
    VectorXd rhs0 = rhs.head(n0_);
    std::vector<VectorXd> yl(n_groups_);
    for (int g = 1; g < n_groups_; ++g) {
        const auto& grp = prob_.groups[g];
        yl[g] = mll_llt_[g].solve(rhs.segment(grp.start, grp.size));
        rhs0 -= m0l_[g] * yl[g];
    }
    dx.resize(n_);
    VectorXd dx0;
    if (geq_.rows() > 0) {
        VectorXd t = mtilde_llt_.solve(rhs0);
        dlam = hmat_llt_.solve(req - geq_ * t);
        dx0 = t + wmat_ * dlam;
    } else {
        dlam.resize(0);
        dx0 = n0_ > 0 ? mtilde_llt_.solve(rhs0).eval() : VectorXd();
    }
    if (n0_ > 0) dx.head(n0_) = dx0;
    for (int g = 1; g < n_groups_; ++g) {
        const auto& grp = prob_.groups[g];
        dx.segment(grp.start, grp.size) = yl[g] - kl_[g] * dx0;
    }
}

void Ipm::solve_kkt(const VectorXd& rhs, const VectorXd& req, VectorXd& dx,
                    VectorXd& dlam) const {
    solve_kkt_once(rhs, req, dx, dlam);
    // iterative refinement: the Schur system turns ill-conditioned as mu
    // shrinks and raw directions stop satisfying the Newton equations
    VectorXd mdx;
    for (int round = 0; round < 2; ++round) {
        apply_schur(dx, mdx);
        VectorXd r1 = rhs - mdx;
        if (dlam.size()) r1.head(n0_) += geq_.transpose() * dlam;
        VectorXd r2 = req;
        if (dlam.size()) r2 -= geq_ * dx.head(n0_);
        const double rn = r1.lpNorm<Eigen::Infinity>() +
                          (r2.size() ? r2.lpNorm<Eigen::Infinity>() : 0.0);
        const double sn = 1.0 + rhs.lpNorm<Eigen::Infinity>();
        if (rn <= 1e-13 * sn) break;
        VectorXd cx, clam;
        solve_kkt_once(r1, r2, cx, clam);
        dx += cx;
        if (dlam.size()) dlam += clam;
    }
}

void Ipm::scatter_ds(const VectorXd& dx, bool affine) {
    for (size_t bi = 0; bi < prob_.blocks.size(); ++bi) {
        const auto& b = prob_.blocks[bi];
        auto& w = work_[bi];
        MatrixXd& ds = affine ? w.dSaff : w.dS;
        ds = w.Rd;
        for (const auto& vc : b.coeffs) {
            const double v = dx(vc.var);
            if (v == 0.0) continue;
            for (const auto& u : vc.units) {
                ds(u.row, u.col) += u.value * v;
                if (u.row != u.col) ds(u.col, u.row) += u.value * v;
            }
        }
    }
}

ConicResult Ipm::run() {
    ConicResult res;
    if (eq_inconsistent_) {
        res.status = ConicStatus::infeasible;
        res.message = "equality constraints are inconsistent";
        return res;
    }

    mll_.resize(n_groups_);
    m0l_.resize(n_groups_);
    mll_llt_.resize(n_groups_);
    kl_.resize(n_groups_);

    double ntotal = 0.0;
    for (const auto& b : prob_.blocks) ntotal += b.n;

    const double hnorm = 1.0 + (heq_.size() ? heq_.lpNorm<Eigen::Infinity>() : 0.0);
    const double cnorm = 1.0 + prob_.c.lpNorm<Eigen::Infinity>();

    double best_metric = std::numeric_limits<double>::infinity();
    double best_relgap = std::numeric_limits<double>::infinity();
    double best_feas = std::numeric_limits<double>::infinity();
    int stall = 0;
    VectorXd gtlam = VectorXd::Zero(n_);

    // Stalls with certified feasibility and a small residual gap are reported
    // as near-optimal; callers get the conservative primal-minus-gap value.
    // This is the normal outcome when the optimal face is at infinity (eta
    // blows up as sigma turns singular), where no interior method attains the
    // infimum.
    auto finalize = [&](const char* why) {
        if (best_relgap <= opts_.gap_tol * 10.0 && best_metric <= opts_.feas_tol * 100.0)
            res.status = ConicStatus::optimal;
        else if (best_relgap <= 3e-2 && best_feas <= 1e-6)
            res.status = ConicStatus::near_optimal;
        else
            res.status = ConicStatus::numerical_failure;
        res.message = why;
        return res;
    };

    for (int iter = 0; iter < opts_.max_iters; ++iter) {
        eval_lmi();

        double mu = 0.0;
        for (auto& w : work_) mu += w.X.cwiseProduct(w.S).sum();
        mu /= ntotal;

        const double pobj = prob_.c.dot(x_) + prob_.c0;
        const double dobj = (lam_.size() ? heq_.dot(lam_) : 0.0) + prob_.c0;
        const double gap = pobj - dobj;
        const double relgap = std::abs(gap) / (1.0 + std::abs(pobj) + std::abs(dobj));

        double dres = 0.0;
        for (auto& w : work_) dres = std::max(dres, w.Rd.cwiseAbs().maxCoeff());
        dres /= 1.0 + x_.lpNorm<Eigen::Infinity>();
        VectorXd req = heq_ - geq_ * x_.head(n0_);
        const double pres = req.size() ? req.lpNorm<Eigen::Infinity>() / hnorm : 0.0;

        // stationarity residual: the dual objective is a valid bound only when
        // c - A*(X) - G'lambda vanishes; weight by |x| since the gap picks up
        // an x'r term
        VectorXd rstat = prob_.c;
        for (size_t bi = 0; bi < prob_.blocks.size(); ++bi) {
            const auto& b = prob_.blocks[bi];
            for (const auto& vc : b.coeffs)
                rstat(vc.var) -= trace_units(vc.units, work_[bi].X);
        }
        if (lam_.size()) rstat.head(n0_) -= geq_.transpose() * lam_;
        const double obj_scale = 1.0 + std::abs(pobj) + std::abs(dobj);
        // exact contributions of the residuals to the measured gap
        const double sres = (std::abs(x_.dot(rstat)) +
                             std::abs(lam_.size() ? lam_.dot(req) : 0.0)) / obj_scale +
                            rstat.lpNorm<Eigen::Infinity>() / cnorm;

        const double metric = std::max({relgap, dres, pres, sres});
        if (metric <= best_metric) {  // keep the best iterate seen
            res.iterations = iter;
            res.x = x_;
            res.primal_objective = pobj;
            res.dual_objective = dobj;
            res.gap = gap;
            res.stat_slack = sres * obj_scale;
            best_relgap = relgap;
            best_feas = std::max(dres, pres);
        }
        if (opts_.verbose)
            std::fprintf(stderr,
                         "it %3d  pobj %+.9e  dobj %+.9e  gap %.2e  dres %.2e  pres %.2e  sres %.2e  mu %.2e  |x| %.2e\n",
                         iter, pobj, dobj, relgap, dres, pres, sres, mu, x_.lpNorm<Eigen::Infinity>());

        if (relgap <= opts_.gap_tol && dres <= opts_.feas_tol && pres <= opts_.feas_tol &&
            sres <= opts_.feas_tol) {
            res.status = ConicStatus::optimal;
            return res;
        }
        if (metric < 0.8 * best_metric) {
            best_metric = metric;
            stall = 0;
        } else if (++stall >= 10) {
            return finalize("progress stalled");
        }
        if (std::abs(dobj) > 1e8 * (1.0 + std::abs(prob_.c0)) && dres <= 1e-7) {
            res.status = ConicStatus::infeasible;
            res.message = "dual objective diverged";
            return res;
        }

        // factorizations and NT scaling points
        bool ok = true;
        for (auto& w : work_)
            if (!w.compute_scaling()) {
                ok = false;
                break;
            }
        if (!ok) return finalize("iterate left the cone");

        assemble_schur();
        factor_schur();
        if (mtilde_llt_.info() != Eigen::Success ||
            (geq_.rows() > 0 && hmat_llt_.info() != Eigen::Success))
            return finalize("Schur factorization failed");

        gtlam.setZero();
        if (lam_.size()) gtlam.head(n0_) = geq_.transpose() * lam_;

        // predictor (affine direction)
        VectorXd rhs = -hxvec_ - prob_.c + gtlam;
        VectorXd dx_aff, dlam_aff;
        solve_kkt(rhs, req, dx_aff, dlam_aff);
        scatter_ds(dx_aff, true);
        double as_aff = 1.0, ax_aff = 1.0;
        for (auto& w : work_) {
            w.dXaff = -w.X - w.W * w.dSaff * w.W;
            w.dXaff = 0.5 * (w.dXaff + w.dXaff.transpose()).eval();
            as_aff = std::min(as_aff, max_step(w.sllt, w.dSaff));
            ax_aff = std::min(ax_aff, max_step(w.xllt, w.dXaff));
        }
        double mu_aff = 0.0;
        for (auto& w : work_)
            mu_aff += (w.X + ax_aff * w.dXaff).cwiseProduct(w.S + as_aff * w.dSaff).sum();
        mu_aff = std::max(mu_aff / ntotal, 0.0);
        double sigma = std::pow(mu_aff / mu, 3.0);
        // hold the barrier while the measured gap is dominated by residuals
        // rather than by <X,S>, otherwise the cone factorizations die before
        // the residuals decay
        const double mu_gap = mu * ntotal / obj_scale;
        if (relgap > 10.0 * mu_gap || std::max({dres, pres, sres}) > 10.0 * mu_gap)
            sigma = std::max(sigma, 0.5);
        sigma = std::clamp(sigma, 1e-4, 1.0);

        // centering step to the sigma*mu target
        rhs = sigma * mu * gvec_ - hxvec_ - prob_.c + gtlam;
        VectorXd dx, dlam;
        solve_kkt(rhs, req, dx, dlam);
        scatter_ds(dx, false);
        double as = 1.0, ax = 1.0;
        for (auto& w : work_) {
            w.dX = sigma * mu * w.Sinv - w.X - w.W * w.dS * w.W;
            w.dX = 0.5 * (w.dX + w.dX.transpose()).eval();
            as = std::min(as, max_step(w.sllt, w.dS));
            ax = std::min(ax, max_step(w.xllt, w.dX));
        }
        const double gamma = 0.9;
        as = std::min(1.0, gamma * as);
        ax = std::min(1.0, gamma * ax);
        if (std::max(as, ax) < 1e-6) return finalize("step length collapsed");

        x_ += as * dx;
        if (lam_.size()) lam_ += ax * dlam;
        for (auto& w : work_) {
            w.S += as * w.dS;
            w.X += ax * w.dX;
        }
    }
    return finalize("iteration limit reached");
}

}  // namespace

ConicResult solve_conic(const ConicLmiProblem& prob, const ConicOptions& opts) {
    prob.validate();
    Ipm ipm(prob, opts);
    return ipm.run();
}

}  // namespace hdqkd
