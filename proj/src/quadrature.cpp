#include "hdqkd/quadrature.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace hdqkd {

Quadrature gauss_radau(int m) {
    if (m < 1) throw std::invalid_argument("gauss_radau: m must be >= 1");
    if (m == 1) return {1, {1.0}, {1.0}};

    // Legendre on [-1,1]: alpha_k = 0, beta_0 = 2, beta_k = k^2/(4k^2-1).
    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd beta(m);
    beta(0) = 2.0;
    for (int k = 1; k < m; ++k) beta(k) = double(k) * k / (4.0 * double(k) * k - 1.0);

    // Fix the node at a = +1: replace the last diagonal entry by
    // a - beta_{m-1} * pi_{m-2}(a) / pi_{m-1}(a)  (monic recurrence).
    const double a = 1.0;
    double pm1 = 0.0, pcur = 1.0;
    for (int k = 0; k < m - 1; ++k) {
        double pnext = (a - alpha(k)) * pcur - (k > 0 ? beta(k) : 0.0) * pm1;
        pm1 = pcur;
        pcur = pnext;
    }
    alpha(m - 1) = a - beta(m - 1) * pm1 / pcur;

    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(m, m);
    for (int k = 0; k < m; ++k) jac(k, k) = alpha(k);
    for (int k = 0; k + 1 < m; ++k) {
        double off = std::sqrt(beta(k + 1));
        jac(k, k + 1) = off;
        jac(k + 1, k) = off;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);

    Quadrature q;
    q.m = m;
    q.nodes.resize(m);
    q.weights.resize(m);
    for (int k = 0; k < m; ++k) {
        q.nodes[k] = 0.5 * (es.eigenvalues()(k) + 1.0);  // map [-1,1] -> [0,1]
        double v0 = es.eigenvectors()(0, k);
        q.weights[k] = 0.5 * beta(0) * v0 * v0;
    }
    q.nodes.back() = 1.0;  // eigenvalue of the modified matrix is exactly the endpoint
    return q;
}

}  // namespace hdqkd
