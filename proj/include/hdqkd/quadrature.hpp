#pragma once

#include <vector>

namespace hdqkd {

struct Quadrature {
    int m = 0;
    std::vector<double> nodes;    // t_i in (0,1], ascending, t_m = 1
    std::vector<double> weights;  // positive, sum 1, w_m = 1/m^2
};

/// Gauss-Radau rule on [0,1] with the fixed node at the right endpoint,
/// computed from the Radau-modified Legendre Jacobi matrix.
Quadrature gauss_radau(int m);

}  // namespace hdqkd
