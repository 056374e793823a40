#pragma once

#include <cstdint>
#include <random>

#include "dampcount/fock.hpp"

namespace dampcount {

using Rng = std::mt19937_64;

inline Operator ginibre_matrix(std::size_t dim, Rng& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Operator g(dim, dim);
    for (Eigen::Index j = 0; j < g.cols(); ++j) {
        for (Eigen::Index i = 0; i < g.rows(); ++i) {
            const double re = gauss(rng);
            const double im = gauss(rng);
            g(i, j) = Complex(re, im);
        }
    }
    return g;
}

/// Full-rank random state G G^dagger / Tr(G G^dagger).
inline DensityMatrix ginibre_density(std::size_t dim, Rng& rng) {
    const Operator g = ginibre_matrix(dim, rng);
    Operator rho = g * g.adjoint();
    rho /= rho.trace().real();
    // Remove the rounding-level anti-Hermitian part left by the product.
    rho = 0.5 * (rho + rho.adjoint()).eval();
    return validate_density(std::move(rho));
}

/// Ginibre state whose support is restricted to the lowest `support` levels.
inline DensityMatrix ginibre_density(std::size_t dim, std::size_t support, Rng& rng) {
    const Operator g = ginibre_matrix(support, rng);
    Operator rho = Operator::Zero(dim, dim);
    rho.topLeftCorner(support, support) = g * g.adjoint();
    rho /= rho.trace().real();
    rho = 0.5 * (rho + rho.adjoint()).eval();
    return validate_density(std::move(rho));
}

}  // namespace dampcount
