#pragma once

// Truncated single-mode Fock space: ladder operators, standard states, the
// dense matrix exponential and density-matrix validation.
//
// Basis index k is the photon number, k = 0..D-1. The ladder operators obey
// [a, a^dagger] = 1 everywhere except the (D-1, D-1) corner, where the
// truncated commutator equals 1 - D. Every map in this library either lowers
// the photon number or is diagonal, so span{|0>..|k>} is invariant and results
// are exact for states with negligible population near the cutoff.

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <variant>

#include <Eigen/Dense>

#include "dampcount/errors.hpp"

namespace dampcount {

using Complex = std::complex<double>;
using Operator = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;

struct DensityTolerances {
    double hermiticity = 1e-12;
    double trace = 1e-12;
    double positivity = 1e-10;
};

/// Hermitian, positive-semidefinite, unit-trace operator. Only constructible
/// through validate_density, so holding one means the invariants were checked.
class DensityMatrix {
public:
    const Operator& op() const noexcept { return op_; }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(op_.rows()); }
    double population(std::size_t k) const { return op_(k, k).real(); }

private:
    explicit DensityMatrix(Operator op) : op_(std::move(op)) {}
    friend DensityMatrix validate_density(Operator op, const DensityTolerances& tol);

    Operator op_;
};

struct NumberState {
    unsigned m = 0;
};

struct CoherentState {
    Complex alpha{0.0, 0.0};
};

struct ThermalState {
    double nbar = 0.0;
};

using StateSpec = std::variant<NumberState, CoherentState, ThermalState>;

/// Largest population allowed beyond the cutoff when realizing coherent and
/// thermal states.
inline constexpr double kTailMassLimit = 1e-12;

inline void require_dim(std::size_t dim) {
    if (dim < 1) {
        throw std::invalid_argument("truncation dimension must be >= 1");
    }
}

inline Operator annihilation_op(std::size_t dim) {
    require_dim(dim);
    Operator a = Operator::Zero(dim, dim);
    for (std::size_t k = 0; k + 1 < dim; ++k) {
        a(k, k + 1) = std::sqrt(static_cast<double>(k + 1));
    }
    return a;
}

inline Operator creation_op(std::size_t dim) { return annihilation_op(dim).adjoint(); }

inline Operator number_op(std::size_t dim) {
    require_dim(dim);
    Operator n = Operator::Zero(dim, dim);
    for (std::size_t k = 0; k < dim; ++k) {
        n(k, k) = static_cast<double>(k);
    }
    return n;
}

inline bool all_finite(const Operator& x) { return x.allFinite(); }

inline double max_abs(const Operator& x) {
    return x.size() == 0 ? 0.0 : x.cwiseAbs().maxCoeff();
}

/// Kronecker product A (x) B: (A (x) B)(i*rb + k, j*cb + l) = A(i,j) B(k,l).
inline Operator kron(const Operator& a, const Operator& b) {
    const auto rb = b.rows();
    const auto cb = b.cols();
    Operator out(a.rows() * rb, a.cols() * cb);
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * rb, j * cb, rb, cb) = a(i, j) * b;
        }
    }
    return out;
}

inline bool is_diagonal(const Operator& x) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
            if (i != j && x(i, j) != Complex(0.0, 0.0)) {
                return false;
            }
        }
    }
    return true;
}

/// Matrix exponential by scaling and squaring around a Taylor core. The input is
/// scaled until its 1-norm is at most 1/2, the series is summed until the next
/// term drops below machine epsilon relative to the partial sum, and the result
/// is squared back. Diagonal inputs are exponentiated entrywise.
inline Operator matrix_exp(const Operator& x) {
    if (x.rows() != x.cols()) {
        throw std::invalid_argument("matrix_exp requires a square matrix");
    }
    if (!all_finite(x)) {
        throw ConvergenceError("matrix_exp: input has non-finite entries");
    }
    const auto n = x.rows();
    if (is_diagonal(x)) {
        Operator out = Operator::Zero(n, n);
        for (Eigen::Index k = 0; k < n; ++k) {
            out(k, k) = std::exp(x(k, k));
        }
        return out;
    }

    const double norm1 = x.cwiseAbs().colwise().sum().maxCoeff();
    int squarings = 0;
    if (norm1 > 0.5) {
        squarings = static_cast<int>(std::ceil(std::log2(norm1 / 0.5)));
    }
    const Operator scaled = x / std::ldexp(1.0, squarings);

    constexpr int kMaxTerms = 60;
    constexpr double kEps = std::numeric_limits<double>::epsilon();
    Operator sum = Operator::Identity(n, n);
    Operator term = Operator::Identity(n, n);
    bool converged = false;
    for (int k = 1; k <= kMaxTerms; ++k) {
        term = (term * scaled) / static_cast<double>(k);
        sum += term;
        if (max_abs(term) <= kEps * 0.25 * max_abs(sum)) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        throw ConvergenceError("matrix_exp: Taylor series did not converge");
    }
    for (int s = 0; s < squarings; ++s) {
        sum = sum * sum;
    }
    if (!all_finite(sum)) {
        throw ConvergenceError("matrix_exp: overflow during squaring");
    }
    return sum;
}

inline DensityMatrix validate_density(Operator op, const DensityTolerances& tol = {}) {
    if (op.rows() != op.cols() || op.rows() < 1) {
        throw std::invalid_argument("density matrix must be square and non-empty");
    }
    if (!all_finite(op)) {
        throw ValidationError(ValidationKind::hermiticity, std::numeric_limits<double>::infinity());
    }
    const double herm = max_abs(op - op.adjoint());
    if (herm > tol.hermiticity) {
        throw ValidationError(ValidationKind::hermiticity, herm);
    }
    const double trace_defect = std::abs(op.trace() - Complex(1.0, 0.0));
    if (trace_defect > tol.trace) {
        throw ValidationError(ValidationKind::trace, trace_defect);
    }
    const Operator hermitian_part = 0.5 * (op + op.adjoint());
    Eigen::SelfAdjointEigenSolver<Operator> eig(hermitian_part, Eigen::EigenvaluesOnly);
    const double min_eig = eig.eigenvalues().minCoeff();
    if (min_eig < -tol.positivity) {
        throw ValidationError(ValidationKind::positivity, -min_eig);
    }
    return DensityMatrix(std::move(op));
}

inline Operator projector(const StateVector& psi) { return psi * psi.adjoint(); }

inline Operator fock_projector(unsigned m, std::size_t dim) {
    Operator p = Operator::Zero(dim, dim);
    p(m, m) = 1.0;
    return p;
}

namespace detail {

inline DensityMatrix realize(const NumberState& s, std::size_t dim) {
    if (s.m >= dim) {
        throw TruncationError("number state |" + std::to_string(s.m) +
                                  "> needs dimension > " + std::to_string(s.m),
                              1.0);
    }
    return validate_density(fock_projector(s.m, dim));
}

inline DensityMatrix realize(const CoherentState& s, std::size_t dim) {
    const double mean = std::norm(s.alpha);
    StateVector psi(dim);
    Complex amp = std::exp(-0.5 * mean);
    for (std::size_t k = 0; k < dim; ++k) {
        psi(k) = amp;
        amp *= s.alpha / std::sqrt(static_cast<double>(k + 1));
    }
    // Population beyond the cutoff, summed until the Poisson tail is negligible.
    double tail = 0.0;
    for (std::size_t k = dim;; ++k) {
        const double w = std::norm(amp);
        tail += w;
        if ((static_cast<double>(k) > mean && w < 1e-30) || k > dim + 100000) {
            break;
        }
        amp *= s.alpha / std::sqrt(static_cast<double>(k + 1));
    }
    if (tail > kTailMassLimit) {
        throw TruncationError("coherent state tail mass " + std::to_string(tail) +
                                  " exceeds limit at dimension " + std::to_string(dim),
                              tail);
    }
    psi /= psi.norm();
    return validate_density(projector(psi));
}

inline DensityMatrix realize(const ThermalState& s, std::size_t dim) {
    if (!(s.nbar >= 0.0) || !std::isfinite(s.nbar)) {
        throw std::invalid_argument("thermal mean photon number must be finite and >= 0");
    }
    const double ratio = s.nbar / (1.0 + s.nbar);
    const double tail = std::pow(ratio, static_cast<double>(dim));
    if (tail > kTailMassLimit) {
        throw TruncationError("thermal state tail mass " + std::to_string(tail) +
                                  " exceeds limit at dimension " + std::to_string(dim),
                              tail);
    }
    Operator rho = Operator::Zero(dim, dim);
    double w = 1.0 / (1.0 + s.nbar);
    double total = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
        rho(k, k) = w;
        total += w;
        w *= ratio;
    }
    rho /= total;
    return validate_density(std::move(rho));
}

}  // namespace detail

/// Density matrix for `spec` on a D-dimensional Fock space. Coherent and
/// thermal states are renormalized after truncation; they throw
/// TruncationError when more than 1e-12 of their population lies at or above D.
inline DensityMatrix realize_state(const StateSpec& spec, std::size_t dim) {
    require_dim(dim);
    return std::visit([dim](const auto& s) { return detail::realize(s, dim); }, spec);
}

inline double mean_photon_number(const DensityMatrix& rho) {
    double mean = 0.0;
    for (std::size_t k = 0; k < rho.dim(); ++k) {
        mean += static_cast<double>(k) * rho.population(k);
    }
    return mean;
}

}  // namespace dampcount
