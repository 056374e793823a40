#pragma once

// Amplitude damping (zero-temperature photon loss)
//
//     d rho / dt = kappa (2 a rho a^dagger - a^dagger a rho - rho a^dagger a)
//
// realized four ways: the Kraus operator sum, the exponential of the vectorized
// Liouvillian, the two-factor form of that exponential, and fixed-step RK4.
//
// Vectorization stacks columns (Eigen's storage order), so
//
//     vec(A rho B) = (B^T (x) A) vec(rho),
//
// left multiplication by X is I (x) X and right multiplication is X^T (x) I.
// The second tensor factor therefore carries the system mode and the first
// carries its fictitious partner. Since a is real and every generator used here
// is symmetric under swapping the factors, the Liouvillian reads the same in
// either stacking order; the helpers below still build it from the general rule.

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "dampcount/fock.hpp"
#include "dampcount/special.hpp"

namespace dampcount {

class ChannelParams {
public:
    ChannelParams(double kappa, double t) : kappa_(kappa), t_(t) {
        if (!std::isfinite(kappa) || kappa < 0.0) {
            throw std::invalid_argument("dissipation rate kappa must be finite and >= 0");
        }
        if (!std::isfinite(t) || t < 0.0) {
            throw std::invalid_argument("evolution time t must be finite and >= 0");
        }
    }

    double kappa() const noexcept { return kappa_; }
    double t() const noexcept { return t_; }
    double kappa_t() const noexcept { return kappa_ * t_; }
    /// Surviving fraction e^{-2 kappa t} of the photon number.
    double transmissivity() const noexcept { return std::exp(-2.0 * kappa_t()); }
    /// Loss parameter T = 1 - e^{-2 kappa t}, in [0, 1).
    double loss() const noexcept { return -std::expm1(-2.0 * kappa_t()); }

private:
    double kappa_;
    double t_;
};

struct KrausSet {
    std::size_t dim = 0;
    std::size_t m_max = 0;
    std::vector<Operator> ops;
};

/// Linear map on column-stacked D x D matrices, stored as a D^2 x D^2 matrix.
struct Superoperator {
    std::size_t dim = 0;
    Operator matrix;

    Operator apply(const Operator& rho) const;
};

inline StateVector vectorize(const Operator& rho) {
    return Eigen::Map<const StateVector>(rho.data(), rho.size());
}

inline Operator unvectorize(const StateVector& v, std::size_t dim) {
    if (static_cast<std::size_t>(v.size()) != dim * dim) {
        throw std::invalid_argument("vector length does not match dimension squared");
    }
    return Eigen::Map<const Operator>(v.data(), dim, dim);
}

inline Operator Superoperator::apply(const Operator& rho) const {
    return unvectorize(matrix * vectorize(rho), dim);
}

inline Operator left_multiplication(const Operator& x) {
    return kron(Operator::Identity(x.rows(), x.rows()), x);
}

inline Operator right_multiplication(const Operator& x) {
    return kron(x.transpose(), Operator::Identity(x.rows(), x.rows()));
}

/// Superoperator of rho -> A rho B.
inline Operator sandwich(const Operator& a, const Operator& b) { return kron(b.transpose(), a); }

/// Kraus operators M_m = sqrt(T^m / m!) e^{-kappa t N} a^m for m = 0..m_max.
/// The default m_max = D - 1 closes the set exactly on the truncated space.
inline KrausSet kraus_set(const ChannelParams& params, std::size_t dim,
                          std::optional<std::size_t> m_max = std::nullopt) {
    require_dim(dim);
    const std::size_t top = m_max.value_or(dim - 1);
    if (top > dim - 1) {
        throw std::invalid_argument("m_max must be <= D - 1");
    }
    const double loss = params.loss();
    const double kt = params.kappa_t();

    Operator damping = Operator::Zero(dim, dim);
    for (std::size_t k = 0; k < dim; ++k) {
        damping(k, k) = std::exp(-kt * static_cast<double>(k));
    }
    const Operator a = annihilation_op(dim);

    KrausSet ks{dim, top, {}};
    ks.ops.reserve(top + 1);
    Operator a_power = Operator::Identity(dim, dim);
    for (std::size_t m = 0; m <= top; ++m) {
        if (m > 0) {
            a_power = (a_power * a).eval();
        }
        double coeff = 0.0;
        if (m == 0) {
            coeff = 1.0;
        } else if (loss > 0.0) {
            coeff = std::exp(0.5 * (static_cast<double>(m) * std::log(loss) - log_factorial(m)));
        }
        ks.ops.push_back(coeff * damping * a_power);
    }
    return ks;
}

/// max |sum_m M_m^dagger M_m - I|.
inline double completeness_defect(const KrausSet& ks) {
    Operator sum = Operator::Zero(ks.dim, ks.dim);
    for (const auto& m : ks.ops) {
        sum += m.adjoint() * m;
    }
    return max_abs(sum - Operator::Identity(ks.dim, ks.dim));
}

inline void require_same_dim(const DensityMatrix& rho, std::size_t dim) {
    if (rho.dim() != dim) {
        throw std::invalid_argument("state dimension " + std::to_string(rho.dim()) +
                                    " does not match operator dimension " + std::to_string(dim));
    }
}

inline DensityMatrix apply_kraus(const DensityMatrix& rho0, const KrausSet& ks) {
    require_same_dim(rho0, ks.dim);
    Operator out = Operator::Zero(ks.dim, ks.dim);
    for (const auto& m : ks.ops) {
        out.noalias() += m * rho0.op() * m.adjoint();
    }
    return validate_density(std::move(out));
}

inline DensityMatrix apply_kraus(const DensityMatrix& rho0, const ChannelParams& params) {
    return apply_kraus(rho0, kraus_set(params, rho0.dim()));
}

/// Generator of the master equation on the doubled space. Time is not folded
/// in: the propagator is exp(t L).
inline Superoperator liouvillian(const ChannelParams& params, std::size_t dim) {
    require_dim(dim);
    const Operator a = annihilation_op(dim);
    const Operator n = number_op(dim);
    Operator gen = 2.0 * sandwich(a, a.adjoint()) - left_multiplication(n) - right_multiplication(n);
    return {dim, params.kappa() * gen};
}

inline Superoperator vectorized_propagator(const ChannelParams& params, std::size_t dim) {
    const Superoperator gen = liouvillian(params, dim);
    return {dim, matrix_exp(params.t() * gen.matrix)};
}

/// exp(-kappa t (N (x) I + I (x) N)) exp(T a (x) a), both factors built
/// directly: the first is diagonal, the second a terminating power series since
/// a (x) a is nilpotent on the truncated space.
inline Superoperator factored_propagator(const ChannelParams& params, std::size_t dim) {
    require_dim(dim);
    const std::size_t dd = dim * dim;
    const Operator a = annihilation_op(dim);
    const Operator lowering = sandwich(a, a.adjoint());
    const double loss = params.loss();

    Operator series = Operator::Identity(dd, dd);
    Operator term = Operator::Identity(dd, dd);
    for (std::size_t n = 1; n < dim && loss > 0.0; ++n) {
        term = (term * lowering) * (loss / static_cast<double>(n));
        series += term;
    }

    const double kt = params.kappa_t();
    Operator out(dd, dd);
    for (std::size_t col = 0; col < dim; ++col) {
        for (std::size_t row = 0; row < dim; ++row) {
            const std::size_t idx = col * dim + row;
            out.row(idx) = std::exp(-kt * static_cast<double>(row + col)) * series.row(idx);
        }
    }
    return {dim, std::move(out)};
}

inline DensityMatrix propagate_vectorized(const DensityMatrix& rho0, const ChannelParams& params) {
    const auto prop = vectorized_propagator(params, rho0.dim());
    return validate_density(prop.apply(rho0.op()));
}

/// Applies exp(T a (x) a) term by term to vec(rho0), then the diagonal factor.
inline DensityMatrix propagate_factored(const DensityMatrix& rho0, const ChannelParams& params) {
    const std::size_t dim = rho0.dim();
    const Operator a = annihilation_op(dim);
    const Operator lowering = sandwich(a, a.adjoint());
    const double loss = params.loss();

    StateVector term = vectorize(rho0.op());
    StateVector acc = term;
    for (std::size_t n = 1; n < dim && loss > 0.0; ++n) {
        term = (lowering * term) * (loss / static_cast<double>(n));
        acc += term;
    }
    const double kt = params.kappa_t();
    for (std::size_t col = 0; col < dim; ++col) {
        for (std::size_t row = 0; row < dim; ++row) {
            acc(col * dim + row) *= std::exp(-kt * static_cast<double>(row + col));
        }
    }
    return validate_density(unvectorize(acc, dim));
}

/// Steps needed for kappa * h <= 1e-3.
inline std::size_t default_rk4_steps(const ChannelParams& params) {
    const double steps = std::ceil(params.kappa_t() / 1e-3);
    return steps < 1.0 ? 1 : static_cast<std::size_t>(steps);
}

/// Fixed-step classical RK4 of the master equation without validation.
inline Operator integrate_master_equation_raw(const Operator& rho0, const ChannelParams& params,
                                              std::size_t steps) {
    if (steps < 1) {
        throw std::invalid_argument("steps must be >= 1");
    }
    const auto dim = rho0.rows();
    const Operator a = annihilation_op(dim);
    const Operator ad = a.adjoint();
    Eigen::VectorXd num(dim);
    for (Eigen::Index k = 0; k < dim; ++k) {
        num(k) = static_cast<double>(k);
    }
    const double kappa = params.kappa();
    auto rhs = [&](const Operator& rho) -> Operator {
        // N rho + rho N, with N diagonal.
        Operator anti = rho;
        for (Eigen::Index j = 0; j < dim; ++j) {
            for (Eigen::Index i = 0; i < dim; ++i) {
                anti(i, j) *= num(i) + num(j);
            }
        }
        return kappa * (2.0 * a * rho * ad - anti);
    };

    const double h = params.t() / static_cast<double>(steps);
    Operator rho = rho0;
    for (std::size_t s = 0; s < steps; ++s) {
        const Operator k1 = rhs(rho);
        const Operator k2 = rhs(rho + 0.5 * h * k1);
        const Operator k3 = rhs(rho + 0.5 * h * k2);
        const Operator k4 = rhs(rho + h * k3);
        rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return rho;
}

inline constexpr DensityTolerances kOdeTolerances{1e-12, 1e-12, 1e-8};

inline DensityMatrix integrate_master_equation(const DensityMatrix& rho0, const ChannelParams& params,
                                               std::size_t steps) {
    return validate_density(integrate_master_equation_raw(rho0.op(), params, steps), kOdeTolerances);
}

inline DensityMatrix integrate_master_equation(const DensityMatrix& rho0, const ChannelParams& params) {
    return integrate_master_equation(rho0, params, default_rk4_steps(params));
}

/// Populations of the binomial mixture that |m><m| decays into. Entry l is the
/// weight of |m - l><m - l|:  C(m, l) T^l e^{-2 kappa t (m - l)}.
inline std::vector<double> number_state_mixture_weights(unsigned m, const ChannelParams& params) {
    std::vector<double> w(m + 1, 0.0);
    const double loss = params.loss();
    const double kt = params.kappa_t();
    for (unsigned l = 0; l <= m; ++l) {
        if (loss == 0.0) {
            w[l] = l == 0 ? 1.0 : 0.0;
            continue;
        }
        const double log_w = log_binomial(m, l) + l * std::log(loss) - 2.0 * kt * (m - l);
        w[l] = std::exp(log_w);
    }
    return w;
}

}  // namespace dampcount
