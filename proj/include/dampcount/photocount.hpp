#pragma once

// Photon counting with a detector of quantum efficiency xi. The probability of
// registering n photoelectrons is p(n) = Tr(rho Pi_n), where Pi_n is the
// normally ordered operator :(xi N)^n e^{-xi N} / n!:. Because
// a^dagger^j a^j = N (N - 1) ... (N - j + 1), Pi_n is diagonal in the Fock
// basis with entries C(k, n) xi^n (1 - xi)^(k - n): each of the k photons is
// registered independently with probability xi.
//
// Under amplitude damping the counts at time t are those of the initial state
// seen by a detector of efficiency xi e^{-2 kappa t}. damped_distribution uses
// that shortcut without evolving the state.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "dampcount/channel.hpp"
#include "dampcount/fock.hpp"
#include "dampcount/special.hpp"

namespace dampcount {

class DetectorParams {
public:
    explicit DetectorParams(double xi) : xi_(xi) {
        if (!(xi >= 0.0 && xi <= 1.0)) {
            throw std::invalid_argument("quantum efficiency xi must lie in [0, 1]");
        }
    }

    double xi() const noexcept { return xi_; }

private:
    double xi_;
};

struct PhotocountDistribution {
    std::vector<double> probs;

    std::size_t size() const noexcept { return probs.size(); }
    double operator[](std::size_t n) const { return n < probs.size() ? probs[n] : 0.0; }

    double total() const {
        double s = 0.0;
        for (double p : probs) {
            s += p;
        }
        return s;
    }

    double mean() const {
        double s = 0.0;
        for (std::size_t n = 0; n < probs.size(); ++n) {
            s += static_cast<double>(n) * probs[n];
        }
        return s;
    }
};

/// Largest negative dip tolerated before a probability is clamped to zero.
inline constexpr double kNegativeProbabilityLimit = 1e-14;

/// max_n |p(n) - q(n)|, padding the shorter vector with zeros.
inline double max_abs_difference(const PhotocountDistribution& p, const PhotocountDistribution& q) {
    const std::size_t len = std::max(p.size(), q.size());
    double worst = 0.0;
    for (std::size_t n = 0; n < len; ++n) {
        worst = std::max(worst, std::abs(p[n] - q[n]));
    }
    return worst;
}

inline DetectorParams effective_efficiency(const DetectorParams& det, const ChannelParams& params) {
    return DetectorParams(det.xi() * params.transmissivity());
}

inline Operator povm_element(unsigned n, const DetectorParams& det, std::size_t dim) {
    require_dim(dim);
    if (n > dim - 1) {
        throw std::invalid_argument("count n must be <= D - 1");
    }
    Operator pi = Operator::Zero(dim, dim);
    for (std::size_t k = n; k < dim; ++k) {
        pi(k, k) = binomial_pmf(static_cast<unsigned>(k), n, det.xi());
    }
    return pi;
}

/// Clamps rounding-level negatives to zero; larger dips mean the input was not
/// a valid state.
inline PhotocountDistribution clamp_probabilities(std::vector<double> probs) {
    for (double& p : probs) {
        if (p < -kNegativeProbabilityLimit) {
            throw ValidationError(ValidationKind::probability, -p);
        }
        if (p < 0.0) {
            p = 0.0;
        }
    }
    return {std::move(probs)};
}

/// Count distribution for a diagonal population vector.
inline PhotocountDistribution distribution_from_populations(const std::vector<double>& pops,
                                                            const DetectorParams& det) {
    const std::size_t dim = pops.size();
    std::vector<double> probs(dim, 0.0);
    for (std::size_t k = 0; k < dim; ++k) {
        if (pops[k] == 0.0) {
            continue;
        }
        for (std::size_t n = 0; n <= k; ++n) {
            probs[n] += pops[k] * binomial_pmf(static_cast<unsigned>(k), static_cast<unsigned>(n), det.xi());
        }
    }
    return clamp_probabilities(std::move(probs));
}

/// p(n) = Tr(rho Pi_n) for n = 0..D-1. Only the populations of rho contribute.
inline PhotocountDistribution distribution(const DensityMatrix& rho, const DetectorParams& det) {
    std::vector<double> pops(rho.dim());
    for (std::size_t k = 0; k < rho.dim(); ++k) {
        pops[k] = rho.population(k);
    }
    return distribution_from_populations(pops, det);
}

inline PhotocountDistribution damped_distribution(const DensityMatrix& rho0, const DetectorParams& det,
                                                  const ChannelParams& params) {
    return distribution(rho0, effective_efficiency(det, params));
}

/// Binomial(m, xi) counts of the number state |m>, zero-padded to `length`
/// (at least m + 1 entries).
inline PhotocountDistribution analytic_number_distribution(unsigned m, const DetectorParams& det,
                                                           std::size_t length = 0) {
    std::vector<double> probs(std::max<std::size_t>(length, m + 1), 0.0);
    for (unsigned n = 0; n <= m; ++n) {
        probs[n] = binomial_pmf(m, n, det.xi());
    }
    return {std::move(probs)};
}

inline PhotocountDistribution analytic_number_damped(unsigned m, const DetectorParams& det,
                                                     const ChannelParams& params, std::size_t length = 0) {
    return analytic_number_distribution(m, effective_efficiency(det, params), length);
}

/// Counts of |m> after damping, obtained by weighting the undamped binomial
/// counts of each |m - l> by its share of the decayed mixture.
inline PhotocountDistribution mixture_number_damped(unsigned m, const DetectorParams& det,
                                                    const ChannelParams& params, std::size_t length = 0) {
    const auto weights = number_state_mixture_weights(m, params);
    std::vector<double> probs(std::max<std::size_t>(length, m + 1), 0.0);
    for (unsigned l = 0; l <= m; ++l) {
        const auto counts = analytic_number_distribution(m - l, det);
        for (std::size_t n = 0; n < counts.size(); ++n) {
            probs[n] += weights[l] * counts.probs[n];
        }
    }
    return {std::move(probs)};
}

}  // namespace dampcount
