#pragma once

#include <cmath>
#include <limits>

namespace dampcount {

// Log-space factorials and binomials. The exponent is carried in long double:
// for k near 256, log C(k, n) is of order 10^2, and rounding it to double
// would cost ~1e-14 relative accuracy once exponentiated.

inline long double log_factorial_ld(unsigned n) {
    return std::lgamma(static_cast<long double>(n) + 1.0L);
}

inline long double log_binomial_ld(unsigned n, unsigned k) {
    if (k > n) {
        return -std::numeric_limits<long double>::infinity();
    }
    if (k == 0 || k == n) {
        return 0.0L;
    }
    return log_factorial_ld(n) - log_factorial_ld(k) - log_factorial_ld(n - k);
}

inline double log_factorial(unsigned n) { return static_cast<double>(log_factorial_ld(n)); }

inline double log_binomial(unsigned n, unsigned k) { return static_cast<double>(log_binomial_ld(n, k)); }

/// Binomial probability C(trials, s) p^s (1-p)^(trials-s), evaluated in log
/// space. Uses 0^0 = 1, so p = 0 and p = 1 give exact point masses.
inline double binomial_pmf(unsigned trials, unsigned successes, double p) {
    if (successes > trials) {
        return 0.0;
    }
    const unsigned failures = trials - successes;
    if (p <= 0.0) {
        return successes == 0 ? 1.0 : 0.0;
    }
    if (p >= 1.0) {
        return failures == 0 ? 1.0 : 0.0;
    }
    const long double lp = static_cast<long double>(p);
    const long double log_pmf =
        log_binomial_ld(trials, successes) + successes * std::log(lp) + failures * std::log1p(-lp);
    return static_cast<double>(std::exp(log_pmf));
}

}  // namespace dampcount
