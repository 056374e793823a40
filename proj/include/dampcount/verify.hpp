#pragma once

// Seeded invariant suites behind `dampcount verify`. Each suite reports one row
// per check with its worst measured defect and the threshold it was held to.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dampcount/channel.hpp"
#include "dampcount/photocount.hpp"
#include "dampcount/random.hpp"

namespace dampcount {

enum class Suite { damping_law, oracles, kraus_completeness, factorization, rk4_order, povm };

inline constexpr Suite kAllSuites[] = {Suite::damping_law,   Suite::oracles,   Suite::kraus_completeness,
                                       Suite::factorization, Suite::rk4_order, Suite::povm};

inline std::string_view to_string(Suite suite) {
    switch (suite) {
    case Suite::damping_law: return "damping-law";
    case Suite::oracles: return "oracles";
    case Suite::kraus_completeness: return "kraus-completeness";
    case Suite::factorization: return "factorization";
    case Suite::rk4_order: return "rk4-order";
    case Suite::povm: return "povm";
    }
    return "unknown";
}

inline std::optional<Suite> parse_suite(std::string_view name) {
    for (Suite s : kAllSuites) {
        if (to_string(s) == name) {
            return s;
        }
    }
    return std::nullopt;
}

struct CheckResult {
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    /// Defects pass when value <= threshold; measured orders when value >= threshold.
    bool at_least = false;

    bool passed() const { return at_least ? value >= threshold : value <= threshold; }
};

struct VerifyReport {
    Suite suite = Suite::damping_law;
    std::size_t dim = 0;
    std::uint64_t seed = 0;
    double tol = 0.0;
    std::vector<CheckResult> checks;

    bool passed() const {
        return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed(); });
    }
};

/// Largest dimension accepted by suites that build D^2 x D^2 superoperators.
inline constexpr std::size_t kMaxSuperoperatorDim = 64;

/// RK4 errors are measured against this loose floor regardless of --tol.
inline constexpr double kOdeAgreementTol = 1e-8;
inline constexpr double kMinRk4Order = 3.8;

inline double max_diff(const DensityMatrix& x, const DensityMatrix& y) { return max_abs(x.op() - y.op()); }

/// log2 of the error ratio between `steps` and `2 * steps` RK4 runs against the
/// exact propagator.
inline double measured_rk4_order(const DensityMatrix& rho, const ChannelParams& params, std::size_t steps) {
    const Operator exact = propagate_vectorized(rho, params).op();
    const double coarse = max_abs(integrate_master_equation_raw(rho.op(), params, steps) - exact);
    const double fine = max_abs(integrate_master_equation_raw(rho.op(), params, 2 * steps) - exact);
    return std::log2(coarse / fine);
}

namespace detail {

inline std::string kt_label(const char* prefix, double kt) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s kt=%g", prefix, kt);
    return buf;
}

inline void damping_law_suite(VerifyReport& r, Rng& rng) {
    constexpr int kStates = 20;
    const double xis[] = {0.1, 0.5, 0.9, 1.0};
    const double kts[] = {0.0, 0.1, 0.7, 3.0};
    std::vector<DensityMatrix> states;
    for (int i = 0; i < kStates; ++i) {
        states.push_back(ginibre_density(r.dim, rng));
    }
    for (double kt : kts) {
        const ChannelParams params(kt, 1.0);
        const auto ks = kraus_set(params, r.dim);
        double worst = 0.0;
        for (const auto& rho : states) {
            const auto evolved = apply_kraus(rho, ks);
            for (double xi : xis) {
                const DetectorParams det(xi);
                worst = std::max(worst, max_abs_difference(distribution(evolved, det), damped_distribution(rho, det, params)));
            }
        }
        r.checks.push_back({kt_label("evolve-then-count vs dimmed detector", kt), worst, r.tol});
    }
}

inline void oracles_suite(VerifyReport& r, Rng& rng) {
    std::uniform_real_distribution<double> kt_dist(0.05, 2.0);
    double kv = 0.0, kf = 0.0, vf = 0.0, ode = 0.0;
    for (int i = 0; i < 4; ++i) {
        const auto rho = ginibre_density(r.dim, rng);
        const ChannelParams params(kt_dist(rng), 1.0);
        const auto by_kraus = apply_kraus(rho, params);
        const auto by_vec = propagate_vectorized(rho, params);
        const auto by_fact = propagate_factored(rho, params);
        const auto by_ode = integrate_master_equation(rho, params);
        kv = std::max(kv, max_diff(by_kraus, by_vec));
        kf = std::max(kf, max_diff(by_kraus, by_fact));
        vf = std::max(vf, max_diff(by_vec, by_fact));
        ode = std::max(ode, max_diff(by_kraus, by_ode));
    }
    r.checks.push_back({"kraus vs vectorized", kv, r.tol});
    r.checks.push_back({"kraus vs factored", kf, r.tol});
    r.checks.push_back({"vectorized vs factored", vf, r.tol});
    r.checks.push_back({"kraus vs rk4 (default steps)", ode, std::max(r.tol, kOdeAgreementTol)});
}

inline void completeness_suite(VerifyReport& r) {
    for (double kt : {0.1, 0.7, 3.0}) {
        const auto ks = kraus_set(ChannelParams(kt, 1.0), r.dim);
        r.checks.push_back({kt_label("sum M^dagger M - I", kt), completeness_defect(ks), r.tol});
    }
}

inline void factorization_suite(VerifyReport& r) {
    for (double kt : {0.2, 1.0, 4.0}) {
        const ChannelParams params(kt, 1.0);
        const double defect =
            max_abs(vectorized_propagator(params, r.dim).matrix - factored_propagator(params, r.dim).matrix);
        r.checks.push_back({kt_label("exp(tL) vs factored product", kt), defect, r.tol});
    }
}

inline void rk4_order_suite(VerifyReport& r, Rng& rng) {
    const auto rho = ginibre_density(r.dim, rng);
    const double order = measured_rk4_order(rho, ChannelParams(1.0, 1.0), 20);
    r.checks.push_back({"measured order (20 vs 40 steps)", order, kMinRk4Order, true});
}

inline void povm_suite(VerifyReport& r, Rng& rng) {
    double completeness = 0.0;
    for (double xi : {0.0, 0.1, 0.5, 0.9, 1.0}) {
        Operator sum = Operator::Zero(r.dim, r.dim);
        for (unsigned n = 0; n < r.dim; ++n) {
            sum += povm_element(n, DetectorParams(xi), r.dim);
        }
        completeness = std::max(completeness, max_abs(sum - Operator::Identity(r.dim, r.dim)));
    }
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double norm = 0.0, mean = 0.0;
    for (int i = 0; i < 20; ++i) {
        const auto rho = ginibre_density(r.dim, rng);
        const DetectorParams det(unit(rng));
        const auto p = distribution(rho, det);
        norm = std::max(norm, std::abs(p.total() - 1.0));
        mean = std::max(mean, std::abs(p.mean() - det.xi() * mean_photon_number(rho)));
    }
    r.checks.push_back({"sum_n Pi_n - I", completeness, r.tol});
    r.checks.push_back({"sum_n p(n) - 1", norm, r.tol});
    r.checks.push_back({"mean count - xi <N>", mean, r.tol});
}

}  // namespace detail

inline bool needs_superoperator(Suite suite) {
    return suite == Suite::oracles || suite == Suite::factorization || suite == Suite::rk4_order;
}

inline VerifyReport run_suite(Suite suite, std::size_t dim, std::uint64_t seed, double tol) {
    require_dim(dim);
    if (needs_superoperator(suite) && dim > kMaxSuperoperatorDim) {
        throw std::invalid_argument("suite " + std::string(to_string(suite)) + " requires dim <= " +
                                    std::to_string(kMaxSuperoperatorDim));
    }
    if (!(tol > 0.0)) {
        throw std::invalid_argument("tolerance must be positive");
    }
    VerifyReport report{suite, dim, seed, tol, {}};
    Rng rng(seed);
    switch (suite) {
    case Suite::damping_law: detail::damping_law_suite(report, rng); break;
    case Suite::oracles: detail::oracles_suite(report, rng); break;
    case Suite::kraus_completeness: detail::completeness_suite(report); break;
    case Suite::factorization: detail::factorization_suite(report); break;
    case Suite::rk4_order: detail::rk4_order_suite(report, rng); break;
    case Suite::povm: detail::povm_suite(report, rng); break;
    }
    return report;
}

}  // namespace dampcount
