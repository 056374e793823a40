#include "dampcount/special.hpp"

#include <cmath>
#include <vector>

#include "gtest/gtest.h"

using namespace dampcount;

namespace {

// Pascal's triangle in doubles; exact for n <= 56.
std::vector<std::vector<double>> pascal(unsigned rows) {
    std::vector<std::vector<double>> c(rows + 1);
    for (unsigned n = 0; n <= rows; ++n) {
        c[n].assign(n + 1, 1.0);
        for (unsigned k = 1; k < n; ++k) {
            c[n][k] = c[n - 1][k - 1] + c[n - 1][k];
        }
    }
    return c;
}

}  // namespace

TEST(special, log_binomial_matches_pascal) {
    const auto c = pascal(50);
    for (unsigned n = 0; n <= 50; ++n) {
        for (unsigned k = 0; k <= n; ++k) {
            EXPECT_NEAR(std::exp(log_binomial(n, k)) / c[n][k], 1.0, 1e-13) << n << " " << k;
        }
    }
}

TEST(special, log_binomial_large_arguments_stay_finite) {
    // C(200, 100) ~ 9.05e58; 200! itself overflows a double.
    const double direct = log_binomial(200, 100);
    double by_sum = 0.0;
    for (unsigned i = 1; i <= 100; ++i) {
        by_sum += std::log(100.0 + i) - std::log(static_cast<double>(i));
    }
    EXPECT_TRUE(std::isfinite(direct));
    EXPECT_NEAR(direct, by_sum, 1e-11);
    EXPECT_EQ(log_binomial(3, 5), -INFINITY);
}

TEST(special, binomial_pmf_edges) {
    EXPECT_EQ(binomial_pmf(0, 0, 0.3), 1.0);
    EXPECT_EQ(binomial_pmf(4, 0, 0.0), 1.0);
    EXPECT_EQ(binomial_pmf(4, 1, 0.0), 0.0);
    EXPECT_EQ(binomial_pmf(4, 4, 1.0), 1.0);
    EXPECT_EQ(binomial_pmf(4, 3, 1.0), 0.0);
    EXPECT_EQ(binomial_pmf(2, 3, 0.5), 0.0);
    EXPECT_NEAR(binomial_pmf(3, 2, 0.5), 0.375, 1e-15);
}

TEST(special, binomial_pmf_rows_sum_to_one) {
    for (unsigned trials : {1u, 7u, 31u, 127u, 255u}) {
        for (double p : {0.01, 0.3, 0.5, 0.93}) {
            double total = 0.0;
            for (unsigned s = 0; s <= trials; ++s) {
                total += binomial_pmf(trials, s, p);
            }
            EXPECT_NEAR(total, 1.0, 1e-13) << trials << " " << p;
        }
    }
}
