#include "dampcount/cli.hpp"

#include <cstdlib>
#include <random>
#include <sstream>

#include "gtest/gtest.h"

using namespace dampcount;
using namespace dampcount::cli;

namespace {

RunConfig number_config(unsigned m, std::size_t dim, double xi, double kappa, std::vector<double> times, Method method) {
    RunConfig c;
    c.state = NumberState{m};
    c.dim = dim;
    c.xi = xi;
    c.kappa = kappa;
    c.times = std::move(times);
    c.method = method;
    return c;
}

}  // namespace

TEST(state_spec, parses_each_kind) {
    EXPECT_EQ(std::get<NumberState>(parse_state_spec("number:3")).m, 3u);
    const auto coh = std::get<CoherentState>(parse_state_spec("coherent:1.5,-0.25"));
    EXPECT_EQ(coh.alpha, Complex(1.5, -0.25));
    EXPECT_EQ(std::get<CoherentState>(parse_state_spec("coherent:2")).alpha, Complex(2.0, 0.0));
    EXPECT_EQ(std::get<ThermalState>(parse_state_spec("thermal:0.8")).nbar, 0.8);
}

TEST(state_spec, rejects_malformed) {
    for (const char* bad : {"number", "number:-1", "number:1.5", "coherent:a,b", "thermal:-2", "squeezed:1", "number:"}) {
        EXPECT_THROW(parse_state_spec(bad), ConfigError) << bad;
    }
}

TEST(state_spec, format_parse_round_trip) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> amp(-3.0, 3.0);
    for (int i = 0; i < 200; ++i) {
        const Complex alpha(amp(rng), amp(rng));
        const auto back = std::get<CoherentState>(parse_state_spec(format_state_spec(CoherentState{alpha})));
        EXPECT_EQ(back.alpha, alpha);
        const double nbar = std::abs(amp(rng));
        EXPECT_EQ(std::get<ThermalState>(parse_state_spec(format_state_spec(ThermalState{nbar}))).nbar, nbar);
    }
}

TEST(time_range, inclusive_grid) {
    const auto t = parse_time_range("0:3:0.5");
    ASSERT_EQ(t.size(), 7u);
    EXPECT_EQ(t.front(), 0.0);
    EXPECT_EQ(t.back(), 3.0);
    EXPECT_EQ(parse_time_range("0:1:0.1").size(), 11u);
    EXPECT_EQ(parse_time_range("2:2:1").size(), 1u);
    EXPECT_THROW(parse_time_range("0:1:0"), ConfigError);
    EXPECT_THROW(parse_time_range("0:1"), ConfigError);
    EXPECT_THROW(parse_time_range("1:0:0.1"), ConfigError);
}

TEST(run_config, validation) {
    auto c = number_config(1, 8, 1.0, 0.5, {0.1}, Method::kraus);
    EXPECT_NO_THROW(validate(c));
    c.state = CoherentState{{1.0, 0.0}};
    c.method = Method::analytic;
    EXPECT_THROW(validate(c), ConfigError);
    c = number_config(1, 8, 1.2, 0.5, {0.1}, Method::kraus);
    EXPECT_THROW(validate(c), ConfigError);
    c = number_config(1, 8, 1.0, -0.5, {0.1}, Method::kraus);
    EXPECT_THROW(validate(c), ConfigError);
    c = number_config(1, 8, 1.0, 0.5, {}, Method::kraus);
    EXPECT_THROW(validate(c), ConfigError);
    c = number_config(1, 8, 1.0, 0.5, {-1.0}, Method::kraus);
    EXPECT_THROW(validate(c), ConfigError);
    c = number_config(1, 65, 1.0, 0.5, {1.0}, Method::vectorized);
    EXPECT_THROW(validate(c), ConfigError);
    EXPECT_THROW(parse_method("euler"), ConfigError);
    EXPECT_EQ(parse_method("damping-law"), Method::damping_law);
}

TEST(run_compute, single_photon_through_damping_law) {
    const auto blocks = run_compute(number_config(1, 8, 1.0, 0.5, {0.6931}, Method::damping_law));
    ASSERT_EQ(blocks.size(), 1u);
    EXPECT_NEAR(blocks[0].counts.probs[0], 0.5, 1e-4);
    EXPECT_NEAR(blocks[0].counts.probs[1], 0.5, 1e-4);
    EXPECT_EQ(blocks[0].counts.size(), 8u);
}

TEST(run_compute, all_methods_agree_on_number_state) {
    std::vector<std::vector<TimeBlock>> runs;
    for (Method m : kAllMethods) {
        runs.push_back(run_compute(number_config(4, 10, 0.75, 0.4, {0.0, 0.3, 1.2}, m)));
    }
    for (const auto& run : runs) {
        ASSERT_EQ(run.size(), 3u);
        for (std::size_t i = 0; i < run.size(); ++i) {
            EXPECT_LE(max_abs_difference(run[i].counts, runs.back()[i].counts), 1e-8);
            EXPECT_EQ(run[i].xi_effective, runs.back()[i].xi_effective);
        }
    }
}

TEST(run_compute, no_dissipation_kraus_equals_damping_law) {
    RunConfig c;
    c.state = ThermalState{0.5};
    c.dim = 48;
    c.xi = 0.6;
    c.kappa = 0.0;
    c.times = {0.0, 1.0, 7.0};
    c.method = Method::kraus;
    const auto kraus = run_compute(c);
    c.method = Method::damping_law;
    const auto law = run_compute(c);
    std::ostringstream a, b;
    write_csv(a, c, kraus);
    write_csv(b, c, law);
    std::string sa = a.str(), sb = b.str();
    // Only the method column differs.
    for (auto* s : {&sa, &sb}) {
        for (const char* name : {",kraus,", ",damping-law,"}) {
            for (auto pos = s->find(name); pos != std::string::npos; pos = s->find(name)) {
                s->replace(pos, std::string(name).size(), ",M,");
            }
        }
    }
    EXPECT_EQ(sa, sb);
}

TEST(run_compute, coherent_vacuum_time_is_poisson) {
    RunConfig c;
    c.state = parse_state_spec("coherent:1,0");
    c.dim = 40;
    c.xi = 1.0;
    c.times = {0.0};
    const auto blocks = run_compute(c);
    for (unsigned n = 0; n < 40; ++n) {
        EXPECT_NEAR(blocks[0].counts.probs[n], std::exp(-1.0 - std::lgamma(n + 1.0)), 1e-15);
    }
}

TEST(run_compute, sweep_blocks) {
    auto c = number_config(2, 8, 0.8, 0.5, parse_time_range("0:3:0.5"), Method::kraus);
    const auto blocks = run_compute(c);
    ASSERT_EQ(blocks.size(), 7u);
    const auto analytic = analytic_number_distribution(2, DetectorParams(0.8), 8);
    EXPECT_LE(max_abs_difference(blocks[0].counts, analytic), 1e-15);
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        EXPECT_NEAR(blocks[i].counts.total(), 1.0, 1e-10);
        if (i > 0) {
            EXPECT_LT(blocks[i].xi_effective, blocks[i - 1].xi_effective);
        }
    }
}

TEST(run_compute, numerical_failures_surface_before_output) {
    EXPECT_THROW(run_compute(number_config(8, 8, 1.0, 0.5, {1.0}, Method::kraus)), TruncationError);
    RunConfig c;
    c.state = CoherentState{{4.0, 0.0}};
    c.dim = 12;
    c.times = {0.0};
    EXPECT_THROW(run_compute(c), TruncationError);
}

TEST(emitters, csv_layout) {
    const auto c = number_config(1, 3, 1.0, 0.5, {0.0, 0.1}, Method::kraus);
    std::ostringstream out;
    write_csv(out, c, run_compute(c));
    std::istringstream lines(out.str());
    std::string line;
    std::getline(lines, line);
    EXPECT_EQ(line, "t,n,p,method,xi_effective");
    int rows = 0;
    while (std::getline(lines, line)) {
        ++rows;
    }
    EXPECT_EQ(rows, 6);
    EXPECT_NE(out.str().find("0.10000000000000001,0,"), std::string::npos);
    EXPECT_EQ(format_double(0.1), "0.10000000000000001");
}

TEST(emitters, json_round_trip_is_byte_identical) {
    RunConfig c;
    c.state = CoherentState{{0.3, -0.7}};
    c.dim = 24;
    c.xi = 0.37;
    c.kappa = 0.123456789;
    c.times = parse_time_range("0:1:0.1");
    c.method = Method::ode;
    c.output = OutputFormat::json;
    c.tol = 3e-10;
    c.seed = 99;
    c.steps = 400;
    const std::string first = to_json(c, run_compute(c)).dump(2);
    const RunConfig again = config_from_json(nlohmann::json::parse(first));
    const std::string second = to_json(again, run_compute(again)).dump(2);
    EXPECT_EQ(first, second);
    EXPECT_EQ(again.times, c.times);
    EXPECT_EQ(again.steps, c.steps);
}

TEST(emitters, config_from_json_rejects_garbage) {
    EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"dim": "big"})")), ConfigError);
    EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"method": "euler"})")), ConfigError);
    EXPECT_THROW(config_from_json(nlohmann::json::parse("[1, 2]")), ConfigError);
}

TEST(emitters, verify_report) {
    const auto report = run_suite(Suite::kraus_completeness, 16, 0, 1e-10);
    ASSERT_TRUE(report.passed());
    std::ostringstream csv;
    write_report(csv, report, OutputFormat::csv);
    EXPECT_EQ(csv.str().rfind("suite,check,value,threshold,status\n", 0), 0u);
    std::ostringstream json;
    write_report(json, report, OutputFormat::json);
    const auto doc = nlohmann::json::parse(json.str());
    EXPECT_TRUE(doc.at("passed").get<bool>());
    EXPECT_EQ(doc.at("checks").size(), 3u);
}

TEST(verify_suites, failures_are_reported_not_thrown) {
    // An absurd tolerance makes every defect check fail while the order check still passes.
    const auto report = run_suite(Suite::povm, 8, 1, 1e-300);
    EXPECT_FALSE(report.passed());
    EXPECT_THROW(run_suite(Suite::factorization, 65, 0, 1e-10), std::invalid_argument);
    EXPECT_EQ(parse_suite("rk4-order"), Suite::rk4_order);
    EXPECT_FALSE(parse_suite("nope").has_value());
}

TEST(tolerance, environment_override) {
    ::unsetenv(kTolEnvVar);
    EXPECT_EQ(default_tolerance(), 1e-10);
    ::setenv(kTolEnvVar, "2.5e-9", 1);
    EXPECT_EQ(default_tolerance(), 2.5e-9);
    ::setenv(kTolEnvVar, "-1", 1);
    EXPECT_THROW(default_tolerance(), ConfigError);
    ::unsetenv(kTolEnvVar);
}
