#pragma once

// Run configurations and the table/report emitters used by the `dampcount`
// command-line tool. Everything here is independent of argument parsing so the
// CLI surface can be tested without spawning processes.
//
// CSV output has the fixed header `t,n,p,method,xi_effective`, one row per
// (time, count), floats printed with %.17g. JSON output is
//
//   {
//     "tool": "dampcount", "version": "...",
//     "config":  { "state": "number:2", "dim": 8, "xi": 0.8, "kappa": 0.5,
//                  "times": [...], "method": "kraus", "output": "json",
//                  "tol": 1e-10, "seed": 0, "steps": null },
//     "results": [ { "t": ..., "xi_effective": ..., "p": [...],
//                    "defects": { "normalization": ..., "mean_count": ... } } ],
//     "defects": { "max_normalization": ..., "max_mean_count": ... }
//   }
//
// and can be passed back through `--config` to reproduce the run.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dampcount/channel.hpp"
#include "dampcount/photocount.hpp"
#include "dampcount/verify.hpp"
#include "json.hpp"

namespace dampcount::cli {

inline constexpr const char* kToolName = "dampcount";
inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kTolEnvVar = "DAMPCOUNT_TOL";
inline constexpr double kDefaultTol = 1e-10;

/// Invalid run configuration; maps to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Method { kraus, vectorized, factored, ode, analytic, damping_law };
enum class OutputFormat { csv, json };

inline constexpr Method kAllMethods[] = {Method::kraus, Method::vectorized, Method::factored,
                                         Method::ode,   Method::analytic,   Method::damping_law};

inline std::string_view to_string(Method m) {
    switch (m) {
    case Method::kraus: return "kraus";
    case Method::vectorized: return "vectorized";
    case Method::factored: return "factored";
    case Method::ode: return "ode";
    case Method::analytic: return "analytic";
    case Method::damping_law: return "damping-law";
    }
    return "unknown";
}

inline Method parse_method(std::string_view name) {
    for (Method m : kAllMethods) {
        if (to_string(m) == name) {
            return m;
        }
    }
    throw ConfigError("unknown method '" + std::string(name) + "'");
}

inline std::string_view to_string(OutputFormat f) { return f == OutputFormat::csv ? "csv" : "json"; }

inline OutputFormat parse_output(std::string_view name) {
    if (name == "csv") {
        return OutputFormat::csv;
    }
    if (name == "json") {
        return OutputFormat::json;
    }
    throw ConfigError("unknown output format '" + std::string(name) + "'");
}

inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline double parse_double(std::string_view text, std::string_view what) {
    const std::string s(text);
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v)) {
        throw ConfigError("invalid " + std::string(what) + " '" + s + "'");
    }
    return v;
}

/// `number:M`, `coherent:RE,IM` (or `coherent:RE`) and `thermal:NBAR`.
inline StateSpec parse_state_spec(std::string_view text) {
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) {
        throw ConfigError("state must look like kind:value, got '" + std::string(text) + "'");
    }
    const auto kind = text.substr(0, colon);
    const auto value = text.substr(colon + 1);
    if (kind == "number") {
        const double m = parse_double(value, "photon number");
        if (m < 0.0 || m != std::floor(m) || m > 1e6) {
            throw ConfigError("photon number must be a non-negative integer");
        }
        return NumberState{static_cast<unsigned>(m)};
    }
    if (kind == "coherent") {
        const auto comma = value.find(',');
        const double re = parse_double(value.substr(0, comma), "coherent amplitude");
        const double im = comma == std::string_view::npos ? 0.0 : parse_double(value.substr(comma + 1), "coherent amplitude");
        return CoherentState{{re, im}};
    }
    if (kind == "thermal") {
        const double nbar = parse_double(value, "thermal mean photon number");
        if (nbar < 0.0) {
            throw ConfigError("thermal mean photon number must be >= 0");
        }
        return ThermalState{nbar};
    }
    throw ConfigError("unknown state kind '" + std::string(kind) + "'");
}

inline std::string format_state_spec(const StateSpec& spec) {
    struct Formatter {
        std::string operator()(const NumberState& s) const { return "number:" + std::to_string(s.m); }
        std::string operator()(const CoherentState& s) const {
            return "coherent:" + format_double(s.alpha.real()) + "," + format_double(s.alpha.imag());
        }
        std::string operator()(const ThermalState& s) const { return "thermal:" + format_double(s.nbar); }
    };
    return std::visit(Formatter{}, spec);
}

/// `start:stop:step`, inclusive of stop up to rounding.
inline std::vector<double> parse_time_range(std::string_view text) {
    const auto first = text.find(':');
    const auto second = first == std::string_view::npos ? first : text.find(':', first + 1);
    if (second == std::string_view::npos) {
        throw ConfigError("time range must look like start:stop:step, got '" + std::string(text) + "'");
    }
    const double start = parse_double(text.substr(0, first), "range start");
    const double stop = parse_double(text.substr(first + 1, second - first - 1), "range stop");
    const double step = parse_double(text.substr(second + 1), "range step");
    if (!(step > 0.0)) {
        throw ConfigError("range step must be > 0");
    }
    if (stop < start) {
        throw ConfigError("range stop must be >= start");
    }
    const double span = (stop - start) / step;
    if (span > 1e6) {
        throw ConfigError("time range has too many points");
    }
    const auto count = static_cast<std::size_t>(std::floor(span + 1e-9)) + 1;
    std::vector<double> times(count);
    for (std::size_t i = 0; i < count; ++i) {
        times[i] = start + static_cast<double>(i) * step;
    }
    return times;
}

/// Tolerance from DAMPCOUNT_TOL when set, otherwise 1e-10.
inline double default_tolerance() {
    if (const char* env = std::getenv(kTolEnvVar); env != nullptr && *env != '\0') {
        const double tol = parse_double(env, kTolEnvVar);
        if (!(tol > 0.0)) {
            throw ConfigError(std::string(kTolEnvVar) + " must be positive");
        }
        return tol;
    }
    return kDefaultTol;
}

struct RunConfig {
    StateSpec state = NumberState{0};
    std::size_t dim = 16;
    double xi = 1.0;
    double kappa = 0.0;
    std::vector<double> times;
    Method method = Method::kraus;
    OutputFormat output = OutputFormat::csv;
    double tol = kDefaultTol;
    std::uint64_t seed = 0;
    std::optional<std::size_t> steps;
};

inline void validate(const RunConfig& c) {
    if (c.dim < 1 || c.dim > 4096) {
        throw ConfigError("dim must be in [1, 4096]");
    }
    if (!(c.xi >= 0.0 && c.xi <= 1.0)) {
        throw ConfigError("xi must lie in [0, 1]");
    }
    if (!std::isfinite(c.kappa) || c.kappa < 0.0) {
        throw ConfigError("kappa must be finite and >= 0");
    }
    if (c.times.empty()) {
        throw ConfigError("at least one time is required");
    }
    for (double t : c.times) {
        if (!std::isfinite(t) || t < 0.0) {
            throw ConfigError("times must be finite and >= 0");
        }
    }
    if (!(c.tol > 0.0) || !std::isfinite(c.tol)) {
        throw ConfigError("tol must be positive");
    }
    if (c.method == Method::analytic && !std::holds_alternative<NumberState>(c.state)) {
        throw ConfigError("method 'analytic' requires a number state");
    }
    if (c.steps && *c.steps < 1) {
        throw ConfigError("steps must be >= 1");
    }
    if (c.method == Method::vectorized && c.dim > kMaxSuperoperatorDim) {
        throw ConfigError("method 'vectorized' requires dim <= " + std::to_string(kMaxSuperoperatorDim));
    }
}

struct TimeBlock {
    double t = 0.0;
    double xi_effective = 0.0;
    PhotocountDistribution counts;
    double normalization_defect = 0.0;
    /// |sum n p(n) - xi_effective <N>_0|, from the initial state.
    double mean_count_defect = 0.0;
};

inline PhotocountDistribution counts_at(const RunConfig& c, const DensityMatrix& rho0, const ChannelParams& params) {
    const DetectorParams det(c.xi);
    switch (c.method) {
    case Method::kraus: return distribution(apply_kraus(rho0, params), det);
    case Method::vectorized: return distribution(propagate_vectorized(rho0, params), det);
    case Method::factored: return distribution(propagate_factored(rho0, params), det);
    case Method::ode:
        return distribution(integrate_master_equation(rho0, params, c.steps.value_or(default_rk4_steps(params))), det);
    case Method::analytic:
        return analytic_number_damped(std::get<NumberState>(c.state).m, det, params, c.dim);
    case Method::damping_law: return damped_distribution(rho0, det, params);
    }
    throw ConfigError("unhandled method");
}

/// One block per time. Throws TruncationError / ValidationError before any
/// output is produced, so callers never emit partial tables.
inline std::vector<TimeBlock> run_compute(const RunConfig& c) {
    validate(c);
    const DensityMatrix rho0 = realize_state(c.state, c.dim);
    const double mean0 = mean_photon_number(rho0);
    std::vector<TimeBlock> blocks;
    blocks.reserve(c.times.size());
    for (double t : c.times) {
        const ChannelParams params(c.kappa, t);
        TimeBlock b;
        b.t = t;
        b.xi_effective = effective_efficiency(DetectorParams(c.xi), params).xi();
        b.counts = counts_at(c, rho0, params);
        b.normalization_defect = std::abs(b.counts.total() - 1.0);
        b.mean_count_defect = std::abs(b.counts.mean() - b.xi_effective * mean0);
        if (b.normalization_defect > c.tol) {
            throw ValidationError(ValidationKind::probability, b.normalization_defect);
        }
        blocks.push_back(std::move(b));
    }
    return blocks;
}

inline void write_csv(std::ostream& out, const RunConfig& c, const std::vector<TimeBlock>& blocks) {
    out << "t,n,p,method,xi_effective\n";
    for (const auto& b : blocks) {
        for (std::size_t n = 0; n < b.counts.size(); ++n) {
            out << format_double(b.t) << ',' << n << ',' << format_double(b.counts.probs[n]) << ','
                << to_string(c.method) << ',' << format_double(b.xi_effective) << '\n';
        }
    }
}

inline nlohmann::json config_to_json(const RunConfig& c) {
    nlohmann::json j;
    j["state"] = format_state_spec(c.state);
    j["dim"] = c.dim;
    j["xi"] = c.xi;
    j["kappa"] = c.kappa;
    j["times"] = c.times;
    j["method"] = std::string(to_string(c.method));
    j["output"] = std::string(to_string(c.output));
    j["tol"] = c.tol;
    j["seed"] = c.seed;
    j["steps"] = c.steps ? nlohmann::json(*c.steps) : nlohmann::json(nullptr);
    return j;
}

/// Accepts either a bare config object or a full JSON result with a "config" member.
inline RunConfig config_from_json(const nlohmann::json& doc) {
    const nlohmann::json& j = doc.contains("config") ? doc.at("config") : doc;
    if (!j.is_object()) {
        throw ConfigError("config must be a JSON object");
    }
    RunConfig c;
    try {
        if (j.contains("state")) c.state = parse_state_spec(j.at("state").get<std::string>());
        if (j.contains("dim")) c.dim = j.at("dim").get<std::size_t>();
        if (j.contains("xi")) c.xi = j.at("xi").get<double>();
        if (j.contains("kappa")) c.kappa = j.at("kappa").get<double>();
        if (j.contains("times")) c.times = j.at("times").get<std::vector<double>>();
        if (j.contains("method")) c.method = parse_method(j.at("method").get<std::string>());
        if (j.contains("output")) c.output = parse_output(j.at("output").get<std::string>());
        if (j.contains("tol")) c.tol = j.at("tol").get<double>();
        if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("steps") && !j.at("steps").is_null()) c.steps = j.at("steps").get<std::size_t>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    return c;
}

inline nlohmann::json to_json(const RunConfig& c, const std::vector<TimeBlock>& blocks) {
    nlohmann::json doc;
    doc["tool"] = kToolName;
    doc["version"] = kVersion;
    doc["config"] = config_to_json(c);
    auto results = nlohmann::json::array();
    double max_norm = 0.0, max_mean = 0.0;
    for (const auto& b : blocks) {
        results.push_back({{"t", b.t},
                           {"xi_effective", b.xi_effective},
                           {"p", b.counts.probs},
                           {"defects", {{"normalization", b.normalization_defect}, {"mean_count", b.mean_count_defect}}}});
        max_norm = std::max(max_norm, b.normalization_defect);
        max_mean = std::max(max_mean, b.mean_count_defect);
    }
    doc["results"] = std::move(results);
    doc["defects"] = {{"max_normalization", max_norm}, {"max_mean_count", max_mean}};
    return doc;
}

inline void write_table(std::ostream& out, const RunConfig& c, const std::vector<TimeBlock>& blocks) {
    if (c.output == OutputFormat::csv) {
        write_csv(out, c, blocks);
    } else {
        out << to_json(c, blocks).dump(2) << '\n';
    }
}

inline void write_report(std::ostream& out, const VerifyReport& r, OutputFormat format) {
    if (format == OutputFormat::csv) {
        out << "suite,check,value,threshold,status\n";
        for (const auto& c : r.checks) {
            out << to_string(r.suite) << ',' << c.name << ',' << format_double(c.value) << ','
                << format_double(c.threshold) << ',' << (c.passed() ? "pass" : "FAIL") << '\n';
        }
        return;
    }
    nlohmann::json doc;
    doc["tool"] = kToolName;
    doc["version"] = kVersion;
    doc["suite"] = std::string(to_string(r.suite));
    doc["dim"] = r.dim;
    doc["seed"] = r.seed;
    doc["tol"] = r.tol;
    auto checks = nlohmann::json::array();
    for (const auto& c : r.checks) {
        checks.push_back({{"check", c.name},
                          {"value", c.value},
                          {"threshold", c.threshold},
                          {"kind", c.at_least ? "minimum" : "maximum"},
                          {"passed", c.passed()}});
    }
    doc["checks"] = std::move(checks);
    doc["passed"] = r.passed();
    out << doc.dump(2) << '\n';
}

}  // namespace dampcount::cli
