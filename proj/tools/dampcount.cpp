// dampcount: photocount distributions of a single mode under amplitude damping.
//
//   dampcount compute --state number:1 --dim 8 --xi 1 --kappa 0.5 --time 0.6931 --method damping-law
//   dampcount sweep   --state number:2 --dim 8 --xi 0.8 --kappa 0.5 --times 0:3:0.5
//   dampcount verify  --suite damping-law --dim 24 --seed 42 --tol 1e-10
//
// Exit codes: 0 success, 1 failed verification check, 2 invalid configuration,
// 3 truncation / validation / convergence failure.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dampcount/cli.hpp"

namespace {

using namespace dampcount;
using namespace dampcount::cli;

constexpr int kExitCheckFailed = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct RunOptions {
    std::string config_path;
    std::string state;
    std::size_t dim = 16;
    double xi = 1.0;
    double kappa = 0.0;
    std::vector<double> times;
    std::string range;
    std::string method = "kraus";
    std::string output = "csv";
    std::string out_path;
    double tol = kDefaultTol;
    std::uint64_t seed = 0;
    std::size_t steps = 0;

    CLI::Option* state_opt = nullptr;
    CLI::Option* dim_opt = nullptr;
    CLI::Option* xi_opt = nullptr;
    CLI::Option* kappa_opt = nullptr;
    CLI::Option* time_opt = nullptr;
    CLI::Option* range_opt = nullptr;
    CLI::Option* method_opt = nullptr;
    CLI::Option* output_opt = nullptr;
    CLI::Option* tol_opt = nullptr;
    CLI::Option* seed_opt = nullptr;
    CLI::Option* steps_opt = nullptr;
};

void add_run_options(CLI::App& cmd, RunOptions& o) {
    cmd.add_option("--config", o.config_path, "JSON config (or a previous JSON result) to start from");
    o.state_opt = cmd.add_option("--state", o.state, "number:M | coherent:RE,IM | thermal:NBAR");
    o.dim_opt = cmd.add_option("--dim", o.dim, "Fock-space truncation dimension D");
    o.xi_opt = cmd.add_option("--xi", o.xi, "detector quantum efficiency in [0, 1]");
    o.kappa_opt = cmd.add_option("--kappa", o.kappa, "dissipation rate");
    o.time_opt = cmd.add_option("--time", o.times, "evolution time(s); repeat or comma-separate")->delimiter(',');
    o.range_opt = cmd.add_option("--times", o.range, "time range start:stop:step (inclusive)");
    o.method_opt = cmd.add_option("--method", o.method, "kraus | vectorized | factored | ode | analytic | damping-law");
    o.output_opt = cmd.add_option("--output", o.output, "csv | json");
    cmd.add_option("--out", o.out_path, "write to this file instead of stdout");
    o.tol_opt = cmd.add_option("--tol", o.tol, "normalization tolerance (default $DAMPCOUNT_TOL or 1e-10)");
    o.seed_opt = cmd.add_option("--seed", o.seed, "random seed (recorded in the config echo)");
    o.steps_opt = cmd.add_option("--steps", o.steps, "RK4 steps for --method ode");
    o.time_opt->excludes(o.range_opt);
}

RunConfig build_config(const RunOptions& o) {
    RunConfig c;
    bool have_state = false;
    if (!o.config_path.empty()) {
        std::ifstream in(o.config_path);
        if (!in) {
            throw ConfigError("cannot open config file '" + o.config_path + "'");
        }
        nlohmann::json doc;
        try {
            in >> doc;
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(std::string("cannot parse config file: ") + e.what());
        }
        c = config_from_json(doc);
        have_state = true;
    } else {
        c.tol = default_tolerance();
    }
    if (o.state_opt->count() > 0) {
        c.state = parse_state_spec(o.state);
        have_state = true;
    }
    if (!have_state) {
        throw ConfigError("--state is required");
    }
    if (o.dim_opt->count() > 0) c.dim = o.dim;
    if (o.xi_opt->count() > 0) c.xi = o.xi;
    if (o.kappa_opt->count() > 0) c.kappa = o.kappa;
    if (o.time_opt->count() > 0) c.times = o.times;
    if (o.range_opt->count() > 0) c.times = parse_time_range(o.range);
    if (o.method_opt->count() > 0) c.method = parse_method(o.method);
    if (o.output_opt->count() > 0) c.output = parse_output(o.output);
    if (o.tol_opt->count() > 0) c.tol = o.tol;
    if (o.seed_opt->count() > 0) c.seed = o.seed;
    if (o.steps_opt->count() > 0) c.steps = o.steps;
    validate(c);
    return c;
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path);
    if (!out) {
        throw ConfigError("cannot open output file '" + out_path + "'");
    }
    out << text;
}

int run_table(const RunOptions& o, bool require_range) {
    const RunConfig c = build_config(o);
    if (require_range && o.range_opt->count() == 0 && o.config_path.empty()) {
        throw ConfigError("sweep requires --times start:stop:step");
    }
    const auto blocks = run_compute(c);
    std::ostringstream text;
    write_table(text, c, blocks);
    emit(text.str(), o.out_path);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Photocount distributions of a single optical mode under amplitude damping"};
    app.set_version_flag("--version", std::string(kToolName) + " " + kVersion);
    app.require_subcommand(1);

    RunOptions compute_opts;
    auto* compute = app.add_subcommand("compute", "count distributions at the given times");
    add_run_options(*compute, compute_opts);

    RunOptions sweep_opts;
    auto* sweep = app.add_subcommand("sweep", "long-format count table over a time range");
    add_run_options(*sweep, sweep_opts);

    std::string suite_name;
    std::size_t verify_dim = 16;
    std::uint64_t verify_seed = 0;
    double verify_tol = kDefaultTol;
    std::string verify_output = "csv";
    std::string verify_out;
    auto* verify = app.add_subcommand("verify", "run a seeded invariant suite");
    verify->add_option("--suite", suite_name,
                       "damping-law | oracles | kraus-completeness | factorization | rk4-order | povm")
        ->required();
    verify->add_option("--dim", verify_dim, "truncation dimension");
    verify->add_option("--seed", verify_seed, "random seed");
    auto* verify_tol_opt = verify->add_option("--tol", verify_tol, "defect threshold");
    verify->add_option("--output", verify_output, "csv | json");
    verify->add_option("--out", verify_out, "write to this file instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (compute->parsed()) {
            return run_table(compute_opts, false);
        }
        if (sweep->parsed()) {
            return run_table(sweep_opts, true);
        }
        const auto suite = parse_suite(suite_name);
        if (!suite) {
            throw ConfigError("unknown suite '" + suite_name + "'");
        }
        const double tol = verify_tol_opt->count() > 0 ? verify_tol : default_tolerance();
        const auto format = parse_output(verify_output);
        const auto report = run_suite(*suite, verify_dim, verify_seed, tol);
        std::ostringstream text;
        write_report(text, report, format);
        emit(text.str(), verify_out);
        return report.passed() ? 0 : kExitCheckFailed;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const TruncationError& e) {
        std::cerr << "truncation error: " << e.what() << " (tail mass " << e.tail_mass() << ")\n";
        return kExitNumerical;
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << to_string(e.kind()) << " defect " << e.defect() << '\n';
        return kExitNumerical;
    } catch (const ConvergenceError& e) {
        std::cerr << "convergence error: " << e.what() << '\n';
        return kExitNumerical;
    }
}
