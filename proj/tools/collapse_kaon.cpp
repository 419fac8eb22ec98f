#include "collapse_kaon/commands.hpp"
#include "collapse_kaon/config.hpp"
#include "collapse_kaon/validation.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace collapse_kaon;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitOverflow = 3;

struct Overrides {
    std::string config_path;
    std::vector<double> theta;
    std::string scheme;
    std::optional<std::size_t> trajectories;
    std::optional<double> dt;
    std::optional<std::uint64_t> seed;
    std::optional<double> t_max;
    std::optional<int> steps;
    std::string out;
    std::string format;
};

void add_run_flags(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config_path, "JSON run configuration")->check(CLI::ExistingFile);
    cmd->add_option("--theta", o.theta, "theta0 value (repeatable)")->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--scheme", o.scheme, "left | midpoint | right | exact | auto");
    cmd->add_option("--trajectories", o.trajectories, "Monte Carlo trajectories");
    cmd->add_option("--dt", o.dt, "time step");
    cmd->add_option("--seed", o.seed, "master seed");
    cmd->add_option("--t-max", o.t_max, "final time");
    cmd->add_option("--steps", o.steps, "number of output intervals");
    cmd->add_option("--out", o.out, "output path, - for stdout");
    cmd->add_option("--format", o.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunConfig build_config(const Overrides& o) {
    RunConfig c = o.config_path.empty() ? RunConfig{} : parse_config(read_file(o.config_path));
    if (!o.theta.empty()) c.theta0 = o.theta;
    if (!o.scheme.empty()) {
        if (o.scheme == "auto") {
            c.scheme.reset();
        } else {
            try {
                c.scheme = montecarlo::parse_scheme(o.scheme);
            } catch (const std::invalid_argument& e) {
                throw ConfigError(e.what());
            }
        }
    }
    if (o.trajectories) c.trajectories = *o.trajectories;
    if (o.dt) c.dt = *o.dt;
    if (o.seed) c.master_seed = *o.seed;
    if (o.t_max) c.t_max = *o.t_max;
    if (o.steps) c.t_steps = *o.steps;
    if (!o.out.empty()) c.output_path = o.out;
    if (!o.format.empty()) c.format = o.format == "json" ? OutputFormat::Json : OutputFormat::Csv;
    c.validate();
    return c;
}

void write_output(const std::string& path, const std::string& text) {
    if (path == "-") {
        std::cout << text << std::flush;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Collapse-noise corrections to neutral kaon oscillation"};
    app.require_subcommand(1);

    Overrides o;
    auto* compare = app.add_subcommand("compare", "analytic vs assembled vs Monte Carlo");
    add_run_flags(compare, o);
    std::string breakdown;
    compare->add_option("--breakdown", breakdown, "also write per-term assembly CSV");

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo time series");
    add_run_flags(simulate, o);

    auto* sweep = app.add_subcommand("sweep-theta", "coefficients across theta0");
    add_run_flags(sweep, o);

    auto* wick_table = app.add_subcommand("wick-table", "exact Wick integrals as CSV");
    int max_order = 4;
    std::string wick_out = "-";
    wick_table->add_option("--max-order", max_order, "largest total order")->check(CLI::Range(0, 8));
    wick_table->add_option("--out", wick_out, "output path, - for stdout");

    auto* validate = app.add_subcommand("validate", "run the acceptance suite");
    std::string report_path = "validation_report.json";
    validation::ValidationOptions vopt;
    validate->add_option("--out", report_path, "JSON report path");
    validate->add_option("--trajectories", vopt.mc_trajectories,
                         "trajectories per scheme in the Monte Carlo criterion");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*compare) {
            const RunConfig c = build_config(o);
            write_output(c.output_path, cli::render(cli::cmd_compare(c), c.format));
            if (!breakdown.empty()) write_output(breakdown, cli::compare_breakdown(c).to_csv());
        } else if (*simulate) {
            const RunConfig c = build_config(o);
            write_output(c.output_path, cli::render(cli::cmd_simulate(c), c.format));
        } else if (*sweep) {
            const RunConfig c = build_config(o);
            write_output(c.output_path, cli::render(cli::cmd_sweep_theta(c), c.format));
        } else if (*wick_table) {
            write_output(wick_out, cli::cmd_wick_table(max_order).to_csv());
        } else if (*validate) {
            std::vector<validation::CriterionResult> results;
            for (int id = 1; id <= validation::kCriterionCount; ++id) {
                results.push_back(validation::run_criterion(id, vopt));
                std::cout << validation::format_line(results.back()) << std::endl;
            }
            write_output(report_path, validation::report_json(results));
            const bool ok = validation::all_passed(results);
            std::cout << (ok ? "all criteria passed" : "some criteria FAILED") << std::endl;
            return ok ? 0 : kExitFailure;
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const montecarlo::OverflowError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitOverflow;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return 0;
}
