#include "kucb/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>

#include <CLI11.hpp>
#include <json.hpp>

#include "kucb/csv.hpp"
#include "kucb/errors.hpp"
#include "kucb/experiments.hpp"
#include "kucb/svg.hpp"

namespace kucb::cli {

namespace {

using nlohmann::json;

constexpr int kExitPass = 0;
constexpr int kExitSuiteFailure = 1;
constexpr int kExitConfigError = 2;

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config: '" + path + "' is not valid JSON: " + e.what());
    }
    return j;
}

// Applies a dotted-path override, e.g. "seeds.count=200" or
// "kernel.decay_beta=3". Values parse as JSON when possible, else as strings.
void apply_override(json& j, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) {
        throw ConfigError("override '" + assignment + "' is not of the form key=value");
    }
    const std::string path = assignment.substr(0, eq);
    const std::string raw = assignment.substr(eq + 1);
    json value;
    try {
        value = json::parse(raw);
    } catch (const json::exception&) {
        value = raw;
    }
    json* node = &j;
    std::size_t start = 0;
    for (;;) {
        const auto dot = path.find('.', start);
        const std::string key = path.substr(start, dot - start);
        if (key.empty()) throw ConfigError("override '" + assignment + "' has an empty key");
        if (dot == std::string::npos) {
            (*node)[key] = value;
            return;
        }
        node = &(*node)[key];
        start = dot + 1;
    }
}

struct SuiteArgs {
    std::string config_path;
    std::string out_dir;
    std::vector<std::string> overrides;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int verbosity = 0;
};

void add_suite_options(CLI::App* cmd, SuiteArgs& args) {
    cmd->add_option("--config", args.config_path, "experiment config (JSON)")->required();
    const char* env_out = std::getenv("KUCB_OUT");
    args.out_dir = env_out ? env_out : "out";
    cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_option("--set", args.overrides, "config override key=value (repeatable)");
    cmd->add_option("--seed", args.seed, "master seed override")
        ->each([&args](const std::string&) { args.seed_set = true; });
    cmd->add_flag("-v", args.verbosity, "verbose");
}

int run_suite_command(const SuiteArgs& args, const std::set<SuiteKind>& allowed,
                      const std::string& subcommand) {
    json raw = load_json(args.config_path);
    for (const auto& assignment : args.overrides) apply_override(raw, assignment);
    if (args.seed_set) raw["seeds"]["master"] = args.seed;
    ExperimentConfig config = ExperimentConfig::from_json(raw);
    if (!allowed.count(config.kind)) {
        throw ConfigError("subcommand '" + subcommand + "' cannot run suite '" +
                          suite_kind_name(config.kind) + "'");
    }
    const SuiteReport report = run_suite(config, args.out_dir);
    if (args.verbosity > 0) {
        for (const auto& c : report.criteria) {
            std::cout << (c.pass ? "  [pass] " : "  [FAIL] ") << c.name
                      << " value=" << format_double(c.value)
                      << " threshold=" << format_double(c.threshold) << "\n";
        }
    }
    if (report.pass) {
        std::cout << suite_kind_name(config.kind) << ": pass (" << report.criteria.size()
                  << " criteria, artifacts in " << args.out_dir << ")\n";
        return kExitPass;
    }
    std::string failing;
    for (const auto& c : report.criteria) {
        if (!c.pass) failing += (failing.empty() ? "" : ", ") + c.name;
    }
    std::cout << suite_kind_name(config.kind) << ": FAIL [" << failing << "]\n";
    return kExitSuiteFailure;
}

std::vector<double> require_column(const CsvTable& table, const std::string& name) {
    if (table.column(name) < 0) {
        throw ConfigError("plot: input is missing required column '" + name + "'");
    }
    return table.numeric_column(name);
}

int run_plot(const std::string& kind, const std::string& input, const std::string& output) {
    CsvTable table;
    try {
        table = read_csv(input);
    } catch (const InputError& e) {
        throw ConfigError(e.what());
    }
    std::string svg;
    if (kind == "regret") {
        PlotSeries series{"R_t", require_column(table, "t"), require_column(table, "R")};
        PlotOptions options;
        options.title = "cumulative regret";
        options.x_label = "t";
        options.y_label = "R_t";
        svg = render_line_plot({series}, options);
    } else if (kind == "loglog") {
        PlotSeries series{"median R_T", require_column(table, "T"),
                          require_column(table, "median_RT")};
        PlotOptions options;
        options.title = "regret scaling";
        options.x_label = "T";
        options.y_label = "median R_T";
        options.log_x = options.log_y = true;
        options.annotate_slope = true;
        svg = render_line_plot({series}, options);
    } else if (kind == "coverage") {
        const auto deltas = require_column(table, "delta");
        const auto rates = require_column(table, "rate");
        const auto bounds = require_column(table, "bound");
        const int noise_col = table.column("noise");
        std::vector<BarGroup> bars;
        for (std::size_t i = 0; i < deltas.size(); ++i) {
            std::string label = "d=" + format_double(deltas[i]);
            if (noise_col >= 0) label = table.rows[i][noise_col] + " " + label;
            bars.push_back({label, rates[i], bounds[i]});
        }
        PlotOptions options;
        options.title = "crossing rates vs bound";
        options.x_label = "delta";
        options.y_label = "rate";
        svg = render_bar_plot(bars, options);
    } else if (kind == "infogain") {
        PlotSeries hat{"gamma_hat", require_column(table, "t"),
                       require_column(table, "gamma_hat")};
        PlotSeries bound{"gamma_bound", require_column(table, "t"),
                         require_column(table, "gamma_bound")};
        PlotOptions options;
        options.title = "information gain sandwich";
        options.x_label = "t";
        options.y_label = "gamma";
        svg = render_line_plot({hat, bound}, options);
    } else if (kind == "trajectory") {
        PlotSeries stat{"stat", require_column(table, "t"), require_column(table, "stat")};
        PlotSeries radius{"radius_abbasi", require_column(table, "t"),
                          require_column(table, "radius_abbasi")};
        PlotOptions options;
        options.title = "self-normalized statistic vs radius";
        options.x_label = "t";
        options.y_label = "value";
        svg = render_line_plot({stat, radius}, options);
    } else {
        throw ConfigError("plot: unknown kind '" + kind +
                          "' (regret|loglog|coverage|infogain|trajectory)");
    }
    write_text_file(output, svg);
    std::cout << "plot: wrote " << output << "\n";
    return kExitPass;
}

}  // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"kernelized bandit verification toolkit"};
    app.require_subcommand(1);

    SuiteArgs simulate_args, concentration_args, infogain_args, identity_args, compare_args;
    auto* simulate = app.add_subcommand("simulate", "run GP-UCB regret experiments");
    add_suite_options(simulate, simulate_args);
    auto* concentration =
        app.add_subcommand("concentration", "run supermartingale / coverage experiments");
    add_suite_options(concentration, concentration_args);
    auto* infogain = app.add_subcommand("infogain", "run information-gain experiments");
    add_suite_options(infogain, infogain_args);
    auto* identity = app.add_subcommand("identity", "run algebraic identity audits");
    add_suite_options(identity, identity_args);
    auto* compare = app.add_subcommand("compare-radii", "compare confidence radius families");
    add_suite_options(compare, compare_args);

    std::string validate_path;
    auto* validate = app.add_subcommand("validate-config", "validate a config file");
    validate->add_option("config", validate_path, "config file (JSON)")->required();

    std::string plot_kind, plot_in, plot_out;
    auto* plot = app.add_subcommand("plot", "render a CSV artifact as SVG");
    plot->add_option("--kind", plot_kind, "regret|loglog|coverage|infogain|trajectory")
        ->required();
    plot->add_option("--in", plot_in, "input CSV")->required();
    plot->add_option("--out", plot_out, "output SVG")->required();

    std::vector<const char*> argv;
    argv.push_back("kucb");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitConfigError;
    }

    try {
        if (simulate->parsed()) {
            return run_suite_command(simulate_args, {SuiteKind::kRegretScaling}, "simulate");
        }
        if (concentration->parsed()) {
            return run_suite_command(concentration_args,
                                     {SuiteKind::kVilleCoverage, SuiteKind::kSupermartingaleDecay,
                                      SuiteKind::kTruncationConvergence},
                                     "concentration");
        }
        if (infogain->parsed()) {
            return run_suite_command(infogain_args, {SuiteKind::kInfogainSandwich}, "infogain");
        }
        if (identity->parsed()) {
            return run_suite_command(identity_args,
                                     {SuiteKind::kGramIdentity, SuiteKind::kPotentialAudit},
                                     "identity");
        }
        if (compare->parsed()) {
            return run_suite_command(compare_args, {SuiteKind::kRadiusCompare}, "compare-radii");
        }
        if (validate->parsed()) {
            ExperimentConfig::load(validate_path);
            std::cout << "validate-config: " << validate_path << " ok\n";
            return kExitPass;
        }
        if (plot->parsed()) {
            return run_plot(plot_kind, plot_in, plot_out);
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSuiteFailure;
    }
    return kExitConfigError;
}

int run(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args);
}

}  // namespace kucb::cli
