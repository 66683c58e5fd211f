#include "app.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "singbsde/assemble.hpp"
#include "singbsde/bsde.hpp"
#include "singbsde/config_io.hpp"
#include "singbsde/csv.hpp"
#include "singbsde/errors.hpp"
#include "singbsde/finance.hpp"
#include "singbsde/paths.hpp"
#include "singbsde/selftest.hpp"

#ifndef SINGBSDE_VERSION
#define SINGBSDE_VERSION "unknown"
#endif

namespace singbsde::app {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

struct Options {
    std::string config_path;
    std::string out_dir = "./out";
    std::string levels = "1,2,10,50";
    double wealth = 1.0;
    std::size_t path_index = 0;
    unsigned threads = 0;
    bool dump_paths = false;
    std::uint64_t tau_seed = 0;
    bool tau_seed_set = false;
    double tolerance_scale = 1.0;
};

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::vector<int> parse_levels(const std::string& text) {
    std::vector<int> levels;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (item.empty()) continue;
        try {
            std::size_t used = 0;
            levels.push_back(std::stoi(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw UsageError("--levels: '" + item + "' is not an integer");
        }
    }
    if (levels.empty()) throw UsageError("--levels needs at least one truncation level");
    return levels;
}

json config_json(const ProblemConfig& config) {
    json j = json::object();
    std::istringstream in(format_config(config));
    std::string line;
    while (std::getline(in, line)) {
        const auto eq = line.find(" = ");
        if (eq != std::string::npos) j[line.substr(0, eq)] = line.substr(eq + 3);
    }
    return j;
}

// Output files are recorded as they are written; the manifest comes last.
class Run {
public:
    Run(std::string subcommand, const Options& options, const ValidatedConfig& config)
        : dir_(options.out_dir), start_(std::chrono::steady_clock::now()) {
        fs::create_directories(dir_);
        manifest_["subcommand"] = std::move(subcommand);
        manifest_["version"] = SINGBSDE_VERSION;
        manifest_["seed"] = config.discretization().seed;
        manifest_["threads"] = options.threads;
        manifest_["config"] = config_json(config.config());
        manifest_["warnings"] = config.warnings();
    }

    template <class Fn>
    void write(const std::string& name, Fn&& fn) {
        const auto path = dir_ / name;
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + path.string());
        fn(out);
        out.close();
        if (!out) throw std::runtime_error("error while writing " + path.string());
        outputs_.push_back(name);
    }

    json& results() { return manifest_["results"]; }
    json& manifest() { return manifest_; }

    void finish() {
        const std::chrono::duration<double> wall = std::chrono::steady_clock::now() - start_;
        manifest_["outputs"] = outputs_;
        manifest_["wall_time_seconds"] = wall.count();
        const auto tmp = dir_ / "manifest.json.tmp";
        {
            std::ofstream out(tmp, std::ios::binary);
            out << manifest_.dump(2) << '\n';
            if (!out) throw std::runtime_error("cannot write " + tmp.string());
        }
        fs::rename(tmp, dir_ / "manifest.json");
    }

private:
    fs::path dir_;
    std::chrono::steady_clock::time_point start_;
    json manifest_;
    std::vector<std::string> outputs_;
};

ValidatedConfig load(const Options& options) {
    if (!fs::exists(options.config_path)) {
        throw UsageError("config file not found: " + options.config_path);
    }
    auto config = load_config(options.config_path);
    config.execution.threads = options.threads;
    return validate(config);
}

void check_path_index(const Options& options, const ValidatedConfig& config) {
    if (options.path_index >= config.n_paths()) {
        throw UsageError("--path-index must be below n_paths = " +
                         std::to_string(config.n_paths()));
    }
}

DefaultSample default_for_path(const ValidatedConfig& config, const Options& options, int n) {
    const std::uint64_t seed = options.tau_seed_set ? options.tau_seed : config.discretization().seed;
    return sample_default_time(config.intensity(), draw_default_clock(seed, options.path_index), n,
                               config.market().maturity);
}

json solution_json(const TruncatedBsdeSolution& s) {
    return json{{"n", s.truncation_n},
                {"y0", s.y0},
                {"picard_iters", s.picard_iters_used},
                {"picard_residuals", s.picard_residuals},
                {"ridge_fallbacks", s.ridge_fallbacks}};
}

int cmd_solve(const Options& options, std::ostream& out) {
    const auto config = load(options);
    check_path_index(options, config);
    const int n = config.intensity().truncation_n;
    check_truncation_level(n, config.dt());
    Run run("solve", options, config);
    const auto ensemble = generate_ensemble(config);
    const auto solution = solve_truncated(config, ensemble, n);
    const auto& grid = config.grid();
    run.write("bsde_n" + std::to_string(n) + ".csv", [&](std::ostream& f) {
        write_bsde_path_csv(f, solution, grid, options.path_index);
    });
    const auto g = assemble_g_solution(config, solution, ensemble, options.path_index,
                                       default_for_path(config, options, n));
    run.write("assemble_n" + std::to_string(n) + ".csv",
              [&](std::ostream& f) { write_g_solution_csv(f, g, grid); });
    if (options.dump_paths) {
        run.write("paths.csv", [&](std::ostream& f) { write_paths_csv(f, ensemble, grid); });
    }
    run.results() = solution_json(solution);
    run.results()["path_index"] = options.path_index;
    run.results()["tau_n"] = g.tau_n;
    run.results()["xi_a_at_tau"] = g.post_default_value;
    run.finish();
    out << "n=" << n << " y0=" << csv::number(solution.y0) << " picard_iters="
        << solution.picard_iters_used << '\n';
    return kOk;
}

int cmd_sweep(const Options& options, std::ostream& out) {
    const auto levels = parse_levels(options.levels);
    const auto config = load(options);
    Run run("sweep", options, config);
    const auto result = sweep(config, levels, options.wealth);
    run.write("sweep.csv", [&](std::ostream& f) { write_sweep_csv(f, result); });
    run.write("sweep_stats.csv", [&](std::ostream& f) { write_sweep_stats_csv(f, result); });
    json rows = json::array();
    for (const auto& r : result.rows) {
        rows.push_back({{"n", r.n},
                        {"p_n", r.p_n},
                        {"y0", r.y0},
                        {"y0_zero", r.y0_zero},
                        {"V", r.value},
                        {"P_n", r.price},
                        {"y0_se", r.y0_se},
                        {"P_n_se", r.price_se}});
    }
    run.results() = {{"wealth", result.wealth}, {"rows", rows}};
    for (const auto& w : result.warnings) run.manifest()["warnings"].push_back(w);
    run.finish();
    for (const auto& w : result.warnings) out << "warning: " << w << '\n';
    for (const auto& r : result.rows) {
        out << "n=" << r.n << " p_n=" << csv::number(r.p_n) << " y0=" << csv::number(r.y0)
            << " P_n=" << csv::number(r.price) << '\n';
    }
    return kOk;
}

int cmd_strategy(const Options& options, std::ostream& out) {
    const auto config = load(options);
    check_path_index(options, config);
    const int n = config.intensity().truncation_n;
    check_truncation_level(n, config.dt());
    Run run("strategy", options, config);
    const auto ensemble = generate_ensemble(config);
    const auto solution = solve_truncated(config, ensemble, n);
    const auto classical = n == 0 ? solution : solve_truncated(config, ensemble, 0);
    const auto sample = default_for_path(config, options, n);
    const auto g = assemble_g_solution(config, solution, ensemble, options.path_index, sample);

    const auto& market = config.market();
    const auto& grid = config.grid();
    const auto row = static_cast<Eigen::Index>(options.path_index);
    const auto steps = static_cast<Eigen::Index>(config.n_steps());
    std::vector<double> z0(static_cast<std::size_t>(steps));
    for (Eigen::Index k = 0; k < steps; ++k) z0[static_cast<std::size_t>(k)] = classical.Z(row, k);

    // Nothing is invested from the default time on.
    auto p_star = optimal_strategy(g.Z, market.theta, market.risk_aversion, config.constraint(),
                                   g.tau_n, grid);
    for (std::size_t k = 0; k < p_star.size(); ++k) {
        if (g.after_default[k]) p_star[k] = 0.0;
    }
    const auto p_nodefault = optimal_strategy(z0, market.theta, market.risk_aversion,
                                              config.constraint(), market.maturity, grid);
    std::vector<double> dw(static_cast<std::size_t>(steps));
    for (Eigen::Index k = 0; k < steps; ++k) dw[static_cast<std::size_t>(k)] = ensemble.dW(row, k);
    const auto wealth = simulate_wealth(p_star, dw, market.theta[0], config.dt(), options.wealth);

    run.write("strategy.csv",
              [&](std::ostream& f) { write_strategy_csv(f, grid, p_star, p_nodefault); });
    run.write("wealth.csv", [&](std::ostream& f) { write_wealth_csv(f, grid, wealth); });
    run.write("assemble_n" + std::to_string(n) + ".csv",
              [&](std::ostream& f) { write_g_solution_csv(f, g, grid); });
    run.results() = {{"n", n},
                     {"path_index", options.path_index},
                     {"tau_n", g.tau_n},
                     {"defaulted", g.defaulted},
                     {"xi_a_at_tau", g.post_default_value},
                     {"y0", solution.y0},
                     {"y0_nodefault", classical.y0},
                     {"terminal_wealth", wealth.back()}};
    run.finish();
    out << "n=" << n << " tau_n=" << csv::number(g.tau_n) << " xi_a(tau)="
        << csv::number(g.post_default_value) << '\n';
    return kOk;
}

int cmd_selftest(const Options& options, std::ostream& out) {
    const auto config = load(options);
    Run run("selftest", options, config);
    const auto reports = run_selftest(config, options.tolerance_scale);
    run.write("selftest.csv", [&](std::ostream& f) { write_reports_csv(f, reports); });
    print_reports(out, reports);
    bool all = true;
    json list = json::array();
    for (const auto& r : reports) {
        all = all && r.pass;
        list.push_back({{"name", r.name}, {"abs_error", r.abs_error}, {"tolerance", r.tolerance},
                        {"pass", r.pass}});
    }
    run.results() = {{"all_pass", all}, {"reports", list}};
    run.finish();
    return all ? kOk : kSelftestFailed;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App cli{"Monte Carlo solver for utility maximization with a singular default horizon"};
    cli.require_subcommand(1);
    cli.name(args.empty() ? "singbsde" : std::filesystem::path(args.front()).filename().string());
    Options options;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", options.config_path, "key = value configuration file")->required();
        sub->add_option("--out", options.out_dir, "output directory")->capture_default_str();
        sub->add_option("--threads", options.threads, "worker threads, 0 = auto");
    };
    auto* solve = cli.add_subcommand("solve", "solve the truncated BSDE and dump one path");
    common(solve);
    solve->add_option("--path-index", options.path_index, "path written to the CSV");
    solve->add_flag("--dump-paths", options.dump_paths, "also write paths.csv for every path");
    solve->add_option("--tau-seed", options.tau_seed, "seed of the default clock")
        ->each([&](const std::string&) { options.tau_seed_set = true; });

    auto* sweep_cmd = cli.add_subcommand("sweep", "y0, value and indifference price per level");
    common(sweep_cmd);
    sweep_cmd->add_option("--levels", options.levels, "comma-separated truncation levels")
        ->capture_default_str();
    sweep_cmd->add_option("--wealth", options.wealth, "initial wealth x")->capture_default_str();

    auto* strategy = cli.add_subcommand("strategy", "optimal strategy along one path");
    common(strategy);
    strategy->add_option("--path-index", options.path_index, "path to follow");
    strategy->add_option("--wealth", options.wealth, "initial wealth x")->capture_default_str();
    strategy->add_option("--tau-seed", options.tau_seed, "seed of the default clock")
        ->each([&](const std::string&) { options.tau_seed_set = true; });

    auto* selftest = cli.add_subcommand("selftest", "compare the solver against the oracles");
    common(selftest);
    selftest->add_option("--tolerance-scale", options.tolerance_scale,
                         "multiplier applied to every tolerance")
        ->check(CLI::NonNegativeNumber);

    try {
        std::vector<std::string> rest(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
        cli.parse(rest);
    } catch (const CLI::CallForHelp&) {
        out << cli.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n' << cli.help();
        return kUsage;
    }

    try {
        if (*solve) return cmd_solve(options, out);
        if (*sweep_cmd) return cmd_sweep(options, out);
        if (*strategy) return cmd_strategy(options, out);
        return cmd_selftest(options, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const ValidationError& e) {
        err << "configuration error (" << e.field() << "): " << e.what() << '\n';
        return kUsage;
    } catch (const ResourceError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const ConvergenceError& e) {
        err << "non-convergence: " << e.what() << "\nresiduals:";
        for (double r : e.residuals()) err << ' ' << csv::number(r);
        err << '\n';
        return kNonConvergence;
    } catch (const RegressionError& e) {
        err << "regression failed at time index " << e.time_index() << ": " << e.what() << '\n';
        return kNonConvergence;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kFailure;
    }
}

}  // namespace singbsde::app
