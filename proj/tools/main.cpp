// Command-line frontend: solve, sweep, verify, example.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "indemnify/contracts.hpp"
#include "indemnify/errors.hpp"
#include "indemnify/oracle.hpp"
#include "indemnify/scenario_io.hpp"
#include "indemnify/solver_core.hpp"
#include "indemnify/solver_layers.hpp"

namespace {

using indemnify::MarketScenario;

void emit(const std::string& payload, const std::string& output_path) {
    if (output_path.empty()) {
        std::cout << payload;
        return;
    }
    std::ofstream out(output_path, std::ios::binary);
    if (!out) throw indemnify::Error("cannot write output file " + output_path);
    out << payload;
}

// Reports must carry a contract that passes its own feasibility checks;
// anything else is an internal fault, not a user error.
void revalidate(const MarketScenario& scenario, const indemnify::Contract& contract,
                bool must_be_default_free) {
    if (!indemnify::ic_check(scenario, contract)) {
        throw indemnify::Error("emitted contract failed the incentive-compatibility check");
    }
    if (must_be_default_free && !indemnify::default_free_check(scenario, contract)) {
        throw indemnify::Error("joint-problem contract is not default-free");
    }
    indemnify::require_premium_consistency(scenario, contract);
}

int run_solve(const std::string& scenario_path, const std::string& problem,
              const std::string& output, const std::string& format) {
    MarketScenario scenario = indemnify::load_scenario(scenario_path);
    std::string payload;
    int code = 0;
    if (problem == "joint") {
        indemnify::GlobalSolveReport report = indemnify::solve_global(scenario);
        revalidate(scenario, indemnify::Contract{report.contract}, true);
        payload = format == "csv" ? indemnify::report_to_csv(report)
                                  : indemnify::report_to_json(report).dump(2) + "\n";
        if (!report.assumption_warnings.empty()) code = 2;
    } else {
        indemnify::LayeredSolveReport report = indemnify::solve_layers_global(scenario);
        revalidate(scenario, indemnify::Contract{report.contract}, false);
        std::vector<std::string> assumption_failures;
        if (scenario.background().max_state() > 0.0) {
            assumption_failures = indemnify::check_standing_assumptions(scenario);
        }
        for (const std::string& w : assumption_failures) {
            report.warnings.push_back("assumption: " + w);
        }
        payload = format == "csv" ? indemnify::report_to_csv(report)
                                  : indemnify::report_to_json(report).dump(2) + "\n";
        if (!assumption_failures.empty()) code = 2;
    }
    emit(payload, output);
    return code;
}

std::vector<double> parse_grid(const std::string& text) {
    double lo = 0.0, hi = 0.0;
    long n = 0;
    char c1 = 0, c2 = 0;
    std::istringstream in(text);
    if (!(in >> lo >> c1 >> hi >> c2 >> n) || c1 != ':' || c2 != ':' || !(in >> std::ws).eof()) {
        throw indemnify::ValidationError("grid must be lo:hi:n, got '" + text + "'");
    }
    if (n < 1) throw indemnify::ValidationError("grid needs at least one point");
    std::vector<double> grid(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) {
        grid[static_cast<std::size_t>(i)] =
            n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    return grid;
}

int run_sweep(const std::string& scenario_path, const std::string& axis_name,
              const std::string& grid_text, const std::string& output,
              const std::string& format) {
    MarketScenario scenario = indemnify::load_scenario(scenario_path);
    indemnify::SweepAxis axis;
    if (axis_name == "w") {
        axis = indemnify::SweepAxis::wealth;
    } else if (axis_name == "gamma") {
        axis = indemnify::SweepAxis::gamma;
    } else if (axis_name == "eta") {
        axis = indemnify::SweepAxis::eta;
    } else {
        axis = indemnify::SweepAxis::s_shift;
    }
    indemnify::SweepTable table =
        indemnify::comparative_sweep(scenario, axis, parse_grid(grid_text));
    emit(format == "json" ? indemnify::sweep_to_json(table).dump(2) + "\n"
                          : indemnify::sweep_to_csv(table),
         output);
    return 0;
}

int run_verify(const std::string& scenario_path, const std::string& problem, int trials,
               std::uint64_t seed, int points, bool fresh_seed, const std::string& output) {
    MarketScenario scenario = indemnify::load_scenario(scenario_path);
    if (fresh_seed) {
        std::random_device device;
        seed = (static_cast<std::uint64_t>(device()) << 32) ^ device();
    }
    indemnify::oracle::DominanceVerdict verdict;
    if (problem == "joint") {
        indemnify::GlobalSolveReport report = indemnify::solve_global(scenario);
        verdict = indemnify::oracle::dominance_test_joint(scenario, report, trials, seed, points);
    } else {
        indemnify::LayeredSolveReport report = indemnify::solve_layers_global(scenario);
        verdict =
            indemnify::oracle::dominance_test_schedule(scenario, report, trials, seed, points);
    }
    nlohmann::json doc = {{"problem", problem == "joint" ? "joint" : "loss_only"},
                          {"passed", verdict.passed},
                          {"trials", trials},
                          {"seed", seed},
                          {"points", points},
                          {"baseline", verdict.baseline},
                          {"max_violation", verdict.max_violation},
                          {"counterexample", verdict.counterexample}};
    emit(doc.dump(2) + "\n", output);
    return verdict.passed ? 0 : 1;
}

struct ExampleRow {
    std::string quantity;
    double computed = 0.0;
    double reference = 0.0;
    double tolerance = 0.0;
};

int run_example(int id) {
    MarketScenario scenario = indemnify::builtin_scenario(id);
    std::vector<ExampleRow> rows;
    if (id == 2) {
        indemnify::GlobalSolveReport report = indemnify::solve_global(scenario);
        rows.push_back({"eta_threshold", report.eta_threshold, 0.4669, 5e-4});
    } else {
        indemnify::GlobalSolveReport joint = indemnify::solve_global(scenario);
        rows.push_back({"joint a*", joint.a_star, 1.00, 0.01});
        rows.push_back({"joint d*", joint.d_star, 4.53, 0.01});
        indemnify::LayeredSolveReport layered = indemnify::solve_layers_global(scenario);
        rows.push_back({"loss-only a*", layered.a_star, 0.74, 0.01});
        rows.push_back({"loss-only l1", layered.layers_star[0], 4.60, 0.01});
        rows.push_back({"loss-only l2", layered.layers_star[1], 6.44, 0.01});
        double cap1 = layered.contract.cap(1);
        rows.push_back({"layer 1 exhaust", layered.layers_star[0] + cap1, 7.34, 0.02});
        rows.push_back({"layer 2 attach", layered.layers_star[1] + cap1, 9.18, 0.02});
    }
    bool all_pass = true;
    std::cout << std::left << std::setw(18) << "quantity" << std::right << std::setw(12)
              << "computed" << std::setw(12) << "reference" << std::setw(12) << "tolerance"
              << "  status\n";
    for (const ExampleRow& row : rows) {
        bool pass = std::abs(row.computed - row.reference) <= row.tolerance;
        all_pass = all_pass && pass;
        std::cout << std::left << std::setw(18) << row.quantity << std::right << std::fixed
                  << std::setprecision(4) << std::setw(12) << row.computed << std::setw(12)
                  << row.reference << std::setprecision(1) << std::scientific << std::setw(12)
                  << row.tolerance << "  " << (pass ? "pass" : "FAIL") << "\n";
        std::cout.unsetf(std::ios::floatfield);
    }
    return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Optimal insurance solver with seller default and background risk"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string problem = "joint";
    std::string output;
    std::string format;
    std::string axis = "eta";
    std::string grid = "0:0.5:11";
    int trials = 10000;
    int points = 2048;
    std::uint64_t seed = 1;
    bool fresh_seed = false;
    int example_id = 2;

    CLI::App* solve = app.add_subcommand("solve", "solve one scenario and emit a report");
    solve->add_option("--scenario", scenario_path, "scenario file (JSON)")->required();
    solve->add_option("--problem", problem, "joint or loss-only")
        ->check(CLI::IsMember({"joint", "loss-only"}));
    solve->add_option("--output", output, "output file (default stdout)");
    solve->add_option("--format", format, "json or csv (default json)")
        ->check(CLI::IsMember({"json", "csv"}));

    CLI::App* sweep = app.add_subcommand("sweep", "re-solve along one parameter axis");
    sweep->add_option("--scenario", scenario_path, "scenario file (JSON)")->required();
    sweep->add_option("--axis", axis, "eta, gamma, w, or s_shift")
        ->check(CLI::IsMember({"eta", "gamma", "w", "s_shift"}));
    sweep->add_option("--grid", grid, "lo:hi:n inclusive grid")->required();
    sweep->add_option("--output", output, "output file (default stdout)");
    sweep->add_option("--format", format, "csv or json (default csv)")
        ->check(CLI::IsMember({"json", "csv"}));

    CLI::App* verify = app.add_subcommand("verify", "challenge a solution with sampled contracts");
    verify->add_option("--scenario", scenario_path, "scenario file (JSON)")->required();
    verify->add_option("--problem", problem, "joint or loss-only")
        ->check(CLI::IsMember({"joint", "loss-only"}));
    verify->add_option("--trials", trials, "number of sampled challengers")
        ->check(CLI::PositiveNumber);
    verify->add_option("--seed", seed, "base seed for the challenger stream");
    verify->add_option("--points", points, "loss grid size for the discrete market")
        ->check(CLI::PositiveNumber);
    verify->add_flag("--fresh-seed", fresh_seed, "draw the seed from the OS instead");
    verify->add_option("--output", output, "output file (default stdout)");

    CLI::App* example = app.add_subcommand("example", "reproduce a bundled reference case");
    example->add_option("--id", example_id, "2 or 4")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (solve->parsed()) {
            return run_solve(scenario_path, problem, output,
                             format.empty() ? "json" : format);
        }
        if (sweep->parsed()) {
            return run_sweep(scenario_path, axis, grid, output,
                             format.empty() ? "csv" : format);
        }
        if (verify->parsed()) {
            return run_verify(scenario_path, problem, trials, seed, points, fresh_seed, output);
        }
        if (example_id != 2 && example_id != 4) {
            throw indemnify::ValidationError("example --id must be 2 or 4");
        }
        return run_example(example_id);
    } catch (const indemnify::ParseError& e) {
        std::cerr << nlohmann::json{{"error", "parse"}, {"what", e.what()}}.dump() << "\n";
        return 1;
    } catch (const indemnify::ValidationError& e) {
        std::cerr << nlohmann::json{{"error", "validation"}, {"what", e.what()}}.dump() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << nlohmann::json{{"error", "internal"}, {"what", e.what()}}.dump() << "\n";
        return 1;
    }
}
