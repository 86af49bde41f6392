#ifndef INDEMNIFY_SCENARIO_IO_HPP
#define INDEMNIFY_SCENARIO_IO_HPP

#include <filesystem>
#include <string>

#include <json.hpp>

#include "indemnify/market.hpp"
#include "indemnify/solver_core.hpp"
#include "indemnify/solver_layers.hpp"

namespace indemnify {

// Parses a scenario document. Throws ParseError with the offending path
// inside the document, or ValidationError for semantic problems.
MarketScenario parse_scenario(const nlohmann::json& doc);
MarketScenario load_scenario(const std::filesystem::path& file);

nlohmann::json scenario_to_json(const MarketScenario& scenario);

nlohmann::json contract_to_json(const Contract& contract);
nlohmann::json report_to_json(const GlobalSolveReport& report);
nlohmann::json report_to_json(const LayeredSolveReport& report);
nlohmann::json sweep_to_json(const SweepTable& table);

std::string report_to_csv(const GlobalSolveReport& report);
std::string report_to_csv(const LayeredSolveReport& report);
// One row per grid point: axis, a_star, d_star, limit, objective, case.
// Rows that failed to solve carry NA markers.
std::string sweep_to_csv(const SweepTable& table);

std::string to_string(JointCase c);

// Bundled example scenarios: id 2 is the single-background-state market
// with the two-atom Pareto loss; id 4 its two-state variant with loading
// 0.1. Other ids throw ValidationError.
MarketScenario builtin_scenario(int id);

}  // namespace indemnify

#endif
