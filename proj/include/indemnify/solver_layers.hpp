#ifndef INDEMNIFY_SOLVER_LAYERS_HPP
#define INDEMNIFY_SOLVER_LAYERS_HPP

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "indemnify/contracts.hpp"
#include "indemnify/market.hpp"

namespace indemnify {

// Which branch produced the loss-only inner solution at the optimal
// premium. case_1/2/3 come from the two-state closed-form analysis;
// single_state is the one-state premium-pinned root; numeric_inner marks
// the best-effort coordinate descent; no_insurance the degenerate market.
enum class LayerCase { case_1, case_2, case_3, single_state, numeric_inner, no_insurance };

std::string to_string(LayerCase c);

struct DefaultStateInfo {
    double state = 0.0;
    // Loss level beyond which the contract defaults in this state; empty
    // when it never does.
    std::optional<double> threshold;
};

struct LayeredSolveReport {
    double a_bar_N = 0.0;  // premium upper bound from the top background state
    double a_star = 0.0;  // optimal premium
    std::vector<double> layers_star;
    LayerCase case_taken = LayerCase::no_insurance;
    // Two-state analytic bounds: smallest admissible first attachment and
    // the matching second attachment at the premium constraint.
    double underline_l1 = 0.0;
    double overline_l2 = 0.0;
    MultiLayerContract contract;
    double objective = 0.0;
    double fixed_point_residual = 0.0;  // pricing the contract minus its premium
    std::vector<DefaultStateInfo> default_states;
    int outer_scan_ties = 0;  // scan points whose objective ties the best within 1e-6
    std::vector<std::string> warnings;
};

// Upper bound on useful premiums when only the top background state can
// fund the widest layer: root of (1+eta) * E[X - (X - (s_N + a))^+] - a.
// Requires s_N > 0.
double premium_upper_bound(const MarketScenario& scenario);

// Premium solving a = (1 + eta) * E[I(X; a, layers)] for fixed attachment
// offsets; the caps inside the contract move with the premium.
double premium_fixed_point(const MarketScenario& scenario, std::span<const double> layers);

struct TwoStateSolution {
    double l1 = 0.0;
    double l2 = 0.0;
    LayerCase case_taken = LayerCase::case_1;
    double underline_l1 = 0.0;
    double overline_l2 = 0.0;
};

// Closed-form two-state inner solution at premium a (full recovery only):
// case 1 merges the layers when the low state cannot fund anything, case 2
// pins the corner, case 3 solves the interior first-order condition.
TwoStateSolution solve_two_state_at_premium(const MarketScenario& scenario, double a);

// Full loss-only pipeline: outer golden-section search over the premium
// seeded by a 64-cell scan, inner solutions from the closed forms (or a
// flagged coordinate descent for three states or partial recovery).
LayeredSolveReport solve_layers_global(const MarketScenario& scenario);

}  // namespace indemnify

#endif
