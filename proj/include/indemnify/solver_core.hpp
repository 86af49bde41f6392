#ifndef INDEMNIFY_SOLVER_CORE_HPP
#define INDEMNIFY_SOLVER_CORE_HPP

#include <string>
#include <vector>

#include "indemnify/contracts.hpp"
#include "indemnify/market.hpp"

namespace indemnify {

// Which branch produced the joint-problem solution.
enum class JointCase { eta_zero, interior, no_insurance };

struct JointResiduals {
    double g_at_abar = 0.0;     // threshold-premium equation at a_bar
    double g_a_at_d = 0.0;      // deductible equation at (a_star, d_star)
    double foc_at_astar = 0.0;  // premium first-order condition at a_star
};

struct JointIterations {
    int a_bar = 0;
    int deductible = 0;
    int a_star = 0;
};

struct GlobalSolveReport {
    JointCase case_taken = JointCase::no_insurance;
    double a_star = 0.0;
    double d_star = 0.0;
    double a_bar = 0.0;
    double eta_threshold = 0.0;
    DeductibleLimitContract contract;
    double objective = 0.0;
    JointResiduals residuals;
    JointIterations iterations;
    bool threshold_tie = false;  // loading coincided with the threshold within 1e-12
    std::vector<std::string> assumption_warnings;
    std::vector<std::string> warnings;
};

// (1 + eta) * E[X].
double full_premium(const MarketScenario& scenario);

// Residual of the threshold-premium equation:
// (1 + eta) * E[X - (X - (S + a)^+)^+] - a. Positive while raising the
// premium still buys more expected coverage than it costs.
double premium_gap(const MarketScenario& scenario, double a);

// Largest premium worth paying: smallest root of premium_gap, or 0 when
// premium_gap(0) <= 0.
double threshold_premium(const MarketScenario& scenario, int* iterations = nullptr);

// Residual of the deductible equation at premium a:
// (1 + eta) * E[(X - y)^+ - (X - y - (S + a)^+)^+] - a, nonincreasing in y.
double deductible_gap(const MarketScenario& scenario, double a, double y);

// Deductible funding the premium a: smallest root of the deductible
// equation; max_loss when a == 0. When the standing assumptions fail the
// root is located by a 512-point scan first (set scan_first).
double solve_deductible(const MarketScenario& scenario, double a, int* iterations = nullptr,
                        bool scan_first = false);

// Loading level above which no contract beats staying uninsured:
// u'(w - M) / E[u'(w - X)] - 1.
double loading_threshold(const MarketScenario& scenario);

// First-order condition in the premium, increasing in a:
// E[u'(w - min(X, d(a)) - a)] - u'(w - d(a) - a) / (1 + eta).
double premium_foc(const MarketScenario& scenario, double a);

// Root of premium_foc on (0, a_bar).
double solve_optimal_premium(const MarketScenario& scenario, double a_bar,
                             int* iterations = nullptr);

// d'(a) by the ratio of layer probabilities. Throws DegenerateDenominator
// when the moving layer carries probability below 1e-12.
double deductible_sensitivity(const MarketScenario& scenario, double a);

// Full pipeline for the joint problem: dispatches on the background sign,
// the loading level, and otherwise solves the interior first-order
// condition. Assumption checks are advisory and land in the report.
GlobalSolveReport solve_global(const MarketScenario& scenario);

enum class SweepAxis { wealth, gamma, eta, s_shift };

struct SweepRow {
    double axis_value = 0.0;
    bool ok = false;
    std::string error;
    GlobalSolveReport report;
};

struct SweepVerdict {
    std::string property;
    bool pass = false;
};

struct SweepTable {
    SweepAxis axis = SweepAxis::eta;
    std::vector<SweepRow> rows;
    std::vector<SweepVerdict> verdicts;
};

// Re-solves the joint problem along one scenario axis and records the
// monotonicity of premium, deductible, and total cover across rows.
SweepTable comparative_sweep(const MarketScenario& scenario, SweepAxis axis,
                             const std::vector<double>& grid);

}  // namespace indemnify

#endif
