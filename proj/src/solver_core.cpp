#include "indemnify/solver_core.hpp"

#include <cmath>
#include <string>

#include "indemnify/errors.hpp"
#include "indemnify/parallel.hpp"
#include "indemnify/rootfind.hpp"

namespace indemnify {

namespace {

constexpr double kThresholdTieTol = 1e-12;

double positive_part(double v) { return v > 0.0 ? v : 0.0; }

}  // namespace

double full_premium(const MarketScenario& scenario) { return scenario.full_premium(); }

double premium_gap(const MarketScenario& scenario, double a) {
    return (1.0 + scenario.loading()) * mixed_layer_expectation(scenario, 0.0, a) - a;
}

double threshold_premium(const MarketScenario& scenario, int* iterations) {
    if (iterations) *iterations = 0;
    double cap = full_premium(scenario);
    auto gap = [&](double a) { return premium_gap(scenario, a); };
    if (gap(0.0) <= 0.0) return 0.0;
    // The gap is positive at 0 and nonpositive at the full premium. With
    // mixed-sign background states it need not be concave, so locate the
    // first sign change on a scan before bisecting.
    double lo = 0.0, hi = cap;
    if (scenario.background().min_state() < 0.0) {
        const int cells = 512;
        for (int i = 1; i <= cells; ++i) {
            double a = cap * i / cells;
            if (gap(a) <= 0.0) {
                lo = cap * (i - 1) / cells;
                hi = a;
                break;
            }
        }
    }
    RootResult r = bisect_leftmost(gap, lo, hi);
    if (iterations) *iterations = r.iterations;
    return r.root;
}

double deductible_gap(const MarketScenario& scenario, double a, double y) {
    return (1.0 + scenario.loading()) * mixed_layer_expectation(scenario, y, a) - a;
}

double solve_deductible(const MarketScenario& scenario, double a, int* iterations,
                        bool scan_first) {
    if (iterations) *iterations = 0;
    double M = scenario.loss().max_loss();
    if (a <= 0.0) return M;
    auto gap = [&](double y) { return deductible_gap(scenario, a, y); };
    double at_zero = gap(0.0);
    if (at_zero < -1e-9) {
        throw AssumptionViolation("deductible equation already negative at y = 0 (gap " +
                                  std::to_string(at_zero) + "); premium exceeds the threshold");
    }
    if (at_zero <= 0.0) return 0.0;
    double lo = 0.0, hi = M;
    if (scan_first) {
        const int cells = 512;
        for (int i = 1; i <= cells; ++i) {
            double y = M * i / cells;
            if (gap(y) <= 0.0) {
                lo = M * (i - 1) / cells;
                hi = y;
                break;
            }
        }
    }
    RootResult r = bisect_leftmost(gap, lo, hi);
    if (iterations) *iterations = r.iterations;
    return r.root;
}

double loading_threshold(const MarketScenario& scenario) {
    const UtilityModel& u = scenario.utility();
    double w = scenario.wealth();
    double expected = expect_piecewise(scenario.loss(),
                                       [&](double x) { return u.u_prime(w - x); });
    return u.u_prime(w - scenario.loss().max_loss()) / expected - 1.0;
}

double premium_foc(const MarketScenario& scenario, double a) {
    const UtilityModel& u = scenario.utility();
    double w = scenario.wealth();
    double d = solve_deductible(scenario, a);
    const double kink[] = {d};
    double expected = expect_piecewise(
        scenario.loss(), [&](double x) { return u.u_prime(w - std::min(x, d) - a); }, kink);
    return expected - u.u_prime(w - d - a) / (1.0 + scenario.loading());
}

double solve_optimal_premium(const MarketScenario& scenario, double a_bar, int* iterations) {
    auto foc = [&](double a) { return premium_foc(scenario, a); };
    double f_lo = foc(0.0);
    double f_hi = foc(a_bar);
    if (!(f_lo < 0.0) || !(f_hi > 0.0)) {
        throw BracketFailure("premium FOC not bracketed on [0, a_bar]: foc(0)=" +
                             std::to_string(f_lo) + ", foc(a_bar)=" + std::to_string(f_hi));
    }
    RootResult r = bisect(foc, 0.0, a_bar, f_lo, f_hi);
    if (iterations) *iterations = r.iterations;
    return r.root;
}

double deductible_sensitivity(const MarketScenario& scenario, double a) {
    double d = solve_deductible(scenario, a);
    const LossDistribution& loss = scenario.loss();
    double loaded = 1.0 + scenario.loading();
    double above = 0.0, inside = 0.0;
    for (const BackgroundPoint& p : scenario.background().points()) {
        double exhaust = d + p.value + a;
        above += p.probability * survival(loss, exhaust);
        inside += p.probability * (cdf(loss, exhaust) - cdf(loss, d));
    }
    double denominator = loaded * inside;
    if (std::abs(denominator) < 1e-12) {
        throw DegenerateDenominator("no loss mass between deductible and exhaust at premium " +
                                    std::to_string(a));
    }
    return (loaded * above - 1.0) / denominator;
}

GlobalSolveReport solve_global(const MarketScenario& scenario) {
    GlobalSolveReport report;
    if (scenario.background().max_state() > 0.0) {
        // With every background state nonpositive the zero contract is
        // exact whatever the assumptions say, so the advisory checks only
        // run for markets that can fund a reserve.
        report.assumption_warnings = check_standing_assumptions(scenario);
    }
    bool assumptions_ok = report.assumption_warnings.empty();
    double M = scenario.loss().max_loss();

    report.eta_threshold = loading_threshold(scenario);
    report.a_bar = threshold_premium(scenario, &report.iterations.a_bar);
    report.residuals.g_at_abar = premium_gap(scenario, report.a_bar);

    double eta = scenario.loading();
    if (scenario.background().max_state() <= 0.0) {
        // The seller can never hold a positive reserve, so no admissible
        // contract pays anything.
        report.case_taken = JointCase::no_insurance;
        report.a_star = 0.0;
        report.d_star = M;
    } else if (eta == 0.0) {
        // Actuarially fair pricing: buy the largest useful contract, with
        // no deductible.
        report.case_taken = JointCase::eta_zero;
        report.a_star = report.a_bar;
        report.d_star = 0.0;
    } else if (eta >= report.eta_threshold - kThresholdTieTol) {
        report.case_taken = JointCase::no_insurance;
        report.threshold_tie = std::abs(eta - report.eta_threshold) <= kThresholdTieTol;
        report.a_star = 0.0;
        report.d_star = M;
    } else {
        report.case_taken = JointCase::interior;
        report.a_star =
            solve_optimal_premium(scenario, report.a_bar, &report.iterations.a_star);
        report.d_star = solve_deductible(scenario, report.a_star, &report.iterations.deductible,
                                         !assumptions_ok);
        if (!assumptions_ok) {
            report.warnings.push_back(
                "deductible located by scan-first search because a standing assumption "
                "failed");
        }
    }

    report.residuals.g_a_at_d = deductible_gap(scenario, report.a_star, report.d_star);
    if (report.case_taken == JointCase::interior) {
        report.residuals.foc_at_astar = premium_foc(scenario, report.a_star);
    }

    report.contract = DeductibleLimitContract{report.d_star, report.a_star};
    Contract wrapped = report.contract;
    require_premium_consistency(scenario, wrapped);
    report.objective = expected_utility(scenario, wrapped);
    return report;
}

namespace {

MarketScenario scenario_on_axis(const MarketScenario& base, SweepAxis axis, double value) {
    switch (axis) {
        case SweepAxis::wealth:
            return base.with_wealth(value);
        case SweepAxis::gamma:
            return base.with_utility(UtilityModel::power(value));
        case SweepAxis::eta:
            return base.with_loading(value);
        case SweepAxis::s_shift:
        default:
            return base.with_background(base.background().shifted(value));
    }
}

// Monotonicity over the rows that solved, with slack for solver tolerance.
enum class Direction { nonincreasing, nondecreasing };

SweepVerdict check_monotone(const SweepTable& table, const std::string& name,
                            double (*pick)(const GlobalSolveReport&), Direction dir) {
    const double slack = 1e-7;
    bool pass = true;
    const GlobalSolveReport* prev = nullptr;
    for (const SweepRow& row : table.rows) {
        if (!row.ok) continue;
        if (prev) {
            double lhs = pick(*prev), rhs = pick(row.report);
            if (dir == Direction::nondecreasing && rhs < lhs - slack) pass = false;
            if (dir == Direction::nonincreasing && rhs > lhs + slack) pass = false;
        }
        prev = &row.report;
    }
    return {name, pass};
}

double pick_a(const GlobalSolveReport& r) { return r.a_star; }
double pick_d(const GlobalSolveReport& r) { return r.d_star; }
double pick_limit(const GlobalSolveReport& r) { return r.a_star + r.d_star; }

}  // namespace

SweepTable comparative_sweep(const MarketScenario& scenario, SweepAxis axis,
                             const std::vector<double>& grid) {
    if (grid.empty()) throw ValidationError("sweep grid is empty");
    if (axis == SweepAxis::gamma && scenario.utility().kind() != UtilityKind::power) {
        throw ValidationError("gamma sweep requires power utility");
    }

    SweepTable table;
    table.axis = axis;
    table.rows.resize(grid.size());

    parallel_for(grid.size(), [&](std::size_t i) {
        SweepRow& row = table.rows[i];
        row.axis_value = grid[i];
        try {
            MarketScenario moved = scenario_on_axis(scenario, axis, grid[i]);
            row.report = solve_global(moved);
            row.ok = true;
        } catch (const std::exception& err) {
            row.error = err.what();
        }
    });

    switch (axis) {
        case SweepAxis::wealth:
            table.verdicts.push_back(check_monotone(table, "a_star nonincreasing in wealth",
                                                    pick_a, Direction::nonincreasing));
            table.verdicts.push_back(check_monotone(table, "d_star nondecreasing in wealth",
                                                    pick_d, Direction::nondecreasing));
            table.verdicts.push_back(check_monotone(table, "limit nondecreasing in wealth",
                                                    pick_limit, Direction::nondecreasing));
            break;
        case SweepAxis::gamma:
            table.verdicts.push_back(check_monotone(table, "a_star nondecreasing in gamma",
                                                    pick_a, Direction::nondecreasing));
            table.verdicts.push_back(check_monotone(table, "d_star nonincreasing in gamma",
                                                    pick_d, Direction::nonincreasing));
            table.verdicts.push_back(check_monotone(table, "limit nonincreasing in gamma",
                                                    pick_limit, Direction::nonincreasing));
            break;
        case SweepAxis::eta:
            table.verdicts.push_back(check_monotone(table, "a_star nonincreasing in eta",
                                                    pick_a, Direction::nonincreasing));
            table.verdicts.push_back(check_monotone(table, "d_star nondecreasing in eta",
                                                    pick_d, Direction::nondecreasing));
            break;
        case SweepAxis::s_shift:
            table.verdicts.push_back(check_monotone(table, "a_star nondecreasing in shift",
                                                    pick_a, Direction::nondecreasing));
            table.verdicts.push_back(check_monotone(table, "d_star nonincreasing in shift",
                                                    pick_d, Direction::nonincreasing));
            table.verdicts.push_back(check_monotone(table, "limit nondecreasing in shift",
                                                    pick_limit, Direction::nondecreasing));
            break;
    }
    return table;
}

}  // namespace indemnify
