#include <cmath>
#include <vector>

#include <doctest.h>

#include "indemnify/contracts.hpp"
#include "indemnify/errors.hpp"
#include "indemnify/scenario_io.hpp"
#include "indemnify/solver_core.hpp"
#include "support.hpp"

using namespace indemnify;
using testsupport::ReferenceLoss;

namespace {

// Test-side stop loss: atoms by hand, smooth body via Simpson.
double own_stop_loss(double y) {
    double total = 0.1 * std::max(10.0 - y, 0.0) + 0.1 * std::max(0.0 - y, 0.0);
    double lo = std::max(y, 0.0);
    if (lo < 10.0) {
        total += testsupport::simpson(
            [&](double x) { return (x - y) * ReferenceLoss::body_pdf(x); }, lo, 10.0, 4000);
    }
    return total;
}

double own_expected_min(double c) { return 23.0 / 7.0 - own_stop_loss(c); }

// Threshold-premium equation for the two-state market, all test-side.
double own_gap(double a) {
    double covered = 0.1 * own_expected_min(2.0 + a) + 0.9 * own_expected_min(8.0 + a);
    return 1.1 * covered - a;
}

// Two-atom market whose deductible lands on a massless stretch.
MarketScenario degenerate_layer_market() {
    LossDistribution loss({{0.0, 0.5}, {6.0, 0.5}}, {}, 6.0);
    return MarketScenario(loss, BackgroundRisk({{0.0, 1.0}}),
                          UtilityModel::exponential(0.1), 20.0, 1.0, 1.0);
}

}  // namespace

TEST_CASE("loading threshold against an independent quadrature") {
    MarketScenario scn = builtin_scenario(2);
    double got = loading_threshold(scn);

    auto marginal = [](double x) { return 0.5 / std::sqrt(15.0 - x); };
    double expected_mu = 0.1 * marginal(0.0) + 0.1 * marginal(10.0) +
                         testsupport::simpson(
                             [&](double x) { return marginal(x) * ReferenceLoss::body_pdf(x); },
                             0.0, 10.0, 4000);
    double independent = marginal(10.0) / expected_mu - 1.0;
    CHECK(std::abs(got - independent) < 1e-8);
    CHECK(std::abs(got - 0.4669) < 5e-4);
}

TEST_CASE("threshold premium against an independent bisection") {
    MarketScenario scn = builtin_scenario(4);
    int iterations = 0;
    double a_bar = threshold_premium(scn, &iterations);
    CHECK(iterations > 0);
    CHECK(std::abs(premium_gap(scn, a_bar)) < 1e-9);

    double cap = scn.full_premium();
    CHECK(own_gap(0.0) > 0.0);
    CHECK(own_gap(cap) < 0.0);
    double independent = testsupport::oracle_bisect(own_gap, 0.0, cap);
    CHECK(std::abs(a_bar - independent) < 1e-6);
}

TEST_CASE("deductible equation properties") {
    MarketScenario scn = builtin_scenario(4);
    CHECK(solve_deductible(scn, 0.0) == 10.0);

    double a_bar = threshold_premium(scn);
    for (double frac : {0.2, 0.5, 0.8}) {
        double a = frac * a_bar;
        double d = solve_deductible(scn, a);
        CHECK(std::abs(deductible_gap(scn, a, d)) < 1e-9);
        CHECK(d >= 0.0);
        CHECK(d <= 10.0);
    }

    // d(a) is continuous and nonincreasing on (0, a_bar).
    double prev = 10.0;
    for (int i = 1; i < 50; ++i) {
        double d = solve_deductible(scn, a_bar * i / 50.0);
        CHECK(d <= prev + 1e-9);
        CHECK(prev - d < 1.5);
        prev = d;
    }

    // Premiums above the threshold are rejected.
    CHECK_THROWS_AS(solve_deductible(scn, a_bar + 0.1), AssumptionViolation);
}

TEST_CASE("threshold equation is concave in the premium") {
    MarketScenario scn = builtin_scenario(4);
    double cap = scn.full_premium();
    for (int i = 0; i + 2 <= 20; ++i) {
        double a1 = cap * i / 20.0;
        double a2 = cap * (i + 2) / 20.0;
        double mid = premium_gap(scn, 0.5 * (a1 + a2));
        CHECK(mid >= 0.5 * (premium_gap(scn, a1) + premium_gap(scn, a2)) - 1e-9);
    }
}

TEST_CASE("premium first-order condition is increasing") {
    MarketScenario scn = builtin_scenario(4);
    double a_bar = threshold_premium(scn);
    double prev = -1e100;
    for (int i = 1; i <= 15; ++i) {
        double foc = premium_foc(scn, a_bar * i / 16.0);
        CHECK(foc > prev - 1e-10);
        prev = foc;
    }
    CHECK(premium_foc(scn, a_bar * 1.0 / 16.0) < 0.0);
    CHECK(premium_foc(scn, a_bar * 15.0 / 16.0) > 0.0);
}

TEST_CASE("deductible sensitivity matches finite differences") {
    MarketScenario scn = builtin_scenario(4);
    double a_bar = threshold_premium(scn);
    for (double frac : {0.3, 0.5, 0.7}) {
        double a = frac * a_bar;
        double analytic = deductible_sensitivity(scn, a);
        double h = 1e-5;
        double numeric = (solve_deductible(scn, a + h) - solve_deductible(scn, a - h)) /
                         (2.0 * h);
        CHECK(analytic < 0.0);
        CHECK(std::abs(analytic - numeric) < 1e-4 * std::abs(numeric));
    }
}

TEST_CASE("deductible sensitivity rejects massless layers") {
    MarketScenario scn = degenerate_layer_market();
    CHECK(solve_deductible(scn, 1.0) == 0.0);
    CHECK_THROWS_AS(deductible_sensitivity(scn, 1.0), DegenerateDenominator);
}

TEST_CASE("joint pipeline interior case") {
    MarketScenario scn = builtin_scenario(4);
    GlobalSolveReport report = solve_global(scn);
    CHECK(report.case_taken == JointCase::interior);
    CHECK(std::abs(report.a_star - 1.00) < 0.02);
    CHECK(std::abs(report.d_star - 4.53) < 0.02);
    CHECK(report.a_star <= report.a_bar);
    CHECK(std::abs(report.residuals.g_at_abar) < 1e-9);
    CHECK(std::abs(report.residuals.g_a_at_d) < 1e-9);
    CHECK(std::abs(report.residuals.foc_at_astar) < 1e-9);
    CHECK(report.assumption_warnings.empty());
    CHECK_FALSE(report.threshold_tie);
    CHECK(report.contract.deductible == report.d_star);
    CHECK(report.contract.premium == report.a_star);
    CHECK(std::abs(report.objective - expected_utility(scn, Contract{report.contract})) <
          1e-12);
}

TEST_CASE("joint pipeline fair-pricing case") {
    MarketScenario scn = builtin_scenario(2).with_loading(0.0);
    GlobalSolveReport report = solve_global(scn);
    CHECK(report.case_taken == JointCase::eta_zero);
    CHECK(report.d_star == 0.0);
    CHECK(report.a_star == report.a_bar);
    CHECK(std::abs(premium_gap(scn, report.a_bar)) < 1e-9);
}

TEST_CASE("joint pipeline refuses overpriced cover") {
    MarketScenario scn = builtin_scenario(2).with_loading(0.5);
    GlobalSolveReport report = solve_global(scn);
    CHECK(report.case_taken == JointCase::no_insurance);
    CHECK(report.a_star == 0.0);
    CHECK(report.d_star == 10.0);
    CHECK_FALSE(report.threshold_tie);

    // Loading pinned exactly at the threshold records the tie.
    MarketScenario tied = builtin_scenario(2).with_loading(loading_threshold(scn));
    GlobalSolveReport tie_report = solve_global(tied);
    CHECK(tie_report.case_taken == JointCase::no_insurance);
    CHECK(tie_report.threshold_tie);
}

TEST_CASE("joint pipeline with a broke seller") {
    MarketScenario scn =
        builtin_scenario(2).with_background(BackgroundRisk({{-2.0, 0.6}, {-1.0, 0.4}}));
    GlobalSolveReport report = solve_global(scn);
    CHECK(report.case_taken == JointCase::no_insurance);
    CHECK(report.a_star == 0.0);
    CHECK(report.d_star == 10.0);
    // The zero contract is exact here; no advisory warnings apply.
    CHECK(report.assumption_warnings.empty());
    CHECK(report.a_bar == 0.0);
}

TEST_CASE("comparative sweep along the loading axis") {
    std::vector<double> grid{0.0, 0.1, 0.2, 0.3, 0.45, 0.5};
    SweepTable table = comparative_sweep(builtin_scenario(2), SweepAxis::eta, grid);
    REQUIRE(table.rows.size() == grid.size());
    for (const SweepRow& row : table.rows) CHECK(row.ok);
    CHECK(table.rows.front().report.case_taken == JointCase::eta_zero);
    CHECK(table.rows.back().report.case_taken == JointCase::no_insurance);
    for (const SweepVerdict& v : table.verdicts) CHECK(v.pass);
}

TEST_CASE("comparative sweep tolerates unsolvable rows") {
    std::vector<double> grid{12.0, 14.5, 16.0};
    SweepTable table = comparative_sweep(builtin_scenario(2), SweepAxis::wealth, grid);
    CHECK_FALSE(table.rows[0].ok);
    CHECK_FALSE(table.rows[0].error.empty());
    CHECK(table.rows[1].ok);
    CHECK(table.rows[2].ok);
    for (const SweepVerdict& v : table.verdicts) CHECK(v.pass);

    SweepTable gammas = comparative_sweep(builtin_scenario(2), SweepAxis::gamma,
                                          {0.5, 1.0, 2.0});
    CHECK(gammas.rows[0].ok);
    CHECK_FALSE(gammas.rows[1].ok);  // gamma = 1 is the log family
    CHECK(gammas.rows[2].ok);
}

TEST_CASE("comparative sweep input validation") {
    CHECK_THROWS_AS(comparative_sweep(builtin_scenario(2), SweepAxis::eta, {}),
                    ValidationError);
    MarketScenario log_buyer = builtin_scenario(2).with_utility(UtilityModel::logarithmic());
    CHECK_THROWS_AS(comparative_sweep(log_buyer, SweepAxis::gamma, {0.5, 2.0}),
                    ValidationError);
}
