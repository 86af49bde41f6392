#include <algorithm>
#include <cmath>
#include <vector>

#include <doctest.h>

#include "indemnify/contracts.hpp"
#include "indemnify/errors.hpp"
#include "indemnify/scenario_io.hpp"
#include "indemnify/solver_core.hpp"
#include "support.hpp"

using namespace indemnify;

namespace {

// Reference loss-only optimum for the two-state market, rounded as shipped.
MultiLayerContract reference_layers() {
    MultiLayerContract ml;
    ml.premium = 0.74;
    ml.layers = {4.60, 6.44};
    ml.states = {2.0, 8.0};
    return ml;
}

}  // namespace

TEST_CASE("deductible-limit indemnity and kinks") {
    DeductibleLimitContract dl{5.0, 1.0};
    CHECK(dl.indemnity(3.0, 2.0) == 0.0);
    CHECK(dl.indemnity(5.0, 2.0) == 0.0);
    CHECK(dl.indemnity(7.0, 2.0) == 2.0);
    CHECK(dl.indemnity(10.0, 2.0) == 3.0);   // capped at reserve 3
    CHECK(dl.indemnity(10.0, 8.0) == 5.0);   // reserve 9 never binds
    CHECK(dl.indemnity(10.0, -3.0) == 0.0);  // reserve (a + s)^+ = 0

    auto kinks = dl.kinks(2.0);
    REQUIRE(kinks.size() == 2);
    CHECK(kinks[0] == 5.0);
    CHECK(kinks[1] == 8.0);
}

TEST_CASE("multi-layer caps, payments, breakpoints") {
    MultiLayerContract ml = reference_layers();
    CHECK(ml.cap(0) == 0.0);
    CHECK(std::abs(ml.cap(1) - 2.74) < 1e-12);
    CHECK(std::abs(ml.cap(2) - 8.74) < 1e-12);
    CHECK(std::abs(ml.max_payment() - 8.74) < 1e-12);

    CHECK(ml.indemnity(4.0) == 0.0);
    CHECK(std::abs(ml.indemnity(6.0) - 1.40) < 1e-12);
    CHECK(std::abs(ml.indemnity(8.0) - 2.74) < 1e-12);  // plateau between layers
    CHECK(std::abs(ml.indemnity(9.18) - 2.74) < 1e-12);
    CHECK(std::abs(ml.indemnity(10.0) - 3.56) < 1e-12);

    auto bps = ml.breakpoints();
    auto has = [&](double v) {
        return std::any_of(bps.begin(), bps.end(),
                           [&](double b) { return std::abs(b - v) < 1e-12; });
    };
    CHECK(has(4.60));
    CHECK(has(7.34));
    CHECK(has(9.18));
}

TEST_CASE("multi-layer default thresholds") {
    MultiLayerContract ml = reference_layers();
    auto t0 = ml.default_threshold(0, 10.0);
    REQUIRE(t0.has_value());
    CHECK(std::abs(*t0 - 9.18) < 1e-12);  // low state defaults inside layer 2
    CHECK_FALSE(ml.default_threshold(1, 10.0).has_value());

    // Threshold beyond the support reads as no default.
    MultiLayerContract tame = ml;
    tame.layers = {4.60, 9.9};
    CHECK_FALSE(tame.default_threshold(0, 10.0).has_value());
}

TEST_CASE("settle applies the default rule") {
    MarketScenario scn = builtin_scenario(4);
    Contract ml{reference_layers()};

    ContractOutcome out = settle(scn, ml, 9.5, 2.0);
    CHECK(out.defaulted);
    CHECK(std::abs(out.contractual - 3.06) < 1e-12);
    CHECK(std::abs(out.reserve - 2.74) < 1e-12);
    CHECK(std::abs(out.actual - 2.74) < 1e-12);
    CHECK(std::abs(out.wealth - 7.5) < 1e-12);

    ContractOutcome rich = settle(scn, ml, 9.5, 8.0);
    CHECK_FALSE(rich.defaulted);
    CHECK(std::abs(rich.actual - 3.06) < 1e-12);
    CHECK(std::abs(rich.wealth - (15.0 - 9.5 - 0.74 + 3.06)) < 1e-12);

    ContractOutcome none = settle(scn, ml, 0.0, 2.0);
    CHECK_FALSE(none.defaulted);
    CHECK(none.actual == 0.0);
    CHECK(std::abs(none.wealth - (15.0 - 0.74)) < 1e-12);

    // Partial recovery scales the defaulted payment.
    MarketScenario half(scn.loss(), scn.background(), scn.utility(), scn.wealth(),
                        scn.loading(), 0.5);
    ContractOutcome rec = settle(half, ml, 9.5, 2.0);
    CHECK(rec.defaulted);
    CHECK(std::abs(rec.actual - 1.37) < 1e-12);
}

TEST_CASE("settle outcome inequalities on a grid") {
    MarketScenario scn = builtin_scenario(4);
    Contract ml{reference_layers()};
    Contract dl{DeductibleLimitContract{4.5, 1.0}};
    for (const Contract& c : {ml, dl}) {
        for (double s : {2.0, 8.0}) {
            for (int j = 0; j <= 200; ++j) {
                double x = 10.0 * j / 200.0;
                ContractOutcome out = settle(scn, c, x, s);
                CHECK(out.actual >= -1e-12);
                CHECK(out.actual <= out.contractual + 1e-12);
                CHECK(out.contractual <= x + 1e-12);
                if (out.contractual > out.reserve + 1e-9) CHECK(out.defaulted);
                if (out.contractual <= out.reserve) CHECK_FALSE(out.defaulted);
                CHECK(std::abs(out.wealth - (15.0 - x - contract_premium(c) + out.actual)) <
                      1e-12);
            }
        }
    }
}

TEST_CASE("premium_of prices written payments") {
    MarketScenario scn = builtin_scenario(4);

    Contract zero{DeductibleLimitContract{scn.loss().max_loss(), 0.0}};
    CHECK(premium_of(scn, zero) == 0.0);

    // A deductible funded by its own premium prices back to that premium.
    double a = 0.5;
    double d = solve_deductible(scn, a);
    Contract dl{DeductibleLimitContract{d, a}};
    CHECK(std::abs(premium_of(scn, dl) - a) < 1e-9);
    require_premium_consistency(scn, dl);

    Contract ml{reference_layers()};
    CHECK(std::abs(premium_of(scn, ml) - 0.74) < 0.01);

    Contract bad{DeductibleLimitContract{d, a + 0.2}};
    CHECK_THROWS_AS(require_premium_consistency(scn, bad), ValidationError);
}

TEST_CASE("premium_of is monotone in deductible and premium cap") {
    MarketScenario scn = builtin_scenario(4);
    double prev = 1e100;
    for (double d = 0.0; d <= 10.0; d += 1.0) {
        double p = premium_of(scn, Contract{DeductibleLimitContract{d, 1.0}});
        CHECK(p <= prev + 1e-12);
        prev = p;
    }
    prev = -1.0;
    for (double a = 0.0; a <= 3.0; a += 0.5) {
        double p = premium_of(scn, Contract{DeductibleLimitContract{4.0, a}});
        CHECK(p >= prev - 1e-12);
        prev = p;
    }
}

TEST_CASE("expected utility of the zero contract matches Simpson") {
    MarketScenario scn = builtin_scenario(4);
    Contract zero{DeductibleLimitContract{scn.loss().max_loss(), 0.0}};
    double got = expected_utility(scn, zero);

    auto u = [&](double wlth) { return 2.0 * std::sqrt(wlth); };
    double body = testsupport::simpson(
        [&](double x) { return u(15.0 - x) * testsupport::ReferenceLoss::body_pdf(x); }, 0.0,
        10.0, 200000);
    double expected = body + 0.1 * u(15.0) + 0.1 * u(5.0);
    CHECK(std::abs(got - expected) < 1e-8);
}

TEST_CASE("full insurance with a deep-pocket seller is exact") {
    MarketScenario base = builtin_scenario(4);
    MarketScenario scn = base.with_background(BackgroundRisk({{15.0, 1.0}}));
    double pi_f = scn.full_premium();
    Contract full{DeductibleLimitContract{0.0, pi_f}};
    require_premium_consistency(scn, full);
    double got = expected_utility(scn, full);
    CHECK(std::abs(got - 2.0 * std::sqrt(15.0 - pi_f)) < 1e-10);
}

TEST_CASE("expected utility against joint Monte Carlo") {
    MarketScenario scn = builtin_scenario(4);
    Contract ml{reference_layers()};
    double analytic = expected_utility(scn, ml);

    // Test-side payment and settlement, written from the layer arithmetic.
    auto pay = [](double x) {
        double first = std::min(std::max(x - 4.60, 0.0), 2.74);
        double second = std::min(std::max(x - 9.18, 0.0), 6.0);
        return first + second;
    };
    auto mc = testsupport::monte_carlo_mixed(
        [&](double x, double s) {
            double contractual = pay(x);
            double reserve = s + 0.74;
            double actual = contractual > reserve ? reserve : contractual;
            return 2.0 * std::sqrt(15.0 - x - 0.74 + actual);
        },
        {{2.0, 0.1}, {8.0, 0.9}}, 2000000, 991ull);
    CHECK(std::abs(analytic - mc.mean) < 4.0 * mc.std_error + 1e-9);
}

TEST_CASE("utility ordering favours coverage") {
    MarketScenario scn = builtin_scenario(4);
    Contract zero{DeductibleLimitContract{scn.loss().max_loss(), 0.0}};
    Contract ml{reference_layers()};
    CHECK(expected_utility(scn, ml) > expected_utility(scn, zero));
}

TEST_CASE("ic checks") {
    MarketScenario scn = builtin_scenario(4);
    CHECK(ic_check(scn, Contract{DeductibleLimitContract{5.0, 1.0}}));
    CHECK(ic_check(scn, Contract{reference_layers()}));

    std::vector<double> xs{0.0, 1.0, 2.0, 3.0};
    std::vector<double> ok{0.0, 0.5, 1.0, 1.5};
    std::vector<double> steep{0.0, 1.5, 1.6, 1.7};
    std::vector<double> dropping{0.0, 0.5, 0.3, 0.6};
    CHECK(ic_check_points(xs, ok));
    CHECK_FALSE(ic_check_points(xs, steep));
    CHECK_FALSE(ic_check_points(xs, dropping));
}

TEST_CASE("default-freeness distinguishes the two optima") {
    MarketScenario scn = builtin_scenario(4);
    GlobalSolveReport joint = solve_global(scn);
    CHECK(default_free_check(scn, Contract{joint.contract}));
    // The loss-only optimum defaults in the low state by design.
    CHECK_FALSE(default_free_check(scn, Contract{reference_layers()}));
}
