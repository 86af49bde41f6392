#ifndef INDEMNIFY_MARKET_HPP
#define INDEMNIFY_MARKET_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "indemnify/distributions.hpp"
#include "indemnify/utility.hpp"

namespace indemnify {

struct BackgroundPoint {
    double value = 0.0;        // state of the seller's other book, may be negative
    double probability = 0.0;
};

// Discrete background risk: strictly increasing states with probabilities
// summing to one, independent of the loss.
class BackgroundRisk {
public:
    explicit BackgroundRisk(std::vector<BackgroundPoint> points);

    const std::vector<BackgroundPoint>& points() const { return points_; }
    std::size_t size() const { return points_.size(); }
    double min_state() const { return points_.front().value; }
    double max_state() const { return points_.back().value; }

    // Adds delta to every state, keeping probabilities.
    BackgroundRisk shifted(double delta) const;

private:
    std::vector<BackgroundPoint> points_;
};

// One insurance market: insurable loss, the seller's background position,
// buyer preferences, and pricing terms.
class MarketScenario {
public:
    MarketScenario(LossDistribution loss, BackgroundRisk background, UtilityModel utility,
                   double wealth, double loading, double recovery);

    const LossDistribution& loss() const { return loss_; }
    const BackgroundRisk& background() const { return background_; }
    const UtilityModel& utility() const { return utility_; }
    double wealth() const { return wealth_; }
    double loading() const { return loading_; }    // premium loading eta >= 0
    double recovery() const { return recovery_; }  // recovery rate tau in [0, 1]

    // (1 + loading) * E[X], the premium of full insurance; caps every
    // premium the solvers consider.
    double full_premium() const;

    MarketScenario with_wealth(double wealth) const;
    MarketScenario with_loading(double loading) const;
    MarketScenario with_utility(UtilityModel utility) const;
    MarketScenario with_background(BackgroundRisk background) const;

private:
    LossDistribution loss_;
    BackgroundRisk background_;
    UtilityModel utility_;
    double wealth_;
    double loading_;
    double recovery_;
};

// sum_i p_i * E[(X - y)^+ - (X - y - (s_i + a)^+)^+]: expected payment of a
// layer attaching at y whose width in state i is the state-i reserve.
double mixed_layer_expectation(const MarketScenario& scenario, double y, double a);

// Checks the standing assumptions behind the closed-form solvers and
// returns a description of each failed condition (empty when all hold):
// nonnegative background, finitely many jumps, strictly increasing loss
// cdf, and every deductible layer carrying positive expected payment.
std::vector<std::string> check_standing_assumptions(const MarketScenario& scenario);

}  // namespace indemnify

#endif
