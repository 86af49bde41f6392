#include "indemnify/market.hpp"

#include <cmath>
#include <string>

#include "indemnify/errors.hpp"

namespace indemnify {

BackgroundRisk::BackgroundRisk(std::vector<BackgroundPoint> points) : points_(std::move(points)) {
    if (points_.empty()) throw ValidationError("background risk needs at least one state");
    double total = 0.0;
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (!(points_[i].probability > 0.0)) {
            throw ValidationError("background state " + std::to_string(i) +
                                  " needs positive probability");
        }
        if (i > 0 && !(points_[i].value > points_[i - 1].value)) {
            throw ValidationError("background states must be strictly increasing");
        }
        total += points_[i].probability;
    }
    if (std::abs(total - 1.0) > 1e-12) {
        throw ValidationError("background probabilities sum to " + std::to_string(total) +
                              ", expected 1");
    }
}

BackgroundRisk BackgroundRisk::shifted(double delta) const {
    std::vector<BackgroundPoint> moved = points_;
    for (BackgroundPoint& p : moved) p.value += delta;
    return BackgroundRisk(std::move(moved));
}

MarketScenario::MarketScenario(LossDistribution loss, BackgroundRisk background,
                               UtilityModel utility, double wealth, double loading,
                               double recovery)
    : loss_(std::move(loss)),
      background_(std::move(background)),
      utility_(utility),
      wealth_(wealth),
      loading_(loading),
      recovery_(recovery) {
    if (!(loading_ >= 0.0) || !std::isfinite(loading_)) {
        throw ValidationError("loading must be finite and >= 0");
    }
    if (!(recovery_ >= 0.0) || !(recovery_ <= 1.0)) {
        throw ValidationError("recovery rate must lie in [0, 1]");
    }
    if (!std::isfinite(wealth_)) throw ValidationError("wealth must be finite");
    // Worst terminal wealth is bounded below by w - max_loss - full premium;
    // it has to stay inside the utility domain.
    double floor = wealth_ - loss_.max_loss() - full_premium();
    if (floor <= utility_.domain_lower_bound()) {
        throw ValidationError("wealth floor " + std::to_string(floor) +
                              " leaves the utility domain; increase wealth or reduce loading");
    }
}

double MarketScenario::full_premium() const { return (1.0 + loading_) * loss_.mean(); }

MarketScenario MarketScenario::with_wealth(double wealth) const {
    return MarketScenario(loss_, background_, utility_, wealth, loading_, recovery_);
}

MarketScenario MarketScenario::with_loading(double loading) const {
    return MarketScenario(loss_, background_, utility_, wealth_, loading, recovery_);
}

MarketScenario MarketScenario::with_utility(UtilityModel utility) const {
    return MarketScenario(loss_, background_, utility, wealth_, loading_, recovery_);
}

MarketScenario MarketScenario::with_background(BackgroundRisk background) const {
    return MarketScenario(loss_, std::move(background), utility_, wealth_, loading_, recovery_);
}

double mixed_layer_expectation(const MarketScenario& scenario, double y, double a) {
    double total = 0.0;
    for (const BackgroundPoint& p : scenario.background().points()) {
        double width = p.value + a;
        if (width > 0.0) total += p.probability * layer_expectation(scenario.loss(), y, width);
    }
    return total;
}

std::vector<std::string> check_standing_assumptions(const MarketScenario& scenario) {
    std::vector<std::string> failed;
    const LossDistribution& loss = scenario.loss();
    const BackgroundRisk& background = scenario.background();

    if (background.min_state() < 0.0) {
        failed.push_back("condition 1: background risk takes negative values");
    }

    // Condition 2 (finitely many jumps of X and X - S) holds by
    // construction: atoms and background states are finite lists.

    const int cells = 64;
    double M = loss.max_loss();
    bool strictly_increasing = true;
    for (int i = 0; i < cells && strictly_increasing; ++i) {
        double a = M * i / cells;
        double b = M * (i + 1) / cells;
        if (!(cdf(loss, b) - cdf(loss, a) > 0.0)) strictly_increasing = false;
    }
    if (!strictly_increasing) {
        failed.push_back("condition 3: loss cdf is not strictly increasing on [0, max_loss]");
    }

    // E[(X - y)^+ - (X - y - S)^+] > 0 for every deductible level y < M.
    // Negative attachment of the upper term means (X - c)^+ = X - c.
    bool layers_paid = true;
    for (int i = 0; i < cells && layers_paid; ++i) {
        double y = M * i / cells;
        double value = 0.0;
        for (const BackgroundPoint& p : background.points()) {
            double upper = y + p.value;
            double term = stop_loss(loss, y) - stop_loss(loss, upper);
            value += p.probability * term;
        }
        if (!(value > 1e-12)) layers_paid = false;
    }
    if (!layers_paid) {
        failed.push_back(
            "condition 4: some deductible layer carries no expected payment under the "
            "background states");
    }

    return failed;
}

}  // namespace indemnify
