#include "indemnify/contracts.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "indemnify/errors.hpp"

namespace indemnify {

namespace {

double positive_part(double v) { return v > 0.0 ? v : 0.0; }

}  // namespace

double DeductibleLimitContract::indemnity(double x, double s) const {
    double cap = positive_part(s + premium);
    // The min form keeps the plateau exactly at the cap, so payments never
    // drift past the reserve through rounding.
    return std::min(positive_part(x - deductible), cap);
}

std::vector<double> DeductibleLimitContract::kinks(double s) const {
    double cap = positive_part(s + premium);
    return {deductible, deductible + cap};
}

double MultiLayerContract::cap(std::size_t i) const {
    if (i == 0) return 0.0;
    return positive_part(premium + states[i - 1]);
}

double MultiLayerContract::indemnity(double x) const {
    double total = 0.0;
    for (std::size_t i = 0; i < layers.size(); ++i) {
        double attach = layers[i] + cap(i);
        double width = cap(i + 1) - cap(i);
        total += std::min(positive_part(x - attach), width);
    }
    return total;
}

std::vector<double> MultiLayerContract::breakpoints() const {
    std::vector<double> points;
    points.reserve(2 * layers.size());
    for (std::size_t i = 0; i < layers.size(); ++i) {
        points.push_back(layers[i] + cap(i));
        points.push_back(layers[i] + cap(i + 1));
    }
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    return points;
}

std::optional<double> MultiLayerContract::default_threshold(std::size_t state_index,
                                                            double max_loss) const {
    double reserve = cap(state_index + 1);
    // Cumulative payment at the exhaust of layer k is cap(k); the payment
    // first exceeds the reserve inside the layer whose cap passes it.
    for (std::size_t k = 1; k <= layers.size(); ++k) {
        if (cap(k) > reserve + 1e-12) {
            double attach = layers[k - 1] + cap(k - 1);
            double crossing = attach + (reserve - cap(k - 1));
            if (crossing < max_loss) return crossing;
            return std::nullopt;
        }
    }
    return std::nullopt;
}

double indemnity(const Contract& contract, double x, double s) {
    return std::visit([&](const auto& c) { return c.indemnity(x, s); }, contract);
}

double contract_premium(const Contract& contract) {
    return std::visit([](const auto& c) { return c.premium; }, contract);
}

ContractOutcome settle(const MarketScenario& scenario, const Contract& contract, double x,
                       double s) {
    ContractOutcome out;
    out.contractual = indemnity(contract, x, s);
    out.reserve = positive_part(s + contract_premium(contract));
    // Strictly-greater trigger with an ulp-scale guard: payments that sit on
    // the reserve plateau must not default through rounding noise.
    out.defaulted = out.contractual > out.reserve + 1e-12 * (1.0 + out.reserve);
    out.actual = out.defaulted ? scenario.recovery() * out.reserve : out.contractual;
    out.wealth = scenario.wealth() - x - contract_premium(contract) + out.actual;
    return out;
}

double premium_of(const MarketScenario& scenario, const Contract& contract) {
    const LossDistribution& loss = scenario.loss();
    double loaded = 1.0 + scenario.loading();
    if (const auto* dl = std::get_if<DeductibleLimitContract>(&contract)) {
        return loaded * mixed_layer_expectation(scenario, dl->deductible, dl->premium);
    }
    const auto& ml = std::get<MultiLayerContract>(contract);
    double expected = 0.0;
    for (std::size_t i = 0; i < ml.size(); ++i) {
        double attach = ml.layers[i] + ml.cap(i);
        double width = ml.cap(i + 1) - ml.cap(i);
        expected += layer_expectation(loss, attach, width);
    }
    return loaded * expected;
}

double expected_utility(const MarketScenario& scenario, const Contract& contract) {
    const UtilityModel& u = scenario.utility();
    double total = 0.0;
    for (const BackgroundPoint& p : scenario.background().points()) {
        std::vector<double> kinks;
        if (const auto* dl = std::get_if<DeductibleLimitContract>(&contract)) {
            kinks = dl->kinks(p.value);
        } else {
            const auto& ml = std::get<MultiLayerContract>(contract);
            kinks = ml.breakpoints();
            // The wealth map loses smoothness where the payment crosses a
            // reserve; split the quadrature there too.
            for (std::size_t i = 0; i < ml.states.size(); ++i) {
                if (auto t = ml.default_threshold(i, scenario.loss().max_loss())) {
                    kinks.push_back(*t);
                }
            }
        }
        auto integrand = [&](double x) {
            return u.u(settle(scenario, contract, x, p.value).wealth);
        };
        total += p.probability * expect_piecewise(scenario.loss(), integrand, kinks);
    }
    return total;
}

bool ic_check_points(std::span<const double> xs, std::span<const double> values, double tol) {
    for (std::size_t j = 0; j + 1 < xs.size(); ++j) {
        double dx = xs[j + 1] - xs[j];
        double di = values[j + 1] - values[j];
        if (di < -tol || di > dx + tol) return false;
    }
    return true;
}

namespace {

std::vector<double> check_grid(const MarketScenario& scenario, const Contract& contract,
                               int grid_n, double s) {
    double M = scenario.loss().max_loss();
    std::vector<double> xs;
    xs.reserve(static_cast<std::size_t>(grid_n) + 8);
    for (int j = 0; j < grid_n; ++j) xs.push_back(M * j / (grid_n - 1));
    if (const auto* dl = std::get_if<DeductibleLimitContract>(&contract)) {
        for (double k : dl->kinks(s)) xs.push_back(k);
    } else {
        for (double k : std::get<MultiLayerContract>(contract).breakpoints()) xs.push_back(k);
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::remove_if(xs.begin(), xs.end(), [M](double x) { return x < 0.0 || x > M; }),
             xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    return xs;
}

}  // namespace

bool ic_check(const MarketScenario& scenario, const Contract& contract, int grid_n) {
    for (const BackgroundPoint& p : scenario.background().points()) {
        std::vector<double> xs = check_grid(scenario, contract, grid_n, p.value);
        std::vector<double> values;
        values.reserve(xs.size());
        for (double x : xs) values.push_back(indemnity(contract, x, p.value));
        if (!values.empty() && std::abs(indemnity(contract, 0.0, p.value)) > 1e-9) return false;
        if (!ic_check_points(xs, values)) return false;
    }
    return true;
}

bool default_free_check(const MarketScenario& scenario, const Contract& contract, int grid_n) {
    for (const BackgroundPoint& p : scenario.background().points()) {
        double reserve = positive_part(p.value + contract_premium(contract));
        for (double x : check_grid(scenario, contract, grid_n, p.value)) {
            if (indemnity(contract, x, p.value) > reserve + 1e-9) return false;
        }
    }
    return true;
}

void require_premium_consistency(const MarketScenario& scenario, const Contract& contract,
                                 double tol) {
    double stored = contract_premium(contract);
    double priced = premium_of(scenario, contract);
    if (std::abs(stored - priced) > tol) {
        throw ValidationError("contract premium " + std::to_string(stored) +
                              " differs from expected-value premium " + std::to_string(priced));
    }
}

}  // namespace indemnify
