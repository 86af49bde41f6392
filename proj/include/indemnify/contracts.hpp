#ifndef INDEMNIFY_CONTRACTS_HPP
#define INDEMNIFY_CONTRACTS_HPP

#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "indemnify/market.hpp"

namespace indemnify {

// Deductible contract whose payment is capped, state by state, at the
// seller's reserve: I(x, s) = (x - d)^+ - (x - d - (s + a)^+)^+.
struct DeductibleLimitContract {
    double deductible = 0.0;  // d
    double premium = 0.0;     // a

    double indemnity(double x, double s) const;
    // Points where the state-s payment changes slope.
    std::vector<double> kinks(double s) const;
};

// Loss-only contract paying a stack of layers; layer i attaches at
// layers[i] + cap(i - 1) and exhausts at layers[i] + cap(i), where
// cap(i) = (a + states[i])^+ and cap(0) = 0 by convention. The cumulative
// payment at the exhaust point of layer i is exactly cap(i), so the
// contract stays within the reserve of state i up to the next attachment.
struct MultiLayerContract {
    double premium = 0.0;              // a
    std::vector<double> layers;        // nondecreasing attachment offsets l_1..l_N
    std::vector<double> states;        // strictly increasing background states s_1..s_N

    double indemnity(double x) const;
    double indemnity(double x, double /*s*/) const { return indemnity(x); }

    std::size_t size() const { return layers.size(); }
    double cap(std::size_t i) const;  // (a + states[i-1])^+ for i >= 1, cap(0) = 0
    double max_payment() const { return cap(size()); }

    // Attachment and exhaust abscissae of every layer, sorted.
    std::vector<double> breakpoints() const;

    // Smallest loss beyond which the payment exceeds the state's reserve,
    // or nullopt when the contract never defaults in that state on
    // [0, max_loss].
    std::optional<double> default_threshold(std::size_t state_index, double max_loss) const;
};

using Contract = std::variant<DeductibleLimitContract, MultiLayerContract>;

struct ContractOutcome {
    double contractual = 0.0;  // payment written in the contract
    double reserve = 0.0;      // what the seller can pay, (s + a)^+
    bool defaulted = false;
    double actual = 0.0;       // contractual, or recovery * reserve on default
    double wealth = 0.0;       // buyer's terminal wealth
};

double indemnity(const Contract& contract, double x, double s);
double contract_premium(const Contract& contract);

// Resolves one (loss, state) outcome including the default rule.
ContractOutcome settle(const MarketScenario& scenario, const Contract& contract, double x,
                       double s);

// Premium the expected-value principle assigns to the contract's written
// payments; consistent contracts have premium_of == stored premium.
double premium_of(const MarketScenario& scenario, const Contract& contract);

// E[u(W)] with W = w - X - a + actual payment, mixing over background states.
double expected_utility(const MarketScenario& scenario, const Contract& contract);

// Slope bounds for a tabulated payment schedule: 0 <= delta I <= delta x.
bool ic_check_points(std::span<const double> xs, std::span<const double> values,
                     double tol = 1e-9);

// Checks the payment schedule on a uniform grid plus all breakpoints for
// every background state.
bool ic_check(const MarketScenario& scenario, const Contract& contract, int grid_n = 2001);

// True when the written payment never exceeds the reserve in any state.
bool default_free_check(const MarketScenario& scenario, const Contract& contract,
                        int grid_n = 2001);

// Stored premium within tol of the expected-value premium of the written
// payments; solvers assert this before returning a contract.
void require_premium_consistency(const MarketScenario& scenario, const Contract& contract,
                                 double tol = 1e-8);

}  // namespace indemnify

#endif
