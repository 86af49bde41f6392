#ifndef INDEMNIFY_ORACLE_HPP
#define INDEMNIFY_ORACLE_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "indemnify/market.hpp"
#include "indemnify/solver_core.hpp"
#include "indemnify/solver_layers.hpp"

namespace indemnify {
namespace oracle {

// Finite approximation of a market: loss support points with weights
// (atoms kept exact, density mass binned by cell), plus the background
// states. Used to brute-force the solvers' optimality claims.
struct DiscreteMarket {
    std::vector<double> points;
    std::vector<double> weights;
    std::vector<double> states;
    std::vector<double> state_probs;

    std::size_t size() const { return points.size(); }
};

// Builds a grid of at least n points over [0, max_loss], augmented with
// atom locations, piece endpoints, and the caller's extra breakpoints.
// Cell mass comes from cdf differences and sits at the cell's conditional
// mean, so the discrete mean matches the continuous one to quadrature
// accuracy.
DiscreteMarket discretize(const MarketScenario& scenario, int n,
                          std::span<const double> extra_points = {});

struct ProbeReport {
    double mean_error = 0.0;
    double max_stop_loss_error = 0.0;  // over 32 evenly spaced probes
};

ProbeReport probe_against(const DiscreteMarket& market, const MarketScenario& scenario);

// Indemnity matrix over (loss point, background state), premium fixed at a:
// random values in [0, x_j] projected onto the pricing constraint by
// clip-and-rescale. Throws InfeasiblePremium when 100 rounds cannot meet
// the premium within 1e-6.
std::vector<double> sample_admissible_joint(const DiscreteMarket& market, double loading,
                                            double a, std::uint64_t seed);

// Random nondecreasing, 1-Lipschitz payment schedule over the grid with
// I(0) = 0 (slopes drawn uniformly from [0, 1]).
std::vector<double> sample_admissible_ic(const DiscreteMarket& market, std::uint64_t seed);

// Expected utility on the discrete market. The joint form takes a matrix
// indexed [point * n_states + state]; the schedule form applies one payment
// column to every state. Both apply the default rule with the scenario's
// recovery rate.
double discrete_objective_joint(const DiscreteMarket& market, const MarketScenario& scenario,
                                std::span<const double> indemnity_matrix, double premium);
double discrete_objective_schedule(const DiscreteMarket& market, const MarketScenario& scenario,
                                   std::span<const double> schedule, double premium);

struct DominanceVerdict {
    bool passed = false;
    double baseline = 0.0;       // discrete objective of the solver's contract
    double max_violation = 0.0;  // best challenger objective minus baseline
    std::string counterexample;  // description of the winning challenger, if any
};

// Challenges the joint solution: random admissible matrices at the claimed
// premium plus a projected deductible-family sweep, all priced on the same
// discrete market. Fails when any challenger beats the claimed optimum by
// more than 1e-7.
DominanceVerdict dominance_test_joint(const MarketScenario& scenario,
                                      const GlobalSolveReport& report, int trials,
                                      std::uint64_t seed, int n_points = 2048);

// Challenges the loss-only solution with random slope-constrained
// schedules, premiums implied by the pricing rule.
DominanceVerdict dominance_test_schedule(const MarketScenario& scenario,
                                         const LayeredSolveReport& report, int trials,
                                         std::uint64_t seed, int n_points = 2048);

struct FiniteDifferenceRecord {
    double analytic = 0.0;
    double numeric = 0.0;
    double rel_err = 0.0;
};

// Central difference of f at x with step h against a supplied analytic
// derivative.
FiniteDifferenceRecord finite_difference_check(const std::function<double(double)>& f, double x,
                                               double h, double analytic);

}  // namespace oracle
}  // namespace indemnify

#endif
