#include "indemnify/solver_layers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>

#include "indemnify/errors.hpp"
#include "indemnify/rootfind.hpp"

namespace indemnify {

namespace {

double positive_part(double v) { return v > 0.0 ? v : 0.0; }

std::vector<double> background_states(const MarketScenario& scenario) {
    std::vector<double> states;
    for (const BackgroundPoint& p : scenario.background().points()) states.push_back(p.value);
    return states;
}

MultiLayerContract make_contract(double a, std::vector<double> layers,
                                 const MarketScenario& scenario) {
    return MultiLayerContract{a, std::move(layers), background_states(scenario)};
}

// (1 + eta) * E[written payment] - a for the given attachment offsets,
// with the caps implied by the premium.
double pricing_gap(const MarketScenario& scenario, double a, std::span<const double> layers) {
    const LossDistribution& loss = scenario.loss();
    const std::vector<BackgroundPoint>& pts = scenario.background().points();
    double expected = 0.0;
    double prev_cap = 0.0;
    for (std::size_t i = 0; i < layers.size(); ++i) {
        double cap = positive_part(a + pts[i].value);
        expected += layer_expectation(loss, layers[i] + prev_cap, cap - prev_cap);
        prev_cap = cap;
    }
    return (1.0 + scenario.loading()) * expected - a;
}

}  // namespace

std::string to_string(LayerCase c) {
    switch (c) {
        case LayerCase::case_1:
            return "case_1";
        case LayerCase::case_2:
            return "case_2";
        case LayerCase::case_3:
            return "case_3";
        case LayerCase::single_state:
            return "single_state";
        case LayerCase::numeric_inner:
            return "numeric_inner";
        case LayerCase::no_insurance:
        default:
            return "no_insurance";
    }
}

double premium_upper_bound(const MarketScenario& scenario) {
    double top = scenario.background().max_state();
    if (!(top > 0.0)) {
        throw AssumptionViolation("premium upper bound needs a positive top background state");
    }
    const LossDistribution& loss = scenario.loss();
    double loaded = 1.0 + scenario.loading();
    auto gap = [&](double a) { return loaded * layer_expectation(loss, 0.0, top + a) - a; };
    if (gap(0.0) <= 0.0) return 0.0;
    return bisect_leftmost(gap, 0.0, scenario.full_premium()).root;
}

double premium_fixed_point(const MarketScenario& scenario, std::span<const double> layers) {
    auto h = [&](double a) { return pricing_gap(scenario, a, layers); };
    double cap = scenario.full_premium();
    double h0 = h(0.0);
    if (h0 <= 0.0) return 0.0;
    return bisect(h, 0.0, cap, h0, h(cap)).root;
}

namespace {

// Root in l2 of the two-layer pricing identity at fixed l1: the second
// attachment offset exhausting the premium. Clamps to max_loss when even a
// vanishing upper layer cannot absorb the slack.
double second_offset(const MarketScenario& scenario, double a, double cap1, double cap2,
                     double l1) {
    const LossDistribution& loss = scenario.loss();
    double loaded = 1.0 + scenario.loading();
    double M = loss.max_loss();
    double base = loaded * layer_expectation(loss, l1, cap1) - a;
    auto phi = [&](double l2) {
        return base + loaded * layer_expectation(loss, l2 + cap1, cap2 - cap1);
    };
    double at_top = phi(M);
    if (at_top > 1e-8) {
        throw BracketFailure("two-state pricing stays above the premium even at l2 = max_loss");
    }
    if (at_top > 0.0) {
        // The gap plateaus at the residual of the first-layer root; shift
        // it out so the leftmost point of the plateau is still found.
        auto shifted = [&](double l2) { return phi(l2) - at_top; };
        return bisect_leftmost(shifted, l1, M).root;
    }
    return bisect_leftmost(phi, l1, M).root;
}

}  // namespace

TwoStateSolution solve_two_state_at_premium(const MarketScenario& scenario, double a) {
    const std::vector<BackgroundPoint>& pts = scenario.background().points();
    if (pts.size() != 2) {
        throw UnsupportedDimension("two-state solver called with " + std::to_string(pts.size()) +
                                   " background states");
    }
    const LossDistribution& loss = scenario.loss();
    const UtilityModel& u = scenario.utility();
    double loaded = 1.0 + scenario.loading();
    double M = loss.max_loss();
    double w = scenario.wealth();
    double s1 = pts[0].value, s2 = pts[1].value;
    double p2 = pts[1].probability;
    double cap2 = positive_part(a + s2);

    TwoStateSolution out;
    if (a + s1 <= 0.0) {
        // The low state funds nothing: both offsets collapse to the single
        // root of the merged-layer pricing identity.
        auto merged = [&](double l) { return loaded * layer_expectation(loss, l, cap2) - a; };
        double l = merged(0.0) <= 0.0 ? 0.0 : bisect_leftmost(merged, 0.0, M).root;
        out.l1 = out.l2 = out.underline_l1 = out.overline_l2 = l;
        out.case_taken = LayerCase::case_1;
        return out;
    }

    double cap1 = a + s1;
    auto low_layer_gap = [&](double l1) {
        return loaded * layer_expectation(loss, l1, cap1) - a;
    };
    double lower_l1 =
        low_layer_gap(0.0) <= 0.0 ? 0.0 : bisect_leftmost(low_layer_gap, 0.0, M).root;
    double upper_l2 = second_offset(scenario, a, cap1, cap2, lower_l1);
    out.underline_l1 = lower_l1;
    out.overline_l2 = upper_l2;

    if (p2 <= u.u_prime(w - lower_l1 - a) / u.u_prime(w - upper_l2 - a)) {
        out.l1 = lower_l1;
        out.l2 = upper_l2;
        out.case_taken = LayerCase::case_2;
        return out;
    }

    // Interior case: balance marginal utility across the two attachments
    // along the premium constraint. The first attachment can rise until
    // the layers merge into one block priced by the wide capacity.
    auto merged = [&](double l) { return loaded * layer_expectation(loss, l, cap2) - a; };
    double upper_l1 = merged(0.0) <= 0.0 ? 0.0 : bisect_leftmost(merged, 0.0, M).root;
    if (upper_l1 <= lower_l1 + 1e-9) {
        // The low layer alone already spans to the top of the support, so
        // every feasible split pays identically; report the corner.
        out.l1 = lower_l1;
        out.l2 = std::max(upper_l2, lower_l1);
        out.case_taken = LayerCase::case_2;
        return out;
    }
    auto foc = [&](double l1) {
        double l2 = second_offset(scenario, a, cap1, cap2, l1);
        return -u.u_prime(w - l1 - a) + p2 * u.u_prime(w - l2 - a);
    };
    double f_lo = foc(lower_l1);
    double f_hi = foc(upper_l1);
    if (f_lo <= 0.0) {
        // Ties the corner test at machine precision.
        out.l1 = lower_l1;
        out.l2 = upper_l2;
        out.case_taken = LayerCase::case_2;
        return out;
    }
    if (f_hi >= 0.0) {
        // Marginal utility still favours the first attachment at the
        // merge point, where the split is immaterial.
        out.l1 = upper_l1;
        out.l2 = std::max(second_offset(scenario, a, cap1, cap2, upper_l1), upper_l1);
        out.case_taken = LayerCase::case_3;
        return out;
    }
    out.l1 = bisect(foc, lower_l1, upper_l1, f_lo, f_hi).root;
    out.l2 = second_offset(scenario, a, cap1, cap2, out.l1);
    out.case_taken = LayerCase::case_3;
    return out;
}

namespace {

struct InnerSolution {
    bool feasible = false;
    std::vector<double> layers;
    LayerCase case_taken = LayerCase::numeric_inner;
};

// Best-effort inner solution for three states or partial recovery. The
// trailing attachment offsets are searched by grid scan plus coordinate
// descent; the first funded offset is always re-solved from the pricing
// identity so the premium constraint holds on every probe.
class NumericInner {
public:
    NumericInner(const MarketScenario& scenario, double a)
        : scenario_(scenario), a_(a), M_(scenario.loss().max_loss()) {
        const std::vector<BackgroundPoint>& pts = scenario.background().points();
        n_ = pts.size();
        double prev_cap = 0.0;
        pivot_ = n_;
        for (std::size_t i = 0; i < n_; ++i) {
            double cap = positive_part(a + pts[i].value);
            if (cap - prev_cap > 1e-14) {
                pivot_ = i;
                break;
            }
            prev_cap = cap;
        }
        for (std::size_t i = pivot_ + 1; i < n_ && pivot_ < n_; ++i) free_idx_.push_back(i);
    }

    InnerSolution solve() {
        InnerSolution best;
        if (pivot_ == n_) {
            // No state can fund a layer at this premium.
            best.feasible = std::abs(a_) < 1e-12;
            best.layers.assign(n_, M_);
            return best;
        }

        double best_value = -std::numeric_limits<double>::infinity();
        auto consider = [&](const std::vector<double>& tail) {
            auto probe = evaluate(tail);
            if (probe && probe->first > best_value) {
                best_value = probe->first;
                best.feasible = true;
                best.layers = probe->second;
            }
        };

        if (free_idx_.empty()) {
            consider({});
            return best;
        }

        std::vector<double> tail(free_idx_.size(), 0.0);
        if (free_idx_.size() == 1) {
            const int grid = 48;
            for (int i = 0; i <= grid; ++i) {
                tail[0] = M_ * i / grid;
                consider(tail);
            }
        } else {
            const int grid = 16;
            for (int i = 0; i <= grid; ++i) {
                for (int j = i; j <= grid; ++j) {
                    tail[0] = M_ * i / grid;
                    tail[1] = M_ * j / grid;
                    consider(tail);
                }
            }
        }
        if (!best.feasible) return best;

        std::vector<double> current(free_idx_.size());
        for (std::size_t k = 0; k < free_idx_.size(); ++k) current[k] = best.layers[free_idx_[k]];
        for (int sweep = 0; sweep < 3; ++sweep) {
            for (std::size_t k = 0; k < free_idx_.size(); ++k) {
                double lo = k == 0 ? 0.0 : current[k - 1];
                double hi = k + 1 < free_idx_.size() ? current[k + 1] : M_;
                auto line = [&](double v) {
                    std::vector<double> probe_tail = current;
                    probe_tail[k] = v;
                    auto probe = evaluate(probe_tail);
                    return probe ? probe->first : -std::numeric_limits<double>::infinity();
                };
                GoldenResult g = golden_maximize(line, lo, hi, 1e-6, 80);
                std::vector<double> refined = current;
                refined[k] = g.arg;
                auto probe = evaluate(refined);
                if (probe && probe->first > best_value) {
                    best_value = probe->first;
                    best.layers = probe->second;
                    current = refined;
                }
            }
        }
        return best;
    }

private:
    // Returns objective and full offset vector for a trailing-offset probe,
    // or nullopt when no pivot offset meets the premium with this tail.
    std::optional<std::pair<double, std::vector<double>>> evaluate(
        const std::vector<double>& tail) {
        std::vector<double> layers(n_, M_);
        for (std::size_t k = 0; k < free_idx_.size(); ++k) layers[free_idx_[k]] = tail[k];
        for (std::size_t k = 1; k < free_idx_.size(); ++k) {
            if (layers[free_idx_[k]] < layers[free_idx_[k - 1]]) return std::nullopt;
        }
        double next = free_idx_.empty() ? M_ : layers[free_idx_.front()];
        auto gap = [&](double l) {
            layers[pivot_] = l;
            return pricing_gap(scenario_, a_, layers);
        };
        double at_zero = gap(0.0);
        if (at_zero < 0.0) return std::nullopt;  // premium unreachable even at full cover
        double at_next = gap(next);
        if (at_next > 0.0) return std::nullopt;  // root would break the ordering
        layers[pivot_] = at_zero == 0.0 ? 0.0 : bisect_leftmost(gap, 0.0, next).root;
        for (std::size_t i = 0; i < pivot_; ++i) layers[i] = layers[pivot_];
        Contract c = make_contract(a_, layers, scenario_);
        return std::make_pair(expected_utility(scenario_, c), layers);
    }

    const MarketScenario& scenario_;
    double a_;
    double M_;
    std::size_t n_ = 0;
    std::size_t pivot_ = 0;
    std::vector<std::size_t> free_idx_;
};

InnerSolution inner_solution(const MarketScenario& scenario, double a) {
    const std::vector<BackgroundPoint>& pts = scenario.background().points();
    const std::size_t n = pts.size();
    double M = scenario.loss().max_loss();

    if (a <= 0.0) {
        InnerSolution zero;
        zero.feasible = true;
        zero.layers.assign(n, M);
        zero.case_taken = n == 1 ? LayerCase::single_state
                          : (n == 2 && scenario.recovery() == 1.0) ? LayerCase::case_1
                                                                   : LayerCase::numeric_inner;
        return zero;
    }

    if (n == 1) {
        const LossDistribution& loss = scenario.loss();
        double loaded = 1.0 + scenario.loading();
        double cap = positive_part(a + pts[0].value);
        auto gap = [&](double l) { return loaded * layer_expectation(loss, l, cap) - a; };
        InnerSolution out;
        out.case_taken = LayerCase::single_state;
        double at_zero = gap(0.0);
        if (at_zero < 0.0) return out;  // premium above what full cover prices to
        out.feasible = true;
        out.layers = {at_zero == 0.0 ? 0.0 : bisect_leftmost(gap, 0.0, M).root};
        return out;
    }

    if (n == 2 && scenario.recovery() == 1.0) {
        TwoStateSolution two = solve_two_state_at_premium(scenario, a);
        InnerSolution out;
        out.feasible = true;
        out.layers = {two.l1, two.l2};
        out.case_taken = two.case_taken;
        return out;
    }

    if (n > 3) {
        throw UnsupportedDimension("loss-only solver supports at most 3 background states, got " +
                                   std::to_string(n));
    }
    return NumericInner(scenario, a).solve();
}

}  // namespace

LayeredSolveReport solve_layers_global(const MarketScenario& scenario) {
    LayeredSolveReport report;
    const std::size_t n = scenario.background().size();
    double M = scenario.loss().max_loss();

    if (scenario.background().max_state() <= 0.0) {
        // No state ever holds a positive reserve: staying uninsured is
        // optimal and the zero contract is the only admissible choice.
        report.case_taken = LayerCase::no_insurance;
        report.layers_star.assign(n, M);
        report.contract = make_contract(0.0, report.layers_star, scenario);
        Contract wrapped = report.contract;
        report.objective = expected_utility(scenario, wrapped);
        for (const BackgroundPoint& p : scenario.background().points()) {
            report.default_states.push_back({p.value, std::nullopt});
        }
        return report;
    }
    if (n > 3) {
        throw UnsupportedDimension("loss-only solver supports at most 3 background states, got " +
                                   std::to_string(n));
    }
    bool numeric_path = n == 3 || (n == 2 && scenario.recovery() < 1.0);
    if (numeric_path) {
        report.warnings.push_back(
            "inner solutions from best-effort coordinate descent (three states or partial "
            "recovery)");
    }

    report.a_bar_N = premium_upper_bound(scenario);

    auto objective_at = [&](double a) -> double {
        InnerSolution inner = inner_solution(scenario, a);
        if (!inner.feasible) return -std::numeric_limits<double>::infinity();
        Contract c = make_contract(a, inner.layers, scenario);
        return expected_utility(scenario, c);
    };

    const int cells = 64;
    int best_i = 0;
    double best_value = -std::numeric_limits<double>::infinity();
    std::vector<double> values(cells + 1);
    for (int i = 0; i <= cells; ++i) {
        double a = report.a_bar_N * i / cells;
        values[i] = objective_at(a);
        if (values[i] > best_value) {
            best_value = values[i];
            best_i = i;
        }
    }
    for (int i = 0; i <= cells; ++i) {
        if (i != best_i && best_value - values[i] <= 1e-6) ++report.outer_scan_ties;
    }
    if (report.outer_scan_ties > 0) {
        report.warnings.push_back(std::to_string(report.outer_scan_ties) +
                                  " outer scan point(s) tie the best objective within 1e-6");
    }

    double lo = report.a_bar_N * std::max(best_i - 1, 0) / cells;
    double hi = report.a_bar_N * std::min(best_i + 1, cells) / cells;
    GoldenResult g = golden_maximize(objective_at, lo, hi, 1e-8, 200);
    report.a_star = g.arg;

    // Golden section localizes the argmax only down to the noise floor of
    // the inner solves; one parabola fit through a wider stencil re-centres
    // it. Applied only when the centre already beats both wings, so corner
    // optima keep the golden result.
    double h = 1e-4 * (1.0 + report.a_bar_N);
    if (report.a_star - h >= lo && report.a_star + h <= hi) {
        double fm = objective_at(report.a_star - h);
        double fc = objective_at(report.a_star);
        double fp = objective_at(report.a_star + h);
        double curvature = fp - 2.0 * fc + fm;
        if (fc >= fm && fc >= fp && curvature < 0.0) {
            double step = 0.5 * h * (fm - fp) / curvature;
            if (std::abs(step) < h) report.a_star += step;
        }
    }

    InnerSolution inner = inner_solution(scenario, report.a_star);
    if (!inner.feasible) {
        throw InfeasiblePremium("loss-only inner solution infeasible at the optimal premium " +
                                std::to_string(report.a_star));
    }
    report.layers_star = inner.layers;
    report.case_taken = inner.case_taken;
    if (n == 2 && scenario.recovery() == 1.0 && report.a_star > 0.0) {
        TwoStateSolution two = solve_two_state_at_premium(scenario, report.a_star);
        report.underline_l1 = two.underline_l1;
        report.overline_l2 = two.overline_l2;
    }

    report.contract = make_contract(report.a_star, report.layers_star, scenario);
    Contract wrapped = report.contract;
    report.fixed_point_residual = premium_of(scenario, wrapped) - report.a_star;
    require_premium_consistency(scenario, wrapped);
    report.objective = expected_utility(scenario, wrapped);

    const std::vector<BackgroundPoint>& pts = scenario.background().points();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        report.default_states.push_back({pts[i].value, report.contract.default_threshold(i, M)});
    }
    return report;
}

}  // namespace indemnify
