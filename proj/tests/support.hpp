#ifndef TESTS_SUPPORT_HPP
#define TESTS_SUPPORT_HPP

// Test-side oracles, deliberately independent of the library's evaluation
// paths: composite Simpson quadrature, inverse-transform Monte Carlo with
// its own quantile formulas, and a seeded scenario fuzzer.

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <utility>
#include <vector>

#include "indemnify/market.hpp"
#include "indemnify/utility.hpp"

namespace testsupport {

inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
    if (n % 2) ++n;
    double h = (b - a) / n;
    double total = f(a) + f(b);
    for (int i = 1; i < n; ++i) total += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return total * h / 3.0;
}

// The bundled example loss law: 10% atoms at 0 and at 10, the rest a
// truncated Pareto body (scale 10, shape 3) on (0, 10). Every formula here
// is written from scratch.
struct ReferenceLoss {
    static constexpr double kScale = 10.0;
    static constexpr double kShape = 3.0;
    static constexpr double kM = 10.0;
    static constexpr double kBodyWeight = 0.8;

    // Unnormalised integral of (x + scale)^-(shape+1) over [a, b].
    static double body_mass(double a, double b) {
        return (std::pow(a + kScale, -kShape) - std::pow(b + kScale, -kShape)) / kShape;
    }
    static double body_pdf(double x) {
        return kBodyWeight * std::pow(x + kScale, -(kShape + 1.0)) / body_mass(0.0, kM);
    }
    static double body_cdf(double x) { return body_mass(0.0, x) / body_mass(0.0, kM); }
    static double body_quantile(double v) {
        double t = std::pow(kScale, -kShape) - kShape * v * body_mass(0.0, kM);
        return std::pow(t, -1.0 / kShape) - kScale;
    }
    static double cdf(double x) {
        if (x < 0.0) return 0.0;
        double c = 0.1 + (x >= kM ? 0.1 : 0.0) + kBodyWeight * body_cdf(std::min(x, kM));
        return std::min(c, 1.0);
    }
    static double sample(std::mt19937_64& rng) {
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        double v = unif(rng);
        if (v < 0.1) return 0.0;
        if (v >= 0.9) return kM;
        return body_quantile((v - 0.1) / kBodyWeight);
    }
};

struct MonteCarloStats {
    double mean = 0.0;
    double std_error = 0.0;
};

// E[f(X)] under the reference loss by inverse-transform sampling.
inline MonteCarloStats monte_carlo_loss(const std::function<double(double)>& f, long n,
                                        std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    double sum = 0.0, sumsq = 0.0;
    for (long i = 0; i < n; ++i) {
        double v = f(ReferenceLoss::sample(rng));
        sum += v;
        sumsq += v * v;
    }
    double mean = sum / static_cast<double>(n);
    double var = (sumsq - n * mean * mean) / (n - 1.0);
    return {mean, std::sqrt(std::max(var, 0.0) / static_cast<double>(n))};
}

// E[f(X, S)] with S sampled from a finite list of (state, probability).
inline MonteCarloStats monte_carlo_mixed(
    const std::function<double(double, double)>& f,
    const std::vector<std::pair<double, double>>& states, long n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double sum = 0.0, sumsq = 0.0;
    for (long i = 0; i < n; ++i) {
        double x = ReferenceLoss::sample(rng);
        double pick = unif(rng);
        double s = states.back().first;
        double acc = 0.0;
        for (const auto& [value, prob] : states) {
            acc += prob;
            if (pick < acc) {
                s = value;
                break;
            }
        }
        double v = f(x, s);
        sum += v;
        sumsq += v * v;
    }
    double mean = sum / static_cast<double>(n);
    double var = (sumsq - n * mean * mean) / (n - 1.0);
    return {mean, std::sqrt(std::max(var, 0.0) / static_cast<double>(n))};
}

// Plain bisection used by test oracles so the library's root-finder is
// never in its own certification loop.
inline double oracle_bisect(const std::function<double(double)>& f, double lo, double hi) {
    double f_lo = f(lo);
    for (int i = 0; i < 200 && hi - lo > 1e-12; ++i) {
        double mid = 0.5 * (lo + hi);
        double f_mid = f(mid);
        if ((f_lo > 0.0) == (f_mid > 0.0)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Seeded scenario fuzzer: mixed atom/piece losses over the three kernels,
// one or two positive background states, power or log utility, wealth set
// safely above the domain floor.
inline indemnify::MarketScenario random_scenario(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    double M = 5.0 + 15.0 * unif(rng);
    double atom0 = 0.05 + 0.15 * unif(rng);
    double atomM = unif(rng) < 0.5 ? 0.05 + 0.1 * unif(rng) : 0.0;
    double body = 1.0 - atom0 - atomM;

    std::vector<indemnify::LossAtom> atoms{{0.0, atom0}};
    if (atomM > 0.0) atoms.push_back({M, atomM});

    std::vector<indemnify::LossPiece> pieces;
    int kernel_pick = static_cast<int>(unif(rng) * 3.0);
    auto make_kernel = [&](int which) -> indemnify::DensityKernel {
        if (which == 0) return indemnify::UniformKernel{};
        if (which == 1) {
            return indemnify::TruncatedParetoKernel{2.0 + 10.0 * unif(rng),
                                                    1.5 + 2.5 * unif(rng)};
        }
        return indemnify::TruncatedExponentialKernel{0.05 + 0.4 * unif(rng)};
    };
    if (unif(rng) < 0.5) {
        pieces.push_back({0.0, M, make_kernel(kernel_pick), body});
    } else {
        double cut = M * (0.3 + 0.4 * unif(rng));
        double w1 = body * (0.3 + 0.4 * unif(rng));
        pieces.push_back({0.0, cut, make_kernel(kernel_pick), w1});
        pieces.push_back({cut, M, make_kernel((kernel_pick + 1) % 3), body - w1});
    }
    indemnify::LossDistribution loss(std::move(atoms), std::move(pieces), M);

    std::vector<indemnify::BackgroundPoint> points;
    if (unif(rng) < 0.4) {
        points.push_back({0.2 * M + 0.6 * M * unif(rng), 1.0});
    } else {
        double p1 = 0.2 + 0.6 * unif(rng);
        double s1 = 0.05 * M + 0.35 * M * unif(rng);
        double s2 = s1 + 0.1 * M + 0.5 * M * unif(rng);
        points.push_back({s1, p1});
        points.push_back({s2, 1.0 - p1});
    }
    indemnify::BackgroundRisk background(std::move(points));

    indemnify::UtilityModel utility = indemnify::UtilityModel::logarithmic();
    if (unif(rng) < 0.7) {
        double gamma = 0.3 + 2.2 * unif(rng);
        if (std::abs(gamma - 1.0) < 0.05) gamma = 1.1;
        utility = indemnify::UtilityModel::power(gamma);
    }

    double eta = 0.02 + 0.3 * unif(rng);
    double w = M + (1.0 + eta) * loss.mean() + 1.0 + 4.0 * unif(rng);
    return indemnify::MarketScenario(std::move(loss), std::move(background), utility, w, eta,
                                     1.0);
}

}  // namespace testsupport

#endif
