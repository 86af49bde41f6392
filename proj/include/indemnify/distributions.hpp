#ifndef INDEMNIFY_DISTRIBUTIONS_HPP
#define INDEMNIFY_DISTRIBUTIONS_HPP

#include <span>
#include <variant>
#include <vector>

#include "indemnify/quadrature.hpp"

namespace indemnify {

// Density kernels for the continuous pieces of a loss distribution. Each
// kernel is renormalised to its piece, so only the shape matters here.
struct UniformKernel {};

// density proportional to (x + scale)^-(shape + 1)
struct TruncatedParetoKernel {
    double scale = 1.0;
    double shape = 1.0;
};

// density proportional to exp(-rate x)
struct TruncatedExponentialKernel {
    double rate = 1.0;
};

using DensityKernel =
    std::variant<UniformKernel, TruncatedParetoKernel, TruncatedExponentialKernel>;

struct LossAtom {
    double point = 0.0;
    double mass = 0.0;
};

struct LossPiece {
    double lo = 0.0;
    double hi = 0.0;
    DensityKernel kernel;
    double weight = 0.0;  // total probability carried by the piece

    double pdf(double x) const;            // weight * normalised kernel density
    double mass_below(double x) const;     // weight * P(piece value <= x)
    double unnormalised(double x) const;   // raw kernel density
    double normaliser() const;             // integral of the raw kernel over [lo, hi]
};

// Bounded loss: finitely many point masses plus weighted density pieces,
// supported on [0, max_loss]. Probabilities must sum to one.
class LossDistribution {
public:
    LossDistribution(std::vector<LossAtom> atoms, std::vector<LossPiece> pieces,
                     double max_loss);

    double max_loss() const { return max_loss_; }
    const std::vector<LossAtom>& atoms() const { return atoms_; }
    const std::vector<LossPiece>& pieces() const { return pieces_; }

    // Atom points and piece endpoints, sorted and deduplicated.
    const std::vector<double>& kinks() const { return kinks_; }

    double mean() const { return mean_; }

private:
    std::vector<LossAtom> atoms_;
    std::vector<LossPiece> pieces_;
    double max_loss_;
    double mean_;
    std::vector<double> kinks_;
};

// Right-continuous P(X <= x).
double cdf(const LossDistribution& dist, double x);

// P(X > x).
double survival(const LossDistribution& dist, double x);

// E[(X - y)^+]. Negative y is allowed and gives mean - y.
double stop_loss(const LossDistribution& dist, double y);

// E[(X - y)^+ - (X - y - width)^+], the expected payment of the layer of
// the given width attaching at y. Zero when width <= 0.
double layer_expectation(const LossDistribution& dist, double y, double width);

// E[f(X)] for piecewise-smooth f; extra_kinks lists the abscissae where f
// loses smoothness so the quadrature can split there.
template <typename F>
double expect_piecewise(const LossDistribution& dist, F&& f,
                        std::span<const double> extra_kinks = {},
                        const QuadratureOptions& opts = {}) {
    double total = 0.0;
    for (const LossAtom& atom : dist.atoms()) total += atom.mass * f(atom.point);
    for (const LossPiece& piece : dist.pieces()) {
        auto integrand = [&](double x) { return f(x) * piece.pdf(x); };
        total += integrate(integrand, piece.lo, piece.hi, extra_kinks, opts);
    }
    return total;
}

}  // namespace indemnify

#endif
