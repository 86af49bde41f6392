#include "indemnify/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "indemnify/errors.hpp"

namespace indemnify {

namespace {

// Integral of the raw kernel density over [a, b].
double kernel_mass(const DensityKernel& kernel, double a, double b) {
    return std::visit(
        [&](const auto& k) -> double {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, UniformKernel>) {
                return b - a;
            } else if constexpr (std::is_same_v<K, TruncatedParetoKernel>) {
                return (std::pow(a + k.scale, -k.shape) - std::pow(b + k.scale, -k.shape)) /
                       k.shape;
            } else {
                return (std::exp(-k.rate * a) - std::exp(-k.rate * b)) / k.rate;
            }
        },
        kernel);
}

// Integral of x times the raw kernel density over [a, b].
double kernel_partial_mean(const DensityKernel& kernel, double a, double b) {
    return std::visit(
        [&](const auto& k) -> double {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, UniformKernel>) {
                return 0.5 * (b * b - a * a);
            } else if constexpr (std::is_same_v<K, TruncatedParetoKernel>) {
                // x (x + s)^(-a-1) = (x + s)^(-a) - s (x + s)^(-a-1).
                auto antiderivative = [&](double x) {
                    double t = x + k.scale;
                    double head = k.shape == 1.0 ? std::log(t)
                                                 : std::pow(t, 1.0 - k.shape) / (1.0 - k.shape);
                    return head + k.scale * std::pow(t, -k.shape) / k.shape;
                };
                return antiderivative(b) - antiderivative(a);
            } else {
                auto antiderivative = [&](double x) {
                    return -(x / k.rate + 1.0 / (k.rate * k.rate)) * std::exp(-k.rate * x);
                };
                return antiderivative(b) - antiderivative(a);
            }
        },
        kernel);
}

double kernel_density(const DensityKernel& kernel, double x) {
    return std::visit(
        [&](const auto& k) -> double {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, UniformKernel>) {
                return 1.0;
            } else if constexpr (std::is_same_v<K, TruncatedParetoKernel>) {
                return std::pow(x + k.scale, -(k.shape + 1.0));
            } else {
                return std::exp(-k.rate * x);
            }
        },
        kernel);
}

void validate_kernel(const DensityKernel& kernel, std::size_t index) {
    std::visit(
        [&](const auto& k) {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, TruncatedParetoKernel>) {
                if (!(k.scale > 0.0) || !(k.shape > 0.0)) {
                    throw ValidationError("piece " + std::to_string(index) +
                                          ": pareto kernel needs scale > 0 and shape > 0");
                }
            } else if constexpr (std::is_same_v<K, TruncatedExponentialKernel>) {
                if (!(k.rate > 0.0)) {
                    throw ValidationError("piece " + std::to_string(index) +
                                          ": exponential kernel needs rate > 0");
                }
            }
        },
        kernel);
}

}  // namespace

double LossPiece::unnormalised(double x) const { return kernel_density(kernel, x); }

double LossPiece::normaliser() const { return kernel_mass(kernel, lo, hi); }

double LossPiece::pdf(double x) const {
    if (x < lo || x > hi) return 0.0;
    return weight * kernel_density(kernel, x) / kernel_mass(kernel, lo, hi);
}

double LossPiece::mass_below(double x) const {
    if (x <= lo) return 0.0;
    if (x >= hi) return weight;
    return weight * kernel_mass(kernel, lo, x) / kernel_mass(kernel, lo, hi);
}

LossDistribution::LossDistribution(std::vector<LossAtom> atoms, std::vector<LossPiece> pieces,
                                   double max_loss)
    : atoms_(std::move(atoms)), pieces_(std::move(pieces)), max_loss_(max_loss), mean_(0.0) {
    if (!(max_loss_ > 0.0) || !std::isfinite(max_loss_)) {
        throw ValidationError("max_loss must be positive and finite");
    }

    double total = 0.0;
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
        const LossAtom& atom = atoms_[i];
        if (atom.point < 0.0 || atom.point > max_loss_) {
            throw ValidationError("atom " + std::to_string(i) + " lies outside [0, max_loss]");
        }
        if (!(atom.mass >= 0.0)) {
            throw ValidationError("atom " + std::to_string(i) + " has negative mass");
        }
        total += atom.mass;
    }
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
        const LossPiece& piece = pieces_[i];
        if (!(piece.lo >= 0.0) || !(piece.hi <= max_loss_) || !(piece.lo < piece.hi)) {
            throw ValidationError("piece " + std::to_string(i) +
                                  " must satisfy 0 <= lo < hi <= max_loss");
        }
        if (!(piece.weight >= 0.0)) {
            throw ValidationError("piece " + std::to_string(i) + " has negative weight");
        }
        validate_kernel(piece.kernel, i);
        total += piece.weight;
    }
    if (std::abs(total - 1.0) > 1e-12) {
        throw ValidationError("atom masses and piece weights sum to " + std::to_string(total) +
                              ", expected 1");
    }

    for (const LossAtom& atom : atoms_) kinks_.push_back(atom.point);
    for (const LossPiece& piece : pieces_) {
        kinks_.push_back(piece.lo);
        kinks_.push_back(piece.hi);
    }
    std::sort(kinks_.begin(), kinks_.end());
    kinks_.erase(std::unique(kinks_.begin(), kinks_.end()), kinks_.end());

    mean_ = 0.0;
    for (const LossAtom& atom : atoms_) mean_ += atom.mass * atom.point;
    for (const LossPiece& piece : pieces_) {
        mean_ += piece.weight * kernel_partial_mean(piece.kernel, piece.lo, piece.hi) /
                 piece.normaliser();
    }
}

double cdf(const LossDistribution& dist, double x) {
    if (x < 0.0) return 0.0;
    double total = 0.0;
    for (const LossAtom& atom : dist.atoms()) {
        if (atom.point <= x) total += atom.mass;
    }
    for (const LossPiece& piece : dist.pieces()) total += piece.mass_below(x);
    return std::min(total, 1.0);
}

double survival(const LossDistribution& dist, double x) { return 1.0 - cdf(dist, x); }

double stop_loss(const LossDistribution& dist, double y) {
    if (y <= 0.0) return dist.mean() - y;
    if (y >= dist.max_loss()) return 0.0;
    double total = 0.0;
    for (const LossAtom& atom : dist.atoms()) {
        if (atom.point > y) total += atom.mass * (atom.point - y);
    }
    for (const LossPiece& piece : dist.pieces()) {
        double lo = std::max(piece.lo, y);
        if (lo >= piece.hi) continue;
        double scale = piece.weight / piece.normaliser();
        total += scale * (kernel_partial_mean(piece.kernel, lo, piece.hi) -
                          y * kernel_mass(piece.kernel, lo, piece.hi));
    }
    return std::max(total, 0.0);
}

double layer_expectation(const LossDistribution& dist, double y, double width) {
    if (width <= 0.0) return 0.0;
    double value = stop_loss(dist, y) - stop_loss(dist, y + width);
    return std::max(value, 0.0);
}

}  // namespace indemnify
