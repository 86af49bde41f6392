#ifndef INDEMNIFY_QUADRATURE_HPP
#define INDEMNIFY_QUADRATURE_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <span>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "indemnify/errors.hpp"

namespace indemnify {

struct QuadratureOptions {
    double rel_tol = 1e-10;
    double abs_floor = 1e-14;
    int max_depth = 15;  // adaptive interval halvings per panel
};

// Integrates f over [lo, hi] with panel splits at the supplied kink
// abscissae, adaptive Gauss-Kronrod within each panel. Kinks outside
// (lo, hi) are ignored. Throws QuadratureError when a panel's error
// estimate stays above tolerance at full depth.
template <typename F>
double integrate(F&& f, double lo, double hi, std::span<const double> kinks,
                 const QuadratureOptions& opts = {}) {
    if (!(hi > lo)) return 0.0;

    std::vector<double> cuts;
    cuts.reserve(kinks.size() + 2);
    cuts.push_back(lo);
    for (double k : kinks) {
        if (k > lo && k < hi) cuts.push_back(k);
    }
    cuts.push_back(hi);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    using integrator = boost::math::quadrature::gauss_kronrod<double, 15>;
    double total = 0.0, err_sum = 0.0, l1_sum = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        double a = cuts[i], b = cuts[i + 1];
        if (b - a < 1e-15 * (1.0 + std::abs(a))) continue;
        double err = 0.0, l1 = 0.0;
        total += integrator::integrate(f, a, b, static_cast<unsigned>(opts.max_depth),
                                       opts.rel_tol, &err, &l1);
        err_sum += err;
        l1_sum += l1;
    }
    // Error is judged against the whole integral: a sliver panel may carry
    // a poor relative estimate while contributing nothing in absolute terms.
    double scale = std::max(std::abs(total), l1_sum);
    if (err_sum > std::max(opts.abs_floor, 100.0 * opts.rel_tol * scale)) {
        char buf[160];
        std::snprintf(buf, sizeof(buf),
                      "quadrature did not converge on [%.17g, %.17g]: error estimate %.3g "
                      "against scale %.3g",
                      lo, hi, err_sum, scale);
        throw QuadratureError(buf);
    }
    return total;
}

}  // namespace indemnify

#endif
