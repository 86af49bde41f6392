#ifndef INDEMNIFY_ROOTFIND_HPP
#define INDEMNIFY_ROOTFIND_HPP

#include <functional>

namespace indemnify {

struct BisectionOptions {
    double x_tol = 1e-10;
    int max_iterations = 200;
};

struct RootResult {
    double root = 0.0;
    double residual = 0.0;  // f evaluated at root
    int iterations = 0;
};

// Bisection for f with a sign change on [lo, hi]. f_lo and f_hi are the
// endpoint values (callers usually already have them). Throws BracketFailure
// when the endpoints have the same strict sign.
RootResult bisect(const std::function<double(double)>& f, double lo, double hi,
                  double f_lo, double f_hi, const BisectionOptions& opts = {});

// Bisection specialised to nonincreasing f with f(lo) >= 0 >= f(hi):
// converges to inf{x : f(x) <= 0}, which also resolves flat stretches of f
// to their left edge. Returns lo immediately when f(lo) <= 0.
RootResult bisect_leftmost(const std::function<double(double)>& f, double lo, double hi,
                           const BisectionOptions& opts = {});

struct GoldenResult {
    double arg = 0.0;
    double value = 0.0;
    int iterations = 0;
};

// Golden-section maximisation of f on [lo, hi].
GoldenResult golden_maximize(const std::function<double(double)>& f, double lo, double hi,
                             double x_tol = 1e-8, int max_iterations = 200);

}  // namespace indemnify

#endif
