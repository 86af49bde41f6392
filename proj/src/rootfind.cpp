#include "indemnify/rootfind.hpp"

#include <cmath>
#include <string>

#include "indemnify/errors.hpp"

namespace indemnify {

RootResult bisect(const std::function<double(double)>& f, double lo, double hi,
                  double f_lo, double f_hi, const BisectionOptions& opts) {
    if (f_lo == 0.0) return {lo, 0.0, 0};
    if (f_hi == 0.0) return {hi, 0.0, 0};
    if ((f_lo > 0.0) == (f_hi > 0.0)) {
        throw BracketFailure("bisect: f(" + std::to_string(lo) + ")=" + std::to_string(f_lo) +
                             " and f(" + std::to_string(hi) + ")=" + std::to_string(f_hi) +
                             " have the same sign");
    }
    bool lo_positive = f_lo > 0.0;
    int it = 0;
    while (hi - lo > opts.x_tol && it < opts.max_iterations) {
        double mid = 0.5 * (lo + hi);
        double fm = f(mid);
        ++it;
        if (fm == 0.0) return {mid, 0.0, it};
        if ((fm > 0.0) == lo_positive) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    double root = 0.5 * (lo + hi);
    return {root, f(root), it};
}

RootResult bisect_leftmost(const std::function<double(double)>& f, double lo, double hi,
                           const BisectionOptions& opts) {
    double f_lo = f(lo);
    if (f_lo <= 0.0) return {lo, f_lo, 0};
    double f_hi = f(hi);
    if (f_hi > 0.0) {
        throw BracketFailure("bisect_leftmost: f stays positive up to " + std::to_string(hi) +
                             " (f=" + std::to_string(f_hi) + ")");
    }
    int it = 0;
    while (hi - lo > opts.x_tol && it < opts.max_iterations) {
        double mid = 0.5 * (lo + hi);
        double fm = f(mid);
        ++it;
        if (fm <= 0.0) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    double root = 0.5 * (lo + hi);
    return {root, f(root), it};
}

GoldenResult golden_maximize(const std::function<double(double)>& f, double lo, double hi,
                             double x_tol, int max_iterations) {
    const double inv_phi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    int it = 0;
    while (b - a > x_tol && it < max_iterations) {
        if (f1 >= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
        ++it;
    }
    double arg = 0.5 * (a + b);
    return {arg, f(arg), it};
}

}  // namespace indemnify
