#ifndef INDEMNIFY_UTILITY_HPP
#define INDEMNIFY_UTILITY_HPP

namespace indemnify {

enum class UtilityKind { power, logarithmic, exponential };

// Strictly increasing, strictly concave utility in one of three parametric
// families. Power and log require strictly positive wealth.
class UtilityModel {
public:
    static UtilityModel power(double gamma);        // x^(1-g)/(1-g), g > 0, g != 1
    static UtilityModel logarithmic();              // ln x
    static UtilityModel exponential(double alpha);  // -exp(-a x)/a, a > 0

    UtilityKind kind() const { return kind_; }
    double parameter() const { return param_; }

    // Wealth must stay strictly above this bound (0 for power/log,
    // -infinity for exponential).
    double domain_lower_bound() const;

    double u(double x) const;
    double u_prime(double x) const;
    double u_double_prime(double x) const;

    // Absolute risk aversion -u''/u'.
    double risk_aversion(double x) const;

    // Risk aversion nowhere increasing in wealth. True for all three
    // families; exponential only weakly (constant), see is_strictly_dara.
    bool is_dara() const;
    bool is_strictly_dara() const;

private:
    UtilityModel(UtilityKind kind, double param) : kind_(kind), param_(param) {}

    UtilityKind kind_;
    double param_;
};

}  // namespace indemnify

#endif
