#include "indemnify/utility.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "indemnify/errors.hpp"

namespace indemnify {

namespace {

void check_positive_wealth(double x) {
    if (!(x > 0.0)) {
        throw DomainViolation("utility evaluated at wealth " + std::to_string(x) +
                              ", domain requires wealth > 0");
    }
}

}  // namespace

UtilityModel UtilityModel::power(double gamma) {
    if (!(gamma > 0.0) || gamma == 1.0) {
        throw ValidationError("power utility needs gamma > 0, gamma != 1 (got " +
                              std::to_string(gamma) + ")");
    }
    return UtilityModel(UtilityKind::power, gamma);
}

UtilityModel UtilityModel::logarithmic() { return UtilityModel(UtilityKind::logarithmic, 0.0); }

UtilityModel UtilityModel::exponential(double alpha) {
    if (!(alpha > 0.0)) {
        throw ValidationError("exponential utility needs alpha > 0 (got " +
                              std::to_string(alpha) + ")");
    }
    return UtilityModel(UtilityKind::exponential, alpha);
}

double UtilityModel::domain_lower_bound() const {
    return kind_ == UtilityKind::exponential ? -std::numeric_limits<double>::infinity() : 0.0;
}

double UtilityModel::u(double x) const {
    switch (kind_) {
        case UtilityKind::power:
            check_positive_wealth(x);
            return std::pow(x, 1.0 - param_) / (1.0 - param_);
        case UtilityKind::logarithmic:
            check_positive_wealth(x);
            return std::log(x);
        case UtilityKind::exponential:
        default:
            return -std::exp(-param_ * x) / param_;
    }
}

double UtilityModel::u_prime(double x) const {
    switch (kind_) {
        case UtilityKind::power:
            check_positive_wealth(x);
            return std::pow(x, -param_);
        case UtilityKind::logarithmic:
            check_positive_wealth(x);
            return 1.0 / x;
        case UtilityKind::exponential:
        default:
            return std::exp(-param_ * x);
    }
}

double UtilityModel::u_double_prime(double x) const {
    switch (kind_) {
        case UtilityKind::power:
            check_positive_wealth(x);
            return -param_ * std::pow(x, -param_ - 1.0);
        case UtilityKind::logarithmic:
            check_positive_wealth(x);
            return -1.0 / (x * x);
        case UtilityKind::exponential:
        default:
            return -param_ * std::exp(-param_ * x);
    }
}

double UtilityModel::risk_aversion(double x) const {
    switch (kind_) {
        case UtilityKind::power:
            check_positive_wealth(x);
            return param_ / x;
        case UtilityKind::logarithmic:
            check_positive_wealth(x);
            return 1.0 / x;
        case UtilityKind::exponential:
        default:
            return param_;
    }
}

bool UtilityModel::is_dara() const { return true; }

bool UtilityModel::is_strictly_dara() const { return kind_ != UtilityKind::exponential; }

}  // namespace indemnify
