#include "gcl/special.hpp"

#include <cmath>
#include <numbers>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "gcl/errors.hpp"

namespace gcl {

double normal_cdf(double x)
{
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double normal_quantile(double p)
{
    if (!(p > 0.0 && p < 1.0)) {
        throw ContractViolation("normal_quantile: p must lie in (0, 1)");
    }
    return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

double interval_probability(double lo, double hi, double mean, double sd)
{
    if (!(hi >= lo)) {
        return 0.0;
    }
    const double a = (lo - mean) / sd;
    const double b = (hi - mean) / sd;
    if (a > 0.0) {
        // both in the upper tail
        return 0.5 * (std::erfc(a / std::numbers::sqrt2) - std::erfc(b / std::numbers::sqrt2));
    }
    if (b < 0.0) {
        return 0.5 * (std::erfc(-b / std::numbers::sqrt2) - std::erfc(-a / std::numbers::sqrt2));
    }
    return 1.0 - 0.5 * std::erfc(-a / std::numbers::sqrt2) - 0.5 * std::erfc(b / std::numbers::sqrt2);
}

double gamma_p(double a, double x)
{
    if (x <= 0.0) {
        return 0.0;
    }
    if (std::isinf(x)) {
        return 1.0;
    }
    return boost::math::gamma_p(a, x);
}

double gamma_q(double a, double x)
{
    if (x <= 0.0) {
        return 1.0;
    }
    if (std::isinf(x)) {
        return 0.0;
    }
    return boost::math::gamma_q(a, x);
}

double gamma_p_half_integer(int m, double x)
{
    if (x <= 0.0) {
        return 0.0;
    }
    // P(a+1, x) = P(a, x) - x^a e^{-x} / Gamma(a+1)
    double p;
    double a;
    double term; // x^a e^{-x} / Gamma(a+1) at the current a
    if (m % 2 == 0) {
        p = -std::expm1(-x);
        a = 1.0;
        term = x * std::exp(-x);
    } else {
        const double sx = std::sqrt(x);
        p = std::erf(sx);
        a = 0.5;
        term = sx * std::exp(-x) / std::tgamma(1.5);
    }
    for (int k = (m % 2 == 0) ? 2 : 1; k < m; k += 2) {
        p -= term;
        a += 1.0;
        term *= x / (a);
    }
    return p < 0.0 ? 0.0 : p;
}

double chi_square_cdf(double k, double x)
{
    return gamma_p(0.5 * k, 0.5 * x);
}

} // namespace gcl
