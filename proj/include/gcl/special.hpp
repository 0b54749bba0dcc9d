#pragma once

namespace gcl {

/// Standard normal CDF.
double normal_cdf(double x);

/// Standard normal quantile, p in (0, 1).
double normal_quantile(double p);

/// P(lo <= X <= hi) for X ~ N(mean, sd^2), sd > 0. Evaluated on the side of
/// the tails that avoids cancellation.
double interval_probability(double lo, double hi, double mean, double sd);

/// Regularized lower incomplete gamma P(a, x).
double gamma_p(double a, double x);

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
double gamma_q(double a, double x);

/// P(m/2, x) for a positive integer m by upward recursion from P(1/2, x)
/// or P(1, x). Absolute accuracy ~1e-15 for m <= 64; much cheaper than the
/// general routine.
double gamma_p_half_integer(int m, double x);

/// P(chi^2_k <= x)
double chi_square_cdf(double k, double x);

} // namespace gcl
