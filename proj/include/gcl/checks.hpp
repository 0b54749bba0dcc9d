#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "gcl/body.hpp"
#include "gcl/gaussian.hpp"
#include "gcl/report.hpp"
#include "gcl/stream.hpp"

namespace gcl {

/// mu(A and B) >= mu(A) mu(B) on one common sample.
CheckReport correlation_check(const Body& a, const Body& b, const GaussianSpec& spec, std::uint64_t n_samples,
                              const Stream& stream);

/// X = T z split into the first k coordinates and the rest:
/// P(all |X_i| <= w_i) >= P(first group) P(second group).
///
/// When one group is a single coordinate, the estimator conditions on the
/// other group and integrates that coordinate exactly, so independent
/// groups give slack exactly zero.
CheckReport khatri_sidak_check(const GaussianSpec& spec, int k, const Vector& halfwidths, std::uint64_t n_samples,
                               const Stream& stream);

/// P(all |X_i| <= w_i) >= prod P(|X_i| <= w_i) with exact marginals.
CheckReport sidak_product_check(const GaussianSpec& spec, const Vector& halfwidths, std::uint64_t n_samples,
                                const Stream& stream);

/// mu(A) mu(B) <= mu(sqrt2 (A and B)) mu((A + B)/sqrt2).
///
/// Minkowski membership is exact for Ball+Ball and AxisBox+AxisBox. For
/// other pairs the caller must supply support directions; membership is
/// then an outer approximation and the report says so. Without directions
/// the check throws UnsupportedError.
CheckReport prop1_check(const Body& a, const Body& b, const GaussianSpec& spec, std::uint64_t n_samples,
                        const Stream& stream, std::span<const Vector> directions = {});

/// mu(A) mu(B) <= 2^{n/2} mu(A and B).
CheckReport pow2_bound_check(const Body& a, const Body& b, const GaussianSpec& spec, std::uint64_t n_samples,
                             const Stream& stream);

/// mu(A and B) >= (2 pi)^{n/2} / vol(A + B) * mu(A) mu(B). Needs an exact
/// Minkowski family so the volume of the sum is known.
CheckReport cor2_check(const Body& a, const Body& b, const GaussianSpec& spec, std::uint64_t n_samples,
                       const Stream& stream);

/// Correlation check for bodies inside the ball of radius rho_n. Throws
/// ContainmentError if either body is not certified inside.
CheckReport small_sets_check(const Body& a, const Body& b, const GaussianSpec& spec, std::uint64_t n_samples,
                             const Stream& stream);

/// mu_{kn}(A^k and B^k) = mu_n(A and B)^k, the two sides estimated on
/// independent streams. `amplification` (if given) is tabulated as c^{1/j}
/// for j = 1..copies.
CheckReport tensor_lift_check(const Body& a, const Body& b, int copies, const GaussianSpec& spec,
                              std::uint64_t n_samples, const Stream& stream,
                              std::optional<double> amplification = std::nullopt);

using InvariantMeasure = std::variant<GaussianSpec, RadialMeasure>;

/// Average over M Haar rotations U of nu(A and U B) >= nu(A) nu(B). The
/// sample x is shared by all rotations.
CheckReport rotation_average_check(const Body& a, const Body& b, const InvariantMeasure& measure, int rotations,
                                   std::uint64_t n_samples, const Stream& stream);

/// mu(A and rB) >= mu(A) mu(rB) with mu(rB) exact.
CheckReport cor6_check(const Body& a, double r, const GaussianSpec& spec, std::uint64_t n_samples,
                       const Stream& stream);

struct OrthantOptions {
    /// Points sampled for the coordinate-projection condition.
    std::uint64_t projection_points = 100000;
    /// p-value above which orthant measures count as homogeneous.
    double homogeneity_alpha = 1e-3;
};

/// Sub-reports for the orthant decomposition under a product Gaussian:
/// the coordinate-projection condition, the orthant-pair sign condition,
/// the per-orthant inequality, and the resulting correlation inequality.
CheckReport orthant_conditions_check(const Body& a, const Body& b, const GaussianSpec& spec,
                                     std::uint64_t n_samples, const Stream& stream, const OrthantOptions& opts = {});

/// Indicator of body intersected with a coordinate orthant (given by signs,
/// +1 or -1 per axis). Empty signs means the whole space.
struct IndicatorSpec {
    Body body;
    std::vector<int> orthant;
};

/// f1(x) f2(y) <= f3(x max y) f4(x min y) on pairs drawn from the orthant
/// `signs` (default positive), with max/min taken in that orthant's order.
CheckReport kr_lattice_check(const IndicatorSpec& f1, const IndicatorSpec& f2, const IndicatorSpec& f3,
                             const IndicatorSpec& f4, std::uint64_t pairs, const Stream& stream,
                             std::vector<int> signs = {});

namespace logconcave {
struct BodyIndicator {
    Body body;
};
/// exp(-x^T P x / 2), P symmetric nonnegative definite.
struct GaussianBump {
    Matrix precision;
};
/// exp(-lambda * |x|_1)
struct L1Exponential {
    double lambda;
};
struct Constant {
    double value = 1.0;
};
} // namespace logconcave

using LogConcaveFn =
    std::variant<logconcave::BodyIndicator, logconcave::GaussianBump, logconcave::L1Exponential, logconcave::Constant>;

double evaluate(const LogConcaveFn& g, std::span<const double> x);
nlohmann::json to_json(const LogConcaveFn& g);

/// For A nonnegative definite and g log-concave and symmetric:
/// identity  E[e^{-<Ax,x>/2} g(x)] = det(I+A)^{-1/2} E[g((I+A)^{-1/2} x)]
/// inequality E[e^{-<Ax,x>/2} g(x)] >= E[e^{-<Ax,x>/2}] E[g(x)].
CheckReport prop11_identity_check(const Matrix& a, const LogConcaveFn& g, const GaussianSpec& spec,
                                  std::uint64_t n_samples, const Stream& stream);

/// Midpoint log-concavity f(t)^2 >= f(t-h) f(t+h) on a uniform grid, each
/// test at 3 propagated SEs. The positive values must form an interval.
CheckReport logconcavity_check(std::span<const double> values, std::span<const double> ses);

} // namespace gcl
