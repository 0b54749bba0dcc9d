#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "gcl/body.hpp"
#include "gcl/estimate.hpp"
#include "gcl/exec.hpp"
#include "gcl/gaussian.hpp"
#include "gcl/stream.hpp"

namespace gcl {

// Exact quantities.

/// mu_1([-s, s]).
Estimate gauss_1d_interval(double s);
/// Product of gauss_1d_interval over the halfwidths (standard Gaussian).
Estimate box_measure(std::span<const double> halfwidths);
Estimate box_measure(const Vector& halfwidths);
/// P(chi^2_n <= r^2).
Estimate ball_measure(int n, double r);
/// Lebesgue volume of the radius-r ball in R^n.
double ball_volume(int n, double r);
/// Radius with ball_volume(n, 2 rho) = (2 pi)^{n/2}.
double rho_n(int n);

/// Target and iteration cap for ellipsoid_measure.
struct EllipsoidOptions {
    double abs_tol = 1e-8;
    int max_panels = 4000;
};

/// P(sum x_i^2 / r_i^2 <= 1) for standard Gaussian x, by numerical
/// inversion of the characteristic function of the quadratic form.
/// std_error carries the estimated absolute error. Throws AccuracyError
/// if the target cannot be met.
Estimate ellipsoid_measure(std::span<const double> radii, const EllipsoidOptions& opts = {});
Estimate ellipsoid_measure(const Vector& radii, const EllipsoidOptions& opts = {});

/// Standard Gaussian measure in closed form or by quadrature when the body
/// allows it (balls, slabs, boxes and intersections of boxes, ellipsoids,
/// rotated copies of these); nullopt otherwise.
std::optional<Estimate> closed_form_measure(const Body& body);

// Monte Carlo.

/// Accumulates k per-sample values over N samples. Chunk c draws from
/// stream.derive(label, c) and `fn(chunk_stream, out)` fills the k values
/// of one sample. The result does not depend on the worker count.
template <class F>
MomentSums mc_accumulate(std::size_t k, std::uint64_t n_samples, const Stream& stream, std::string_view label, F&& fn)
{
    auto parts = map_chunks<MomentSums>(n_samples, [&](std::uint64_t chunk, std::uint64_t count) {
        Stream s = stream.derive(label, chunk);
        MomentSums acc(k);
        std::vector<double> row(k);
        for (std::uint64_t i = 0; i < count; ++i) {
            fn(s, std::span<double>(row));
            acc.add(row);
        }
        return acc;
    });
    if (parts.empty()) {
        return MomentSums(k);
    }
    return merge_in_order(parts);
}

/// Indicator sums for several bodies on one common Gaussian sample.
MomentSums mc_indicators(std::span<const Body> bodies, const GaussianSpec& spec, std::uint64_t n_samples,
                         const Stream& stream);

Estimate mc_measure(const Body& body, const GaussianSpec& spec, std::uint64_t n_samples, const Stream& stream);

/// mu(A), mu(B), mu(A and B) on one sample, with the slack SE.
JointEstimate mc_joint(const Body& a, const Body& b, const GaussianSpec& spec, std::uint64_t n_samples,
                       const Stream& stream);

/// Lebesgue volume. Closed form (method exact) for balls, boxes,
/// ellipsoids, 1D slabs, Ball+Ball and AxisBox+AxisBox sums, and scaled or
/// rotated copies of these; otherwise the hit rate of uniform samples in
/// the bounding ball. Throws ContractViolation for unbounded bodies.
Estimate lebesgue_volume(const Body& body, std::uint64_t n_samples, const Stream& stream);

/// Per-sample sums for the marginal profile: variable g is the indicator
/// that (y with t_g inserted at `axis`) lies in the body. Requires the
/// standard Gaussian.
MomentSums marginal_profile_sums(const Body& body, int axis, std::span<const double> grid, const GaussianSpec& spec,
                                 std::uint64_t n_samples, const Stream& stream);

/// f(t) = mu_{n-1}{y : (t, y) in body} at each grid value, with the slice
/// coordinate at position `axis`. Common sample across the grid.
std::vector<Estimate> marginal_profile(const Body& body, int axis, std::span<const double> grid,
                                       const GaussianSpec& spec, std::uint64_t n_samples, const Stream& stream);

} // namespace gcl
