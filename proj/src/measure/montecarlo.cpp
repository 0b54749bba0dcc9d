#include <cmath>

#include "gcl/errors.hpp"
#include "gcl/measure.hpp"

namespace gcl {
namespace {

void require_dims(std::span<const Body> bodies, const GaussianSpec& spec)
{
    for (const Body& b : bodies) {
        if (b.dim() != spec.dim()) {
            throw ContractViolation("body dimension does not match the Gaussian dimension");
        }
    }
}

void require_samples(std::uint64_t n)
{
    if (n < 1) {
        throw ContractViolation("sample count must be >= 1");
    }
}

// Closed-form volume, or nullopt when only sampling applies.
std::optional<double> exact_volume(const Body& body)
{
    const int n = body.dim();
    if (const auto* b = body.as<shape::Ball>()) {
        return ball_volume(n, b->radius);
    }
    if (const auto* b = body.as<shape::AxisBox>()) {
        double v = 1.0;
        for (double w : b->halfwidths) {
            v *= 2.0 * w;
        }
        return v;
    }
    if (const auto* e = body.as<shape::Ellipsoid>()) {
        double v = ball_volume(n, 1.0);
        for (double r : e->radii) {
            v *= r;
        }
        return v;
    }
    if (const auto* s = body.as<shape::Slab>()) {
        if (n == 1) {
            return 2.0 * s->halfwidth;
        }
        return std::nullopt;
    }
    if (const auto* s = body.as<shape::Scaled>()) {
        if (auto inner = exact_volume(*s->inner)) {
            return std::pow(s->factor, n) * *inner;
        }
        return std::nullopt;
    }
    if (const auto* r = body.as<shape::Rotated>()) {
        return exact_volume(*r->inner);
    }
    if (const auto* m = body.as<shape::MinkowskiSum>()) {
        const auto* ba = m->a->as<shape::Ball>();
        const auto* bb = m->b->as<shape::Ball>();
        if (ba && bb) {
            return ball_volume(n, ba->radius + bb->radius);
        }
        const auto* xa = m->a->as<shape::AxisBox>();
        const auto* xb = m->b->as<shape::AxisBox>();
        if (xa && xb) {
            return (2.0 * (xa->halfwidths + xb->halfwidths)).prod();
        }
    }
    return std::nullopt;
}

} // namespace

MomentSums mc_indicators(std::span<const Body> bodies, const GaussianSpec& spec, std::uint64_t n_samples,
                         const Stream& stream)
{
    require_samples(n_samples);
    require_dims(bodies, spec);
    const int n = spec.dim();
    return mc_accumulate(bodies.size(), n_samples, stream, "gauss", [&](Stream& s, std::span<double> out) {
        ScratchVector x(n);
        const std::span<double> xs(x.data(), static_cast<std::size_t>(n));
        spec.sample(s, xs);
        for (std::size_t i = 0; i < bodies.size(); ++i) {
            out[i] = contains(bodies[i], xs) ? 1.0 : 0.0;
        }
    });
}

Estimate mc_measure(const Body& body, const GaussianSpec& spec, std::uint64_t n_samples, const Stream& stream)
{
    const MomentSums sums = mc_indicators(std::span<const Body>(&body, 1), spec, n_samples, stream);
    return sums.estimate(0);
}

JointEstimate mc_joint(const Body& a, const Body& b, const GaussianSpec& spec, std::uint64_t n_samples,
                       const Stream& stream)
{
    require_samples(n_samples);
    require_dims(std::span<const Body>(&a, 1), spec);
    require_dims(std::span<const Body>(&b, 1), spec);
    const int n = spec.dim();
    const MomentSums sums = mc_accumulate(3, n_samples, stream, "gauss", [&](Stream& s, std::span<double> out) {
        ScratchVector x(n);
        const std::span<double> xs(x.data(), static_cast<std::size_t>(n));
        spec.sample(s, xs);
        const bool ia = contains(a, xs);
        const bool ib = contains(b, xs);
        out[0] = ia ? 1.0 : 0.0;
        out[1] = ib ? 1.0 : 0.0;
        out[2] = (ia && ib) ? 1.0 : 0.0;
    });
    JointEstimate j;
    j.pA = sums.estimate(0);
    j.pB = sums.estimate(1);
    j.pAB = sums.estimate(2);
    j.cov_terms = sums.covariance();
    return j;
}

Estimate lebesgue_volume(const Body& body, std::uint64_t n_samples, const Stream& stream)
{
    if (auto v = exact_volume(body)) {
        return Estimate::exact(*v);
    }
    const double radius = bounding_radius(body);
    if (!std::isfinite(radius)) {
        throw ContractViolation("lebesgue_volume: body is unbounded");
    }
    require_samples(n_samples);
    const int n = body.dim();
    const RadialMeasure uniform = RadialMeasure::uniform_ball(n, radius);
    const MomentSums sums = mc_accumulate(1, n_samples, stream, "volume", [&](Stream& s, std::span<double> out) {
        ScratchVector x(n);
        const std::span<double> xs(x.data(), static_cast<std::size_t>(n));
        uniform.sample(s, xs);
        out[0] = contains(body, xs) ? 1.0 : 0.0;
    });
    const double vol = ball_volume(n, radius);
    const Estimate hit = sums.estimate(0);
    return Estimate{vol * hit.value, vol * hit.std_error, hit.samples, Method::mc};
}

MomentSums marginal_profile_sums(const Body& body, int axis, std::span<const double> grid, const GaussianSpec& spec,
                                 std::uint64_t n_samples, const Stream& stream)
{
    const int n = body.dim();
    if (!spec.is_standard()) {
        throw ContractViolation("marginal_profile: requires the standard Gaussian");
    }
    if (spec.dim() != n) {
        throw ContractViolation("marginal_profile: dimension mismatch");
    }
    if (axis < 0 || axis >= n) {
        throw ContractViolation("marginal_profile: axis out of range");
    }
    for (std::size_t g = 1; g < grid.size(); ++g) {
        if (grid[g] < grid[g - 1]) {
            throw ContractViolation("marginal_profile: grid must be sorted");
        }
    }
    require_samples(n_samples);
    return mc_accumulate(grid.size(), n_samples, stream, "slice", [&](Stream& s, std::span<double> out) {
        ScratchVector x(n);
        for (int i = 0; i < n; ++i) {
            x[i] = (i == axis) ? 0.0 : s.next_normal();
        }
        const std::span<const double> xs(x.data(), static_cast<std::size_t>(n));
        for (std::size_t g = 0; g < grid.size(); ++g) {
            x[axis] = grid[g];
            out[g] = contains(body, xs) ? 1.0 : 0.0;
        }
    });
}

std::vector<Estimate> marginal_profile(const Body& body, int axis, std::span<const double> grid,
                                       const GaussianSpec& spec, std::uint64_t n_samples, const Stream& stream)
{
    const MomentSums sums = marginal_profile_sums(body, axis, grid, spec, n_samples, stream);
    std::vector<Estimate> out;
    out.reserve(grid.size());
    for (std::size_t g = 0; g < grid.size(); ++g) {
        out.push_back(sums.estimate(g));
    }
    return out;
}

} // namespace gcl
