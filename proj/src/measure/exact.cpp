#include <cmath>
#include <numbers>

#include "gcl/errors.hpp"
#include "gcl/measure.hpp"
#include "gcl/special.hpp"

namespace gcl {

Estimate gauss_1d_interval(double s)
{
    if (!(s >= 0.0)) {
        throw ContractViolation("gauss_1d_interval: halfwidth must be >= 0");
    }
    return Estimate::exact(std::erf(s / std::numbers::sqrt2));
}

Estimate box_measure(std::span<const double> halfwidths)
{
    double p = 1.0;
    for (double w : halfwidths) {
        if (!(w >= 0.0)) {
            throw ContractViolation("box_measure: halfwidths must be >= 0");
        }
        p *= std::erf(w / std::numbers::sqrt2);
    }
    return Estimate::exact(p);
}

Estimate box_measure(const Vector& halfwidths)
{
    return box_measure(std::span<const double>(halfwidths.data(), static_cast<std::size_t>(halfwidths.size())));
}

Estimate ball_measure(int n, double r)
{
    if (n < 1) {
        throw ContractViolation("ball_measure: dimension must be >= 1");
    }
    if (!(r >= 0.0)) {
        throw ContractViolation("ball_measure: radius must be >= 0");
    }
    if (std::isinf(r)) {
        return Estimate::exact(1.0);
    }
    return Estimate::exact(gamma_p(0.5 * n, 0.5 * r * r));
}

double ball_volume(int n, double r)
{
    if (n < 1) {
        throw ContractViolation("ball_volume: dimension must be >= 1");
    }
    if (!(r >= 0.0)) {
        throw ContractViolation("ball_volume: radius must be >= 0");
    }
    if (r == 0.0) {
        return 0.0;
    }
    const double half = 0.5 * n;
    return std::exp(half * std::log(std::numbers::pi) + n * std::log(r) - std::lgamma(1.0 + half));
}

double rho_n(int n)
{
    if (n < 1) {
        throw ContractViolation("rho_n: dimension must be >= 1");
    }
    return std::exp(std::lgamma(1.0 + 0.5 * n) / n) / std::numbers::sqrt2;
}

} // namespace gcl

namespace gcl {
namespace {

std::optional<Vector> box_of(const Body& body)
{
    if (const auto* b = body.as<shape::AxisBox>()) {
        return b->halfwidths;
    }
    if (const auto* i = body.as<shape::Intersection>()) {
        std::optional<Vector> w;
        for (const Body& p : i->parts) {
            auto pw = box_of(p);
            if (!pw) {
                return std::nullopt;
            }
            w = w ? Vector(w->cwiseMin(*pw)) : *pw;
        }
        return w;
    }
    return std::nullopt;
}

} // namespace

std::optional<Estimate> closed_form_measure(const Body& body)
{
    if (const auto* b = body.as<shape::Ball>()) {
        return ball_measure(body.dim(), b->radius);
    }
    if (const auto* s = body.as<shape::Slab>()) {
        return gauss_1d_interval(s->halfwidth);
    }
    if (const auto* e = body.as<shape::Ellipsoid>()) {
        return ellipsoid_measure(e->radii);
    }
    if (const auto* r = body.as<shape::Rotated>()) {
        return closed_form_measure(*r->inner);
    }
    if (auto w = box_of(body)) {
        return box_measure(*w);
    }
    return std::nullopt;
}

} // namespace gcl
