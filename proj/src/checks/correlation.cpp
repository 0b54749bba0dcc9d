#include <cmath>
#include <numbers>

#include "check_util.hpp"
#include "gcl/checks.hpp"
#include "gcl/measure.hpp"

namespace gcl {
namespace {

using detail::describe_inputs;
using detail::mc_value;
using detail::require_same_dim;

// Delta-method SE of g(pA, pB, pAB) for a joint estimate.
double joint_delta_se(const JointEstimate& j, const Eigen::Vector3d& grad)
{
    const double n = static_cast<double>(j.pA.samples);
    return std::sqrt(std::max(0.0, grad.dot(j.cov_terms * grad) / n));
}

Estimate product_estimate(const JointEstimate& j)
{
    const Eigen::Vector3d g(j.pB.value, j.pA.value, 0.0);
    return mc_value(j.pA.value * j.pB.value, joint_delta_se(j, g), j.pA.samples);
}

std::optional<Vector> box_halfwidths(const Body& body)
{
    if (const auto* b = body.as<shape::AxisBox>()) {
        return b->halfwidths;
    }
    if (const auto* i = body.as<shape::Intersection>()) {
        std::optional<Vector> w;
        for (const Body& p : i->parts) {
            auto pw = box_halfwidths(p);
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

CheckReport correlation_check(const Body& a, const Body& b, const GaussianSpec& spec, std::uint64_t n_samples,
                              const Stream& stream)
{
    require_same_dim(a, b, spec.dim());
    const JointEstimate j = mc_joint(a, b, spec, n_samples, stream);
    CheckReport r;
    r.name = "correlation";
    r.relation = Relation::ge;
    r.lhs = j.pAB;
    r.rhs = product_estimate(j);
    r.slack = j.slack();
    r.slack_se = j.slack_se();
    r.inputs = describe_inputs({{"a", &a}, {"b", &b}}, stream);
    r.inputs["gaussian"] = spec.to_json();
    r.details["joint"] = to_json(j);
    r.finalize();
    return r;
}

CheckReport pow2_bound_check(const Body& a, const Body& b, const GaussianSpec& spec, std::uint64_t n_samples,
                             const Stream& stream)
{
    require_same_dim(a, b, spec.dim());
    const JointEstimate j = mc_joint(a, b, spec, n_samples, stream);
    const double factor = std::pow(2.0, 0.5 * spec.dim());
    CheckReport r;
    r.name = "pow2_bound";
    r.relation = Relation::le;
    r.lhs = product_estimate(j);
    r.rhs = mc_value(factor * j.pAB.value, factor * j.pAB.std_error, j.pAB.samples);
    r.slack = factor * j.pAB.value - j.pA.value * j.pB.value;
    r.slack_se = joint_delta_se(j, Eigen::Vector3d(-j.pB.value, -j.pA.value, factor));
    r.inputs = describe_inputs({{"a", &a}, {"b", &b}}, stream);
    r.inputs["gaussian"] = spec.to_json();
    r.details["joint"] = to_json(j);
    r.details["factor"] = factor;
    r.finalize();
    return r;
}

CheckReport cor2_check(const Body& a, const Body& b, const GaussianSpec& spec, std::uint64_t n_samples,
                       const Stream& stream)
{
    require_same_dim(a, b, spec.dim());
    if (!spec.is_standard()) {
        throw ContractViolation("cor2_check: requires the standard Gaussian");
    }
    const Body sum = minkowski_sum(a, b);
    if (!exact_minkowski_family(sum)) {
        throw UnsupportedError("cor2_check: the volume of A+B is only known for Ball+Ball and AxisBox+AxisBox");
    }
    const int n = spec.dim();
    const double volume = lebesgue_volume(sum, 1, stream).value;
    const double kappa = std::pow(2.0 * std::numbers::pi, 0.5 * n) / volume;
    const JointEstimate j = mc_joint(a, b, spec, n_samples, stream);
    CheckReport r;
    r.name = "cor2";
    r.relation = Relation::ge;
    r.lhs = j.pAB;
    const Estimate prod = product_estimate(j);
    r.rhs = mc_value(kappa * prod.value, kappa * prod.std_error, prod.samples);
    r.slack = j.pAB.value - kappa * prod.value;
    r.slack_se = joint_delta_se(j, Eigen::Vector3d(-kappa * j.pB.value, -kappa * j.pA.value, 1.0));
    r.inputs = describe_inputs({{"a", &a}, {"b", &b}}, stream);
    r.details["joint"] = to_json(j);
    r.details["sum_volume"] = volume;
    r.details["factor"] = kappa;
    r.finalize();
    return r;
}

CheckReport small_sets_check(const Body& a, const Body& b, const GaussianSpec& spec, std::uint64_t n_samples,
                             const Stream& stream)
{
    require_same_dim(a, b, spec.dim());
    const double limit = rho_n(spec.dim());
    for (const auto& [name, body] : {std::pair{"a", &a}, std::pair{"b", &b}}) {
        const double radius = bounding_radius(*body);
        if (!(radius <= limit)) {
            throw ContainmentError(std::string("small_sets_check: body ") + name + " has bounding radius " +
                                       std::to_string(radius) + " > rho_n = " + std::to_string(limit),
                                   radius, limit);
        }
    }
    CheckReport r = correlation_check(a, b, spec, n_samples, stream);
    r.name = "small_sets";
    r.details["containment"] = {
        {"rho_n", limit}, {"radius_a", bounding_radius(a)}, {"radius_b", bounding_radius(b)}};
    return r;
}

CheckReport prop1_check(const Body& a, const Body& b, const GaussianSpec& spec, std::uint64_t n_samples,
                        const Stream& stream, std::span<const Vector> directions)
{
    const int n = spec.dim();
    require_same_dim(a, b, n);
    const Body sum = minkowski_sum(a, b);
    const bool exact = exact_minkowski_family(sum);
    if (!exact && directions.empty()) {
        throw UnsupportedError("prop1_check: A+B membership is exact only for Ball+Ball and AxisBox+AxisBox; "
                               "supply a direction set for other pairs");
    }
    const Body shrunk = scale(intersect(a, b), std::numbers::sqrt2);
    const MomentSums sums = mc_accumulate(4, n_samples, stream, "gauss", [&](Stream& s, std::span<double> out) {
        ScratchVector x(n);
        const std::span<double> xs(x.data(), static_cast<std::size_t>(n));
        spec.sample(s, xs);
        out[0] = contains(a, xs) ? 1.0 : 0.0;
        out[1] = contains(b, xs) ? 1.0 : 0.0;
        out[2] = contains(shrunk, xs) ? 1.0 : 0.0;
        const ScratchVector y = std::numbers::sqrt2 * x;
        const std::span<const double> ys(y.data(), static_cast<std::size_t>(n));
        out[3] = (exact ? contains(sum, ys) : minkowski_contains(sum, ys, directions)) ? 1.0 : 0.0;
    });
    const double pa = sums.mean(0);
    const double pb = sums.mean(1);
    const double pi = sums.mean(2);
    const double ps = sums.mean(3);
    const std::uint64_t cnt = sums.count();

    CheckReport r;
    r.name = "prop1";
    r.relation = Relation::le;
    const double ga[4] = {pb, pa, 0.0, 0.0};
    const double gb[4] = {0.0, 0.0, ps, pi};
    const double gs[4] = {-pb, -pa, ps, pi};
    r.lhs = mc_value(pa * pb, sums.delta_se(ga), cnt);
    r.rhs = mc_value(pi * ps, sums.delta_se(gb), cnt);
    r.slack = pi * ps - pa * pb;
    r.slack_se = sums.delta_se(gs);
    r.inputs = describe_inputs({{"a", &a}, {"b", &b}}, stream);
    r.inputs["gaussian"] = spec.to_json();
    r.details["terms"] = {{"pA", to_json(sums.estimate(0))},
                          {"pB", to_json(sums.estimate(1))},
                          {"p_sqrt2_intersection", to_json(sums.estimate(2))},
                          {"p_half_sum", to_json(sums.estimate(3))}};
    if (exact) {
        r.details["minkowski"] = "exact";
    } else {
        r.details["minkowski"] = "outer_approximation";
        r.details["directions"] = directions.size();
    }
    r.finalize();
    return r;
}

CheckReport tensor_lift_check(const Body& a, const Body& b, int copies, const GaussianSpec& spec,
                              std::uint64_t n_samples, const Stream& stream, std::optional<double> amplification)
{
    const int n = spec.dim();
    require_same_dim(a, b, n);
    if (copies < 1) {
        throw ContractViolation("tensor_lift_check: copies must be >= 1");
    }
    if (copies * n > kMaxDim) {
        throw ContractViolation("tensor_lift_check: copies * n = " + std::to_string(copies * n) +
                                " exceeds the dimension cap " + std::to_string(kMaxDim));
    }
    CheckReport r;
    r.name = "tensor_lift";
    r.relation = Relation::eq;
    r.inputs = describe_inputs({{"a", &a}, {"b", &b}}, stream);
    r.inputs["gaussian"] = spec.to_json();
    r.inputs["copies"] = copies;

    const auto box = spec.is_standard() ? box_halfwidths(intersect(a, b)) : std::nullopt;
    if (box) {
        Vector tiled(copies * n);
        for (int c = 0; c < copies; ++c) {
            tiled.segment(c * n, n) = *box;
        }
        r.lhs = box_measure(tiled);
        r.rhs = Estimate::exact(std::pow(box_measure(*box).value, copies));
        r.slack = r.lhs.value - r.rhs.value;
        r.slack_se = 0.0;
        r.details["route"] = "exact_box";
    } else {
        const Stream direct = stream.derive("direct", 0);
        const Stream base = stream.derive("base", 0);
        const MomentSums lifted = mc_accumulate(1, n_samples, direct, "gauss", [&](Stream& s, std::span<double> out) {
            ScratchVector x(n);
            const std::span<double> xs(x.data(), static_cast<std::size_t>(n));
            bool inside = true;
            // Draw every block even after a miss so the stream layout does
            // not depend on the bodies.
            for (int c = 0; c < copies; ++c) {
                spec.sample(s, xs);
                inside = inside && contains(a, xs) && contains(b, xs);
            }
            out[0] = inside ? 1.0 : 0.0;
        });
        const JointEstimate j = mc_joint(a, b, spec, n_samples, base);
        const double p = j.pAB.value;
        const double power = std::pow(p, copies);
        const double power_se = copies * std::pow(p, copies - 1) * j.pAB.std_error;
        r.lhs = lifted.estimate(0);
        r.rhs = mc_value(power, power_se, j.pAB.samples);
        r.slack = r.lhs.value - r.rhs.value;
        r.slack_se = std::hypot(r.lhs.std_error, power_se);
        r.details["route"] = "independent_streams";
        r.details["pAB"] = to_json(j.pAB);
    }
    if (amplification) {
        const double c = *amplification;
        nlohmann::json table = nlohmann::json::array();
        for (int k = 1; k <= copies; ++k) {
            table.push_back({{"copies", k}, {"c_root", std::pow(c, 1.0 / k)}});
        }
        r.details["amplification"] = {{"c", c}, {"table", std::move(table)}};
    }
    r.finalize();
    return r;
}

CheckReport cor6_check(const Body& a, double radius, const GaussianSpec& spec, std::uint64_t n_samples,
                       const Stream& stream)
{
    const int n = spec.dim();
    if (a.dim() != n) {
        throw ContractViolation("cor6_check: body dimension does not match the Gaussian");
    }
    if (!(radius > 0.0)) {
        throw ContractViolation("cor6_check: radius must be positive");
    }
    if (!spec.is_standard()) {
        throw ContractViolation("cor6_check: the exact ball factor needs the standard Gaussian");
    }
    const double q = ball_measure(n, radius).value;
    const double r2 = radius * radius;
    const MomentSums sums = mc_accumulate(2, n_samples, stream, "gauss", [&](Stream& s, std::span<double> out) {
        ScratchVector x(n);
        const std::span<double> xs(x.data(), static_cast<std::size_t>(n));
        spec.sample(s, xs);
        const bool ia = contains(a, xs);
        out[0] = ia ? 1.0 : 0.0;
        out[1] = (ia && x.squaredNorm() <= r2) ? 1.0 : 0.0;
    });
    CheckReport r;
    r.name = "cor6";
    r.relation = Relation::ge;
    const Estimate pa = sums.estimate(0);
    r.lhs = sums.estimate(1);
    r.rhs = mc_value(q * pa.value, q * pa.std_error, pa.samples);
    r.slack = r.lhs.value - r.rhs.value;
    const double grad[2] = {-q, 1.0};
    r.slack_se = sums.delta_se(grad);
    r.inputs = describe_inputs({{"a", &a}}, stream);
    r.inputs["radius"] = radius;
    r.details["ball_measure"] = q;
    r.details["pA"] = to_json(pa);
    r.finalize();
    return r;
}

} // namespace gcl
