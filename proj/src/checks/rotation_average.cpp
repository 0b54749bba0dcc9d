#include <cmath>

#include "check_util.hpp"
#include "gcl/checks.hpp"
#include "gcl/exec.hpp"
#include "gcl/measure.hpp"

namespace gcl {
namespace {

struct RotationPartial {
    MomentSums sums{3};
    std::vector<double> hits; // per rotation, count of x in A and U_m B
};

} // namespace

CheckReport rotation_average_check(const Body& a, const Body& b, const InvariantMeasure& measure, int rotations,
                                   std::uint64_t n_samples, const Stream& stream)
{
    const int n = std::visit([](const auto& m) { return m.dim(); }, measure);
    detail::require_same_dim(a, b, n);
    if (rotations < 1) {
        throw ContractViolation("rotation_average_check: rotation count must be >= 1");
    }
    if (n_samples < 1) {
        throw ContractViolation("rotation_average_check: sample count must be >= 1");
    }
    const std::size_t m_count = static_cast<std::size_t>(rotations);
    // U^T for each rotation: x in U(B) iff U^T x in B.
    std::vector<Matrix> inverse;
    inverse.reserve(m_count);
    for (std::size_t m = 0; m < m_count; ++m) {
        Stream hs = stream.derive("haar", m);
        inverse.push_back(haar_orthogonal(hs, n).matrix().transpose());
    }
    auto draw = [&](Stream& s, std::span<double> out) {
        std::visit([&](const auto& mu) { mu.sample(s, out); }, measure);
    };

    const Stream xs_stream = stream.derive("x", 0);
    auto parts = map_chunks<RotationPartial>(n_samples, [&](std::uint64_t chunk, std::uint64_t count) {
        Stream s = xs_stream.derive("gauss", chunk);
        RotationPartial acc;
        acc.hits.assign(m_count, 0.0);
        ScratchVector x(n);
        ScratchVector y(n);
        const std::span<double> xs(x.data(), static_cast<std::size_t>(n));
        const std::span<const double> ys(y.data(), static_cast<std::size_t>(n));
        for (std::uint64_t i = 0; i < count; ++i) {
            draw(s, xs);
            const bool ia = contains(a, xs);
            const bool ib = contains(b, xs);
            double w = 0.0;
            if (ia) {
                for (std::size_t m = 0; m < m_count; ++m) {
                    y.noalias() = inverse[m] * x;
                    if (contains(b, ys)) {
                        acc.hits[m] += 1.0;
                        w += 1.0;
                    }
                }
            }
            const double row[3] = {ia ? 1.0 : 0.0, ib ? 1.0 : 0.0, w / static_cast<double>(m_count)};
            acc.sums.add(row);
        }
        return acc;
    });
    MomentSums sums(3);
    std::vector<double> hits(m_count, 0.0);
    for (const auto& p : parts) {
        sums.merge(p.sums);
        for (std::size_t m = 0; m < m_count; ++m) {
            hits[m] += p.hits[m];
        }
    }
    const double nd = static_cast<double>(sums.count());
    const double pa = sums.mean(0);
    const double pb = sums.mean(1);
    const double avg = sums.mean(2);

    // Between-rotation spread of the per-rotation estimates.
    double between_var = 0.0;
    if (m_count > 1) {
        double mean_d = 0.0;
        for (double h : hits) {
            mean_d += h / nd;
        }
        mean_d /= static_cast<double>(m_count);
        for (double h : hits) {
            const double d = h / nd - mean_d;
            between_var += d * d;
        }
        between_var /= static_cast<double>(m_count - 1);
    }
    const double grad[3] = {-pb, -pa, 1.0};
    const double x_se = sums.delta_se(grad);
    const double rot_se = std::sqrt(between_var / static_cast<double>(m_count));

    CheckReport r;
    r.name = "rotation_average";
    r.relation = Relation::ge;
    r.lhs = detail::mc_value(avg, std::hypot(sums.se(2), rot_se), sums.count());
    const double pgrad[3] = {pb, pa, 0.0};
    r.rhs = detail::mc_value(pa * pb, sums.delta_se(pgrad), sums.count());
    r.slack = avg - pa * pb;
    r.slack_se = std::hypot(x_se, rot_se);
    r.inputs = detail::describe_inputs({{"a", &a}, {"b", &b}}, stream);
    r.inputs["rotations"] = rotations;
    r.inputs["measure"] = std::visit(
        [](const auto& mu) -> nlohmann::json {
            if constexpr (std::is_same_v<std::decay_t<decltype(mu)>, GaussianSpec>) {
                return mu.to_json();
            } else {
                return {{"kind", "radial"}, {"name", mu.name()}, {"dim", mu.dim()}};
            }
        },
        measure);
    r.details["pA"] = to_json(sums.estimate(0));
    r.details["pB"] = to_json(sums.estimate(1));
    r.details["se_samples"] = x_se;
    r.details["se_rotations"] = rot_se;
    r.finalize();
    return r;
}

} // namespace gcl
