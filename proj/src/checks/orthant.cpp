#include <cmath>
#include <limits>

#include "check_util.hpp"
#include "gcl/checks.hpp"
#include "gcl/exec.hpp"
#include "gcl/measure.hpp"
#include "gcl/special.hpp"

namespace gcl {
namespace {

constexpr int kMaxOrthantDim = 12;

std::size_t orthant_index(const ScratchVector& x)
{
    std::size_t q = 0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (x[i] < 0.0) {
            q |= std::size_t{1} << i;
        }
    }
    return q;
}

struct OrthantCounts {
    std::vector<double> a, b, ab;
    MomentSums totals{3};
};

struct ProjectionResult {
    std::uint64_t inside = 0;
    std::uint64_t boundary = 0;
    std::uint64_t witnesses = 0;
    std::optional<std::pair<Vector, int>> witness;
};

bool in_both(const Body& a, const Body& b, const ScratchVector& x)
{
    const std::span<const double> xs(x.data(), static_cast<std::size_t>(x.size()));
    return contains(a, xs) && contains(b, xs);
}

// First axis i with x_i e_i outside A and B, or -1.
int projection_failure(const Body& a, const Body& b, const ScratchVector& x)
{
    ScratchVector p = ScratchVector::Zero(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        p[i] = x[i];
        const bool ok = in_both(a, b, p);
        p[i] = 0.0;
        if (!ok) {
            return static_cast<int>(i);
        }
    }
    return -1;
}

// Largest t with t x in A and B, to bisection precision; nullopt when the
// ray does not leave the set within the search range.
std::optional<double> boundary_scale(const Body& a, const Body& b, const ScratchVector& x)
{
    double lo = 0.0;
    double hi = 1.0;
    int doublings = 0;
    while (in_both(a, b, hi * x)) {
        lo = hi;
        hi *= 2.0;
        if (++doublings > 40) {
            return std::nullopt;
        }
    }
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (in_both(a, b, mid * x)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return lo;
}

CheckReport projection_condition(const Body& a, const Body& b, const GaussianSpec& spec, std::uint64_t points,
                                 const Stream& stream)
{
    const int n = spec.dim();
    auto parts = map_chunks<ProjectionResult>(points, [&](std::uint64_t chunk, std::uint64_t count) {
        Stream s = stream.derive("gauss", chunk);
        ProjectionResult res;
        ScratchVector x(n);
        for (std::uint64_t k = 0; k < count; ++k) {
            spec.sample(s, {x.data(), static_cast<std::size_t>(n)});
            auto record = [&](const ScratchVector& p) {
                const int axis = projection_failure(a, b, p);
                if (axis >= 0) {
                    if (res.witnesses++ == 0) {
                        res.witness = std::pair{Vector(p), axis};
                    }
                }
            };
            if (in_both(a, b, x)) {
                ++res.inside;
                record(x);
            }
            if (auto t = boundary_scale(a, b, x); t && *t > 0.0) {
                ++res.boundary;
                const ScratchVector edge = *t * x;
                if (in_both(a, b, edge)) {
                    record(edge);
                }
            }
        }
        return res;
    });
    ProjectionResult total;
    for (const auto& p : parts) {
        total.inside += p.inside;
        total.boundary += p.boundary;
        total.witnesses += p.witnesses;
        if (!total.witness && p.witness) {
            total.witness = p.witness;
        }
    }
    CheckReport r;
    r.name = "orthant_projection";
    r.relation = Relation::le;
    r.lhs = Estimate::exact(static_cast<double>(total.witnesses));
    r.rhs = Estimate::exact(0.0);
    r.slack = -static_cast<double>(total.witnesses);
    r.slack_se = 0.0;
    r.details["points"] = points;
    r.details["inside_points"] = total.inside;
    r.details["boundary_points"] = total.boundary;
    r.details["scope"] = "sampled falsification only";
    if (total.witness) {
        r.details["witness"] = {{"point", to_json(total.witness->first)}, {"axis", total.witness->second}};
    }
    r.finalize();
    return r;
}

double chi_square_homogeneity_p(const std::vector<double>& counts)
{
    double total = 0.0;
    for (double c : counts) {
        total += c;
    }
    if (total == 0.0) {
        return 1.0;
    }
    const double expected = total / static_cast<double>(counts.size());
    double stat = 0.0;
    for (double c : counts) {
        stat += (c - expected) * (c - expected) / expected;
    }
    return 1.0 - chi_square_cdf(static_cast<double>(counts.size() - 1), stat);
}

} // namespace

CheckReport orthant_conditions_check(const Body& a, const Body& b, const GaussianSpec& spec,
                                     std::uint64_t n_samples, const Stream& stream, const OrthantOptions& opts)
{
    const int n = spec.dim();
    detail::require_same_dim(a, b, n);
    if (n > kMaxOrthantDim) {
        throw ContractViolation("orthant_conditions_check: dimension " + std::to_string(n) + " exceeds the cap " +
                                std::to_string(kMaxOrthantDim));
    }
    if (!spec.is_product()) {
        throw ContractViolation("orthant_conditions_check: needs a product Gaussian (diagonal factor)");
    }
    if (n_samples < 1) {
        throw ContractViolation("orthant_conditions_check: sample count must be >= 1");
    }
    const std::size_t q_count = std::size_t{1} << n;
    const double nu_q = 1.0 / static_cast<double>(q_count);

    CheckReport cond_i = projection_condition(a, b, spec, opts.projection_points, stream.derive("projection", 0));

    const Stream os = stream.derive("orthants", 0);
    auto parts = map_chunks<OrthantCounts>(n_samples, [&](std::uint64_t chunk, std::uint64_t count) {
        Stream s = os.derive("gauss", chunk);
        OrthantCounts c;
        c.a.assign(q_count, 0.0);
        c.b.assign(q_count, 0.0);
        c.ab.assign(q_count, 0.0);
        ScratchVector x(n);
        const std::span<const double> xs(x.data(), static_cast<std::size_t>(n));
        for (std::uint64_t k = 0; k < count; ++k) {
            spec.sample(s, {x.data(), static_cast<std::size_t>(n)});
            const std::size_t q = orthant_index(x);
            const bool ia = contains(a, xs);
            const bool ib = contains(b, xs);
            c.a[q] += ia ? 1.0 : 0.0;
            c.b[q] += ib ? 1.0 : 0.0;
            c.ab[q] += (ia && ib) ? 1.0 : 0.0;
            const double row[3] = {ia ? 1.0 : 0.0, ib ? 1.0 : 0.0, (ia && ib) ? 1.0 : 0.0};
            c.totals.add(row);
        }
        return c;
    });
    OrthantCounts sum;
    sum.a.assign(q_count, 0.0);
    sum.b.assign(q_count, 0.0);
    sum.ab.assign(q_count, 0.0);
    for (const auto& p : parts) {
        for (std::size_t q = 0; q < q_count; ++q) {
            sum.a[q] += p.a[q];
            sum.b[q] += p.b[q];
            sum.ab[q] += p.ab[q];
        }
        sum.totals.merge(p.totals);
    }
    const double nd = static_cast<double>(sum.totals.count());
    std::vector<double> pa(q_count), pb(q_count), pab(q_count);
    for (std::size_t q = 0; q < q_count; ++q) {
        pa[q] = sum.a[q] / nd;
        pb[q] = sum.b[q] / nd;
        pab[q] = sum.ab[q] / nd;
    }

    // Orthant-pair sign condition, full route: worst standardized product.
    CheckReport cond_ii;
    cond_ii.name = "orthant_pairs";
    cond_ii.relation = Relation::ge;
    const std::size_t pair_count = q_count * (q_count - 1) / 2;
    cond_ii.thresholds = Thresholds::bonferroni(pair_count);
    {
        double worst_z = std::numeric_limits<double>::infinity();
        double worst_p = 0.0;
        double worst_se = 0.0;
        std::pair<std::size_t, std::size_t> worst_pair{0, 0};
        for (std::size_t q = 0; q < q_count; ++q) {
            for (std::size_t r = q + 1; r < q_count; ++r) {
                const double x = pa[q] - pa[r];
                const double y = pb[q] - pb[r];
                const double vx = std::max(0.0, pa[q] + pa[r] - x * x) / nd;
                const double vy = std::max(0.0, pb[q] + pb[r] - y * y) / nd;
                const double cxy = (pab[q] + pab[r] - x * y) / nd;
                const double var = y * y * vx + x * x * vy + 2.0 * x * y * cxy + vx * vy + cxy * cxy;
                const double se = std::sqrt(std::max(0.0, var));
                const double prod = x * y;
                const double z = se > 0.0 ? prod / se : (prod >= 0.0 ? 0.0 : -std::numeric_limits<double>::infinity());
                if (z < worst_z) {
                    worst_z = z;
                    worst_p = prod;
                    worst_se = se;
                    worst_pair = {q, r};
                }
            }
        }
        if (pair_count == 0) {
            worst_z = 0.0;
        }
        cond_ii.lhs = detail::mc_value(worst_p, worst_se, sum.totals.count());
        cond_ii.rhs = Estimate::exact(0.0);
        cond_ii.slack = worst_p;
        cond_ii.slack_se = worst_se;
        cond_ii.details["pairs"] = pair_count;
        cond_ii.details["worst_pair"] = {worst_pair.first, worst_pair.second};
        cond_ii.details["worst_z"] = worst_z;
        cond_ii.finalize();
        const Verdict full = cond_ii.verdict;
        const double p_a = chi_square_homogeneity_p(sum.a);
        const double p_b = chi_square_homogeneity_p(sum.b);
        const bool parenthetical = p_a > opts.homogeneity_alpha || p_b > opts.homogeneity_alpha;
        cond_ii.details["full_route"] = to_string(full);
        cond_ii.details["equal_measures_route"] = parenthetical ? "pass" : "fail";
        cond_ii.details["homogeneity_p"] = {{"a", p_a}, {"b", p_b}};
        if (full == Verdict::pass) {
            cond_ii.details["route"] = "full";
        } else if (parenthetical) {
            cond_ii.details["route"] = "equal_measures";
            cond_ii.verdict = Verdict::pass;
        } else {
            cond_ii.details["route"] = "none";
        }
    }

    // Per-orthant inequality nu(A Q) nu(B Q) <= nu(Q) nu(A B Q).
    CheckReport per_q;
    per_q.name = "orthant_inequality";
    per_q.relation = Relation::le;
    per_q.thresholds = Thresholds::bonferroni(q_count);
    {
        double worst_z = std::numeric_limits<double>::infinity();
        std::size_t worst_q = 0;
        double worst_se = 0.0;
        for (std::size_t q = 0; q < q_count; ++q) {
            const double x = pa[q];
            const double y = pb[q];
            const double w = pab[q];
            Eigen::Matrix3d c;
            c << x - x * x, w - x * y, w - x * w, w - x * y, y - y * y, w - y * w, w - x * w, w - y * w, w - w * w;
            const Eigen::Vector3d g(-y, -x, nu_q);
            const double se = std::sqrt(std::max(0.0, g.dot(c * g) / nd));
            const double slack = nu_q * w - x * y;
            const double z =
                se > 0.0 ? slack / se : (slack >= 0.0 ? 0.0 : -std::numeric_limits<double>::infinity());
            if (z < worst_z) {
                worst_z = z;
                worst_q = q;
                worst_se = se;
            }
        }
        per_q.lhs = detail::mc_value(pa[worst_q] * pb[worst_q], 0.0, sum.totals.count());
        per_q.rhs = detail::mc_value(nu_q * pab[worst_q], 0.0, sum.totals.count());
        per_q.slack = nu_q * pab[worst_q] - pa[worst_q] * pb[worst_q];
        per_q.slack_se = worst_se;
        per_q.details["orthants"] = q_count;
        per_q.details["worst_orthant"] = worst_q;
        per_q.details["worst_z"] = worst_z;
        per_q.finalize();
    }

    CheckReport conclusion;
    conclusion.name = "orthant_conclusion";
    conclusion.relation = Relation::ge;
    {
        const auto& t = sum.totals;
        const double x = t.mean(0);
        const double y = t.mean(1);
        conclusion.lhs = t.estimate(2);
        const double pg[3] = {y, x, 0.0};
        conclusion.rhs = detail::mc_value(x * y, t.delta_se(pg), t.count());
        conclusion.slack = t.mean(2) - x * y;
        const double sg[3] = {-y, -x, 1.0};
        conclusion.slack_se = t.delta_se(sg);
        conclusion.finalize();
        conclusion.details["implied_by_conditions"] =
            cond_i.verdict == Verdict::pass && cond_ii.verdict == Verdict::pass;
    }

    CheckReport r;
    r.name = "orthant_conditions";
    r.relation = Relation::ge;
    r.lhs = conclusion.lhs;
    r.rhs = conclusion.rhs;
    r.slack = conclusion.slack;
    r.slack_se = conclusion.slack_se;
    r.inputs = detail::describe_inputs({{"a", &a}, {"b", &b}}, stream);
    r.inputs["gaussian"] = spec.to_json();
    r.details["implied_by_conditions"] = conclusion.details["implied_by_conditions"];
    r.parts = {cond_i, cond_ii, per_q, conclusion};
    r.finalize();
    return r;
}

namespace {

bool indicator(const IndicatorSpec& f, const ScratchVector& x)
{
    if (!f.orthant.empty()) {
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            const bool ok = f.orthant[static_cast<std::size_t>(i)] > 0 ? x[i] >= 0.0 : x[i] <= 0.0;
            if (!ok) {
                return false;
            }
        }
    }
    return contains(f.body, std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
}

nlohmann::json indicator_json(const IndicatorSpec& f)
{
    return {{"body", to_json(f.body)}, {"orthant", f.orthant}};
}

struct LatticeResult {
    std::uint64_t active = 0;
    std::uint64_t witnesses = 0;
    std::optional<std::pair<Vector, Vector>> witness;
};

} // namespace

CheckReport kr_lattice_check(const IndicatorSpec& f1, const IndicatorSpec& f2, const IndicatorSpec& f3,
                             const IndicatorSpec& f4, std::uint64_t pairs, const Stream& stream,
                             std::vector<int> signs)
{
    const int n = f1.body.dim();
    for (const IndicatorSpec* f : {&f1, &f2, &f3, &f4}) {
        if (f->body.dim() != n) {
            throw ContractViolation("kr_lattice_check: all four functions must share one dimension");
        }
        if (!f->orthant.empty() && f->orthant.size() != static_cast<std::size_t>(n)) {
            throw ContractViolation("kr_lattice_check: orthant sign vector has the wrong length");
        }
    }
    if (signs.empty()) {
        signs.assign(static_cast<std::size_t>(n), 1);
    }
    if (signs.size() != static_cast<std::size_t>(n)) {
        throw ContractViolation("kr_lattice_check: sampling orthant has the wrong length");
    }
    auto parts = map_chunks<LatticeResult>(pairs, [&](std::uint64_t chunk, std::uint64_t count) {
        Stream s = stream.derive("pairs", chunk);
        LatticeResult res;
        ScratchVector x(n), y(n), hi(n), lo(n);
        for (std::uint64_t k = 0; k < count; ++k) {
            for (int i = 0; i < n; ++i) {
                const double sg = signs[static_cast<std::size_t>(i)] > 0 ? 1.0 : -1.0;
                const double u = std::abs(s.next_normal());
                const double v = std::abs(s.next_normal());
                x[i] = sg * u;
                y[i] = sg * v;
                hi[i] = sg * std::max(u, v);
                lo[i] = sg * std::min(u, v);
            }
            if (!(indicator(f1, x) && indicator(f2, y))) {
                continue;
            }
            ++res.active;
            if (!(indicator(f3, hi) && indicator(f4, lo))) {
                if (res.witnesses++ == 0) {
                    res.witness = std::pair{Vector(x), Vector(y)};
                }
            }
        }
        return res;
    });
    LatticeResult total;
    for (const auto& p : parts) {
        total.active += p.active;
        total.witnesses += p.witnesses;
        if (!total.witness && p.witness) {
            total.witness = p.witness;
        }
    }
    CheckReport r;
    r.name = "kr_lattice";
    r.relation = Relation::le;
    r.lhs = Estimate::exact(static_cast<double>(total.witnesses));
    r.rhs = Estimate::exact(0.0);
    r.slack = -static_cast<double>(total.witnesses);
    r.slack_se = 0.0;
    r.inputs = {{"f1", indicator_json(f1)},
                {"f2", indicator_json(f2)},
                {"f3", indicator_json(f3)},
                {"f4", indicator_json(f4)},
                {"orthant", signs},
                {"stream", stream.describe()}};
    r.details["pairs"] = pairs;
    r.details["active_pairs"] = total.active;
    if (total.witness) {
        r.details["witness"] = {{"x", to_json(total.witness->first)}, {"y", to_json(total.witness->second)}};
    }
    r.finalize();
    return r;
}

} // namespace gcl
