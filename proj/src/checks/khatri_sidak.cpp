#include <cmath>

#include "check_util.hpp"
#include "gcl/checks.hpp"
#include "gcl/measure.hpp"
#include "gcl/special.hpp"

namespace gcl {
namespace {

void require_halfwidths(const GaussianSpec& spec, const Vector& w)
{
    if (w.size() != spec.dim()) {
        throw ContractViolation("halfwidths length " + std::to_string(w.size()) + " does not match dimension " +
                                std::to_string(spec.dim()));
    }
    for (double v : w) {
        if (!(v > 0.0)) {
            throw ContractViolation("halfwidths must be positive");
        }
    }
}

// One coordinate s against the rest R. Given X_R the coordinate is normal
// with mean beta . X_R and a fixed conditional sd, so its window
// probability is integrated exactly for each sample.
CheckReport single_coordinate_split(const GaussianSpec& spec, int s, const Vector& w, std::uint64_t n_samples,
                                    const Stream& stream)
{
    const int n = spec.dim();
    const Matrix t = spec.factor();
    const Matrix cov = spec.covariance();
    std::vector<int> rest;
    for (int i = 0; i < n; ++i) {
        if (i != s) {
            rest.push_back(i);
        }
    }
    const int m = n - 1;
    Matrix t_rest(m, n);
    Matrix cov_rr(m, m);
    Vector cov_rs(m);
    Vector w_rest(m);
    for (int i = 0; i < m; ++i) {
        t_rest.row(i) = t.row(rest[i]);
        cov_rs[i] = cov(rest[i], s);
        w_rest[i] = w[rest[i]];
        for (int j = 0; j < m; ++j) {
            cov_rr(i, j) = cov(rest[i], rest[j]);
        }
    }
    const Eigen::LDLT<Matrix> ldlt(cov_rr);
    const Vector beta = ldlt.solve(cov_rs);
    const double cond_var = cov(s, s) - cov_rs.dot(beta);
    const double cond_sd = std::sqrt(std::max(cond_var, 0.0));
    const double ws = w[s];
    const double marginal = interval_probability(-ws, ws, 0.0, std::sqrt(cov(s, s)));

    // Variables: I_B * phi, I_B, I_B * (phi - c).
    const MomentSums sums = mc_accumulate(3, n_samples, stream, "gauss", [&](Stream& st, std::span<double> out) {
        ScratchVector z(n);
        st.fill_normal({z.data(), static_cast<std::size_t>(n)});
        ScratchVector xr(m);
        xr.noalias() = t_rest * z;
        bool inside = true;
        for (int i = 0; i < m; ++i) {
            inside = inside && std::abs(xr[i]) <= w_rest[i];
        }
        if (!inside) {
            out[0] = out[1] = out[2] = 0.0;
            return;
        }
        const double mean = beta.dot(xr);
        double phi = 0.0;
        if (cond_sd > 1e-150) {
            phi = interval_probability(-ws, ws, mean, cond_sd);
        } else {
            phi = std::abs(mean) <= ws ? 1.0 : 0.0;
        }
        out[0] = phi;
        out[1] = 1.0;
        out[2] = phi - marginal;
    });
    CheckReport r;
    r.lhs = sums.estimate(0);
    const Estimate pb = sums.estimate(1);
    r.rhs = detail::mc_value(marginal * pb.value, marginal * pb.std_error, pb.samples);
    r.relation = Relation::ge;
    r.slack = sums.mean(2);
    r.slack_se = sums.se(2);
    r.details["route"] = "conditional";
    r.details["single_coordinate"] = s;
    r.details["single_marginal"] = marginal;
    r.details["group_probability"] = to_json(pb);
    return r;
}

CheckReport plain_split(const GaussianSpec& spec, int k, const Vector& w, std::uint64_t n_samples,
                        const Stream& stream)
{
    const int n = spec.dim();
    const MomentSums sums = mc_accumulate(3, n_samples, stream, "gauss", [&](Stream& st, std::span<double> out) {
        ScratchVector x(n);
        spec.sample(st, {x.data(), static_cast<std::size_t>(n)});
        bool g1 = true;
        bool g2 = true;
        for (int i = 0; i < n; ++i) {
            const bool in = std::abs(x[i]) <= w[i];
            if (i < k) {
                g1 = g1 && in;
            } else {
                g2 = g2 && in;
            }
        }
        out[0] = g1 ? 1.0 : 0.0;
        out[1] = g2 ? 1.0 : 0.0;
        out[2] = (g1 && g2) ? 1.0 : 0.0;
    });
    const double p1 = sums.mean(0);
    const double p2 = sums.mean(1);
    CheckReport r;
    r.lhs = sums.estimate(2);
    const double pg[3] = {p2, p1, 0.0};
    r.rhs = detail::mc_value(p1 * p2, sums.delta_se(pg), sums.count());
    r.relation = Relation::ge;
    r.slack = sums.mean(2) - p1 * p2;
    const double sg[3] = {-p2, -p1, 1.0};
    r.slack_se = sums.delta_se(sg);
    r.details["route"] = "common_sample";
    r.details["group1"] = to_json(sums.estimate(0));
    r.details["group2"] = to_json(sums.estimate(1));
    return r;
}

} // namespace

CheckReport khatri_sidak_check(const GaussianSpec& spec, int k, const Vector& halfwidths, std::uint64_t n_samples,
                               const Stream& stream)
{
    const int n = spec.dim();
    if (k < 1 || k >= n) {
        throw ContractViolation("khatri_sidak_check: split index must satisfy 1 <= k < n");
    }
    require_halfwidths(spec, halfwidths);
    if (n_samples < 1) {
        throw ContractViolation("khatri_sidak_check: sample count must be >= 1");
    }
    CheckReport r;
    if (k == 1) {
        r = single_coordinate_split(spec, 0, halfwidths, n_samples, stream);
    } else if (k == n - 1) {
        r = single_coordinate_split(spec, n - 1, halfwidths, n_samples, stream);
    } else {
        r = plain_split(spec, k, halfwidths, n_samples, stream);
    }
    r.name = "khatri_sidak";
    r.inputs = detail::describe_inputs({}, stream);
    r.inputs["gaussian"] = spec.to_json();
    r.inputs["k"] = k;
    r.inputs["halfwidths"] = to_json(halfwidths);
    r.finalize();
    return r;
}

CheckReport sidak_product_check(const GaussianSpec& spec, const Vector& halfwidths, std::uint64_t n_samples,
                                const Stream& stream)
{
    const int n = spec.dim();
    require_halfwidths(spec, halfwidths);
    const Matrix cov = spec.covariance();
    double product = 1.0;
    for (int i = 0; i < n; ++i) {
        product *= interval_probability(-halfwidths[i], halfwidths[i], 0.0, std::sqrt(cov(i, i)));
    }
    const Body box = Body::axis_box(halfwidths);
    CheckReport r;
    r.name = "sidak_product";
    r.relation = Relation::ge;
    r.lhs = mc_measure(box, spec, n_samples, stream);
    r.rhs = Estimate::exact(product);
    r.slack = r.lhs.value - product;
    r.slack_se = r.lhs.std_error;
    r.inputs = detail::describe_inputs({}, stream);
    r.inputs["gaussian"] = spec.to_json();
    r.inputs["halfwidths"] = to_json(halfwidths);
    r.finalize();
    return r;
}

} // namespace gcl
