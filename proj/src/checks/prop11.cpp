#include <cmath>

#include "check_util.hpp"
#include "gcl/checks.hpp"
#include "gcl/measure.hpp"

namespace gcl {

double evaluate(const LogConcaveFn& g, std::span<const double> x)
{
    return std::visit(
        [&](const auto& f) -> double {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, logconcave::BodyIndicator>) {
                return contains(f.body, x) ? 1.0 : 0.0;
            } else if constexpr (std::is_same_v<T, logconcave::GaussianBump>) {
                const Eigen::Map<const Vector> xv(x.data(), static_cast<Eigen::Index>(x.size()));
                return std::exp(-0.5 * xv.dot(f.precision * xv));
            } else if constexpr (std::is_same_v<T, logconcave::L1Exponential>) {
                double s = 0.0;
                for (double v : x) {
                    s += std::abs(v);
                }
                return std::exp(-f.lambda * s);
            } else {
                return f.value;
            }
        },
        g);
}

nlohmann::json to_json(const LogConcaveFn& g)
{
    return std::visit(
        [](const auto& f) -> nlohmann::json {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, logconcave::BodyIndicator>) {
                return {{"kind", "indicator"}, {"body", to_json(f.body)}};
            } else if constexpr (std::is_same_v<T, logconcave::GaussianBump>) {
                return {{"kind", "gaussian_bump"}, {"precision", to_json(f.precision)}};
            } else if constexpr (std::is_same_v<T, logconcave::L1Exponential>) {
                return {{"kind", "l1_exponential"}, {"lambda", f.lambda}};
            } else {
                return {{"kind", "constant"}, {"value", f.value}};
            }
        },
        g);
}

CheckReport prop11_identity_check(const Matrix& a, const LogConcaveFn& g, const GaussianSpec& spec,
                                  std::uint64_t n_samples, const Stream& stream)
{
    const int n = spec.dim();
    if (a.rows() != n || a.cols() != n) {
        throw ContractViolation("prop11_identity_check: matrix size does not match the dimension");
    }
    if (!spec.is_standard()) {
        throw ContractViolation("prop11_identity_check: requires the standard Gaussian");
    }
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
        throw ContractViolation("prop11_identity_check: matrix is not symmetric");
    }
    if (const auto* f = std::get_if<logconcave::GaussianBump>(&g)) {
        if (f->precision.rows() != n || f->precision.cols() != n) {
            throw ContractViolation("prop11_identity_check: bump precision has the wrong size");
        }
    }
    if (const auto* f = std::get_if<logconcave::BodyIndicator>(&g)) {
        if (f->body.dim() != n) {
            throw ContractViolation("prop11_identity_check: indicator body has the wrong dimension");
        }
    }

    // M = (I + A)^{-1/2} and det(I + A). Diagonal A stays on an exact
    // elementwise path.
    const bool diagonal = (a - Matrix(a.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0;
    Matrix root_inv = Matrix::Zero(n, n);
    double log_det = 0.0;
    double min_eig = 0.0;
    if (diagonal) {
        min_eig = n > 0 ? a.diagonal().minCoeff() : 0.0;
        for (int i = 0; i < n; ++i) {
            const double d = 1.0 + std::max(0.0, a(i, i));
            root_inv(i, i) = 1.0 / std::sqrt(d);
            log_det += std::log(d);
        }
    } else {
        const Eigen::SelfAdjointEigenSolver<Matrix> es(a);
        min_eig = es.eigenvalues().minCoeff();
        Vector scaled(n);
        for (int i = 0; i < n; ++i) {
            const double d = 1.0 + std::max(0.0, es.eigenvalues()[i]);
            scaled[i] = 1.0 / std::sqrt(d);
            log_det += std::log(d);
        }
        root_inv = es.eigenvectors() * scaled.asDiagonal() * es.eigenvectors().transpose();
    }
    if (min_eig < -1e-10) {
        throw ContractViolation("prop11_identity_check: matrix has eigenvalue " + std::to_string(min_eig) +
                                " below -1e-10");
    }
    const double e_mean = std::exp(-0.5 * log_det);

    // Variables: e g(x), det^{-1/2} g(Mx), their difference,
    // e g(x) - E[e] g(x), g(x).
    const MomentSums sums = mc_accumulate(5, n_samples, stream, "gauss", [&](Stream& s, std::span<double> out) {
        ScratchVector x(n);
        s.fill_normal({x.data(), static_cast<std::size_t>(n)});
        double quad = 0.0;
        ScratchVector mx(n);
        if (diagonal) {
            for (int i = 0; i < n; ++i) {
                quad += a(i, i) * x[i] * x[i];
                mx[i] = root_inv(i, i) * x[i];
            }
        } else {
            quad = x.dot(a * x);
            mx.noalias() = root_inv * x;
        }
        const double e = std::exp(-0.5 * quad);
        const double gx = evaluate(g, {x.data(), static_cast<std::size_t>(n)});
        const double gm = evaluate(g, {mx.data(), static_cast<std::size_t>(n)});
        out[0] = e * gx;
        out[1] = e_mean * gm;
        out[2] = e * gx - e_mean * gm;
        out[3] = e * gx - e_mean * gx;
        out[4] = gx;
    });

    CheckReport identity;
    identity.name = "prop11_identity";
    identity.relation = Relation::eq;
    identity.lhs = sums.estimate(0);
    identity.rhs = sums.estimate(1);
    identity.slack = sums.mean(2);
    identity.slack_se = sums.se(2);
    identity.finalize();

    CheckReport inequality;
    inequality.name = "prop11_inequality";
    inequality.relation = Relation::ge;
    inequality.lhs = sums.estimate(0);
    const Estimate g_mean = sums.estimate(4);
    inequality.rhs = detail::mc_value(e_mean * g_mean.value, e_mean * g_mean.std_error, g_mean.samples);
    inequality.slack = sums.mean(3);
    inequality.slack_se = sums.se(3);
    inequality.finalize();

    CheckReport r;
    r.name = "prop11";
    r.relation = Relation::eq;
    r.lhs = identity.lhs;
    r.rhs = identity.rhs;
    r.slack = identity.slack;
    r.slack_se = identity.slack_se;
    r.inputs = detail::describe_inputs({}, stream);
    r.inputs["matrix"] = to_json(a);
    r.inputs["g"] = to_json(g);
    r.details["route"] = diagonal ? "diagonal" : "eigen";
    r.details["expectation_weight"] = e_mean;
    r.parts = {identity, inequality};
    r.finalize();
    return r;
}

} // namespace gcl
