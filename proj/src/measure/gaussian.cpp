#include "gcl/gaussian.hpp"

#include <cmath>

#include "gcl/body_json.hpp"
#include "gcl/errors.hpp"
#include "gcl/special.hpp"

namespace gcl {

GaussianSpec GaussianSpec::standard(int n)
{
    if (n < 1) {
        throw ContractViolation("Gaussian dimension must be >= 1");
    }
    GaussianSpec s;
    s.dim_ = n;
    return s;
}

GaussianSpec GaussianSpec::shaped(Matrix factor)
{
    if (factor.rows() != factor.cols() || factor.rows() == 0) {
        throw ContractViolation("Gaussian factor must be square");
    }
    if (factor.rows() > kMaxDim) {
        throw ContractViolation("Gaussian dimension exceeds the supported maximum");
    }
    const Eigen::JacobiSVD<Matrix> svd(factor);
    const auto& sv = svd.singularValues();
    if (!(sv.minCoeff() > 1e-12 * sv.maxCoeff()) || !factor.allFinite()) {
        throw ContractViolation("Gaussian factor must be nonsingular");
    }
    GaussianSpec s;
    s.dim_ = static_cast<int>(factor.rows());
    s.factor_ = std::move(factor);
    return s;
}

bool GaussianSpec::is_product() const
{
    if (!factor_) {
        return true;
    }
    const Matrix& t = *factor_;
    return (t - Matrix(t.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0;
}

Matrix GaussianSpec::factor() const
{
    return factor_ ? *factor_ : Matrix::Identity(dim_, dim_);
}

Matrix GaussianSpec::covariance() const
{
    const Matrix t = factor();
    return t * t.transpose();
}

void GaussianSpec::sample(Stream& stream, std::span<double> out) const
{
    if (!factor_) {
        stream.fill_normal(out);
        return;
    }
    ScratchVector z(dim_);
    stream.fill_normal({z.data(), static_cast<std::size_t>(dim_)});
    Eigen::Map<Vector>(out.data(), dim_).noalias() = *factor_ * z;
}

nlohmann::json GaussianSpec::to_json() const
{
    if (!factor_) {
        return {{"kind", "standard"}, {"dim", dim_}};
    }
    return {{"kind", "shaped"}, {"factor", gcl::to_json(*factor_)}};
}

GaussianSpec GaussianSpec::from_json(const nlohmann::json& j, const std::string& where)
{
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
        throw ParseError(where + ".kind: missing or not a string");
    }
    const std::string kind = j["kind"].get<std::string>();
    try {
        if (kind == "standard") {
            if (!j.contains("dim") || !j["dim"].is_number_integer()) {
                throw ParseError(where + ".dim: missing or not an integer");
            }
            return standard(j["dim"].get<int>());
        }
        if (kind == "shaped") {
            if (!j.contains("factor")) {
                throw ParseError(where + ".factor: missing key");
            }
            return shaped(matrix_from_json(j["factor"], where + ".factor"));
        }
    } catch (const ContractViolation& e) {
        throw ParseError(where + ": " + e.what());
    }
    throw ParseError(where + ".kind: unknown Gaussian kind '" + kind + "'");
}

RadialMeasure::RadialMeasure(int dim, std::string name, std::function<double(double)> radial_cdf,
                             std::function<double(Stream&)> radial_sampler)
    : dim_(dim), name_(std::move(name)), cdf_(std::move(radial_cdf)), sampler_(std::move(radial_sampler))
{
    if (dim < 1) {
        throw ContractViolation("radial measure dimension must be >= 1");
    }
}

RadialMeasure RadialMeasure::gaussian(int dim)
{
    return RadialMeasure(
        dim, "gaussian", [dim](double r) { return r <= 0.0 ? 0.0 : chi_square_cdf(dim, r * r); },
        [dim](Stream& s) {
            double acc = 0.0;
            for (int i = 0; i < dim; ++i) {
                const double z = s.next_normal();
                acc += z * z;
            }
            return std::sqrt(acc);
        });
}

RadialMeasure RadialMeasure::uniform_ball(int dim, double radius)
{
    if (!(radius > 0.0)) {
        throw ContractViolation("uniform ball radius must be positive");
    }
    return RadialMeasure(
        dim, "uniform_ball",
        [dim, radius](double r) { return r <= 0.0 ? 0.0 : (r >= radius ? 1.0 : std::pow(r / radius, dim)); },
        [dim, radius](Stream& s) { return radius * std::pow(s.next_uniform(), 1.0 / dim); });
}

RadialMeasure RadialMeasure::exponential(int dim, double scale)
{
    if (!(scale > 0.0)) {
        throw ContractViolation("exponential radial scale must be positive");
    }
    return RadialMeasure(
        dim, "exponential", [scale](double r) { return r <= 0.0 ? 0.0 : -std::expm1(-r / scale); },
        [scale](Stream& s) { return -scale * std::log(s.next_uniform()); });
}

void RadialMeasure::sample(Stream& stream, std::span<double> out) const
{
    const double r = sampler_(stream);
    double norm2 = 0.0;
    do {
        stream.fill_normal(out);
        norm2 = 0.0;
        for (double v : out) {
            norm2 += v * v;
        }
    } while (norm2 < 1e-300);
    const double f = r / std::sqrt(norm2);
    for (double& v : out) {
        v *= f;
    }
}

bool RadialMeasure::validate(std::span<const double> grid, double tail_tol) const
{
    if (grid.empty()) {
        return false;
    }
    double prev = cdf_(0.0);
    if (prev < 0.0) {
        return false;
    }
    for (double r : grid) {
        const double c = cdf_(r);
        if (c < prev || c > 1.0) {
            return false;
        }
        prev = c;
    }
    return prev >= 1.0 - tail_tol;
}

} // namespace gcl
