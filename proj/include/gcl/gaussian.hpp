#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>

#include <json.hpp>

#include "gcl/linalg.hpp"
#include "gcl/stream.hpp"

namespace gcl {

/// A centered Gaussian on R^n: either standard, or the law of Tz for a
/// square nonsingular factor T and z standard.
class GaussianSpec {
  public:
    static GaussianSpec standard(int n);
    static GaussianSpec shaped(Matrix factor);

    int dim() const { return dim_; }
    bool is_standard() const { return !factor_.has_value(); }
    /// Standard, or shaped with a diagonal factor: coordinates independent.
    bool is_product() const;
    /// T (identity when standard).
    Matrix factor() const;
    Matrix covariance() const;

    /// Draws one sample into `out` (length dim()).
    void sample(Stream& stream, std::span<double> out) const;

    nlohmann::json to_json() const;
    static GaussianSpec from_json(const nlohmann::json& j, const std::string& where);

  private:
    int dim_ = 0;
    std::optional<Matrix> factor_;
};

/// Rotation-invariant probability on R^n: a radial law nu_1 on [0, inf)
/// times the uniform measure on the sphere.
class RadialMeasure {
  public:
    RadialMeasure(int dim, std::string name, std::function<double(double)> radial_cdf,
                  std::function<double(Stream&)> radial_sampler);

    /// The standard Gaussian written in polar form (chi radial law).
    static RadialMeasure gaussian(int dim);
    /// Uniform on the ball of radius R.
    static RadialMeasure uniform_ball(int dim, double radius);
    /// Radius ~ Exp(mean = scale).
    static RadialMeasure exponential(int dim, double scale);

    int dim() const { return dim_; }
    const std::string& name() const { return name_; }
    double radial_cdf(double r) const { return cdf_(r); }
    double sample_radius(Stream& stream) const { return sampler_(stream); }
    void sample(Stream& stream, std::span<double> out) const;

    /// cdf(0) >= 0, nondecreasing on the grid, and close to 1 at the end.
    bool validate(std::span<const double> grid, double tail_tol = 1e-6) const;

  private:
    int dim_;
    std::string name_;
    std::function<double(double)> cdf_;
    std::function<double(Stream&)> sampler_;
};

} // namespace gcl
