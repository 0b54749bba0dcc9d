#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

#include "gcl/linalg.hpp"

namespace gcl {

enum class Method { exact, mc, quadrature };

const char* to_string(Method m);
Method method_from_string(const std::string& s);

/// A value with its standard error. method == exact implies std_error == 0.
struct Estimate {
    double value = 0.0;
    double std_error = 0.0;
    std::uint64_t samples = 0;
    Method method = Method::exact;

    static Estimate exact(double v) { return {v, 0.0, 0, Method::exact}; }
};

/// {"value":..., "se":..., "n":..., "method":...}
nlohmann::json to_json(const Estimate& e);
Estimate estimate_from_json(const nlohmann::json& j);

/// Running sums of k per-sample variables and their cross products.
///
/// Partial sums from different chunks merge by plain addition; merging in a
/// fixed order makes the result independent of how chunks were scheduled.
/// For 0/1 indicators every sum is an exact integer in double precision.
class MomentSums {
  public:
    MomentSums() = default;
    explicit MomentSums(std::size_t k) : k_(k), sum_(k, 0.0), cross_(k * k, 0.0) {}

    void add(std::span<const double> v)
    {
        ++n_;
        for (std::size_t i = 0; i < k_; ++i) {
            sum_[i] += v[i];
            if (v[i] == 0.0) {
                continue;
            }
            for (std::size_t j = i; j < k_; ++j) {
                cross_[i * k_ + j] += v[i] * v[j];
            }
        }
    }
    void merge(const MomentSums& other);

    std::size_t size() const { return k_; }
    std::uint64_t count() const { return n_; }
    double sum(std::size_t i) const { return sum_[i]; }
    double mean(std::size_t i) const;
    /// Covariance of a single draw (population form, divides by n).
    double cov(std::size_t i, std::size_t j) const;
    Matrix covariance() const;
    /// SE of the sample mean of variable i.
    double se(std::size_t i) const;
    /// Delta-method SE of g(means) given the gradient of g at the means.
    double delta_se(std::span<const double> grad) const;
    Estimate estimate(std::size_t i) const;

  private:
    std::size_t k_ = 0;
    std::uint64_t n_ = 0;
    std::vector<double> sum_;
    std::vector<double> cross_; // upper triangle, row-major
};

/// Merges per-chunk partial sums in chunk order.
MomentSums merge_in_order(const std::vector<MomentSums>& parts);

/// mu(A), mu(B), mu(A and B) from one common sample.
struct JointEstimate {
    Estimate pA;
    Estimate pB;
    Estimate pAB;
    /// Single-draw covariance of (I_A, I_B, I_AB).
    Eigen::Matrix3d cov_terms;

    double slack() const { return pAB.value - pA.value * pB.value; }
    /// Delta-method SE of pAB - pA*pB: gradient (-pB, -pA, 1).
    double slack_se() const;
};

nlohmann::json to_json(const JointEstimate& j);

} // namespace gcl
