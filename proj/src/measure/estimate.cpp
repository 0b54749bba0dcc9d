#include "gcl/estimate.hpp"

#include <cmath>

#include "gcl/errors.hpp"

namespace gcl {

const char* to_string(Method m)
{
    switch (m) {
    case Method::exact:
        return "exact";
    case Method::mc:
        return "mc";
    case Method::quadrature:
        return "quadrature";
    }
    return "?";
}

Method method_from_string(const std::string& s)
{
    if (s == "exact") {
        return Method::exact;
    }
    if (s == "mc") {
        return Method::mc;
    }
    if (s == "quadrature") {
        return Method::quadrature;
    }
    throw ParseError("unknown estimate method '" + s + "'");
}

nlohmann::json to_json(const Estimate& e)
{
    return {{"value", e.value}, {"se", e.std_error}, {"n", e.samples}, {"method", to_string(e.method)}};
}

Estimate estimate_from_json(const nlohmann::json& j)
{
    try {
        return {j.at("value").get<double>(), j.at("se").get<double>(), j.at("n").get<std::uint64_t>(),
                method_from_string(j.at("method").get<std::string>())};
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("estimate: ") + e.what());
    }
}

void MomentSums::merge(const MomentSums& other)
{
    if (k_ == 0 && n_ == 0) {
        *this = other;
        return;
    }
    if (other.k_ != k_) {
        throw ContractViolation("MomentSums::merge: variable counts differ");
    }
    n_ += other.n_;
    for (std::size_t i = 0; i < k_; ++i) {
        sum_[i] += other.sum_[i];
    }
    for (std::size_t i = 0; i < cross_.size(); ++i) {
        cross_[i] += other.cross_[i];
    }
}

double MomentSums::mean(std::size_t i) const
{
    return n_ == 0 ? 0.0 : sum_[i] / static_cast<double>(n_);
}

double MomentSums::cov(std::size_t i, std::size_t j) const
{
    if (n_ == 0) {
        return 0.0;
    }
    if (i > j) {
        std::swap(i, j);
    }
    return cross_[i * k_ + j] / static_cast<double>(n_) - mean(i) * mean(j);
}

Matrix MomentSums::covariance() const
{
    Matrix c(k_, k_);
    for (std::size_t i = 0; i < k_; ++i) {
        for (std::size_t j = 0; j < k_; ++j) {
            c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = cov(i, j);
        }
    }
    return c;
}

double MomentSums::se(std::size_t i) const
{
    if (n_ == 0) {
        return 0.0;
    }
    return std::sqrt(std::max(0.0, cov(i, i)) / static_cast<double>(n_));
}

double MomentSums::delta_se(std::span<const double> grad) const
{
    if (grad.size() != k_) {
        throw ContractViolation("delta_se: gradient length differs from variable count");
    }
    if (n_ == 0) {
        return 0.0;
    }
    double var = 0.0;
    for (std::size_t i = 0; i < k_; ++i) {
        for (std::size_t j = 0; j < k_; ++j) {
            var += grad[i] * grad[j] * cov(i, j);
        }
    }
    return std::sqrt(std::max(0.0, var) / static_cast<double>(n_));
}

Estimate MomentSums::estimate(std::size_t i) const
{
    return {mean(i), se(i), n_, Method::mc};
}

MomentSums merge_in_order(const std::vector<MomentSums>& parts)
{
    MomentSums total;
    for (const auto& p : parts) {
        total.merge(p);
    }
    return total;
}

double JointEstimate::slack_se() const
{
    const Eigen::Vector3d g(-pB.value, -pA.value, 1.0);
    const double var = g.dot(cov_terms * g);
    const auto n = static_cast<double>(pAB.samples);
    return n > 0 ? std::sqrt(std::max(0.0, var) / n) : 0.0;
}

nlohmann::json to_json(const JointEstimate& j)
{
    nlohmann::json cov = nlohmann::json::array();
    for (int r = 0; r < 3; ++r) {
        cov.push_back({j.cov_terms(r, 0), j.cov_terms(r, 1), j.cov_terms(r, 2)});
    }
    return {{"pA", to_json(j.pA)},
            {"pB", to_json(j.pB)},
            {"pAB", to_json(j.pAB)},
            {"cov_terms", std::move(cov)},
            {"slack", j.slack()},
            {"slack_se", j.slack_se()}};
}

} // namespace gcl
