#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "gcl/errors.hpp"
#include "gcl/exec.hpp"
#include "gcl/rotopt.hpp"
#include "gcl/special.hpp"

namespace gcl {
namespace {

constexpr std::size_t kNodeBlock = 2048;

// Sum of term(k) over k in [0, count) in fixed blocks, reduced in block
// order so the result does not depend on the worker count.
template <class T, class F>
T node_sum(std::size_t count, T zero, F&& block_term)
{
    const std::size_t blocks = (count + kNodeBlock - 1) / kNodeBlock;
    auto parts = parallel_map<T>(blocks, current_exec().workers, [&](std::size_t b) {
        T acc = zero;
        const std::size_t end = std::min(count, (b + 1) * kNodeBlock);
        for (std::size_t k = b * kNodeBlock; k < end; ++k) {
            block_term(k, acc);
        }
        return acc;
    });
    T total = zero;
    for (const T& p : parts) {
        total += p;
    }
    return total;
}

void require_radii(const Vector& r, const char* what)
{
    if (r.size() < 1) {
        throw ContractViolation(std::string(what) + " radii are empty");
    }
    for (double v : r) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw ContractViolation(std::string(what) + " radii must be positive and finite");
        }
    }
}

// Chi radial density in dimension n.
double chi_density(int n, double s)
{
    if (s <= 0.0) {
        return 0.0;
    }
    const double half = 0.5 * n;
    return std::exp((n - 1) * std::log(s) - 0.5 * s * s - (half - 1.0) * std::log(2.0) - std::lgamma(half));
}

} // namespace

double f_norm_sq(const Vector& x, const Vector& rho)
{
    if (x.size() != rho.size()) {
        throw ContractViolation("f_norm_sq: dimension mismatch");
    }
    require_radii(rho, "F");
    double s = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        s += x[i] * x[i] / (rho[i] * rho[i]);
    }
    return s;
}

RotationObjective::RotationObjective(Vector e_radii, Vector f_radii, SmoothProfile profile, const QuadratureSpec& quad)
    : e_radii_(std::move(e_radii)), f_radii_(std::move(f_radii)), profile_(std::move(profile))
{
    require_radii(e_radii_, "E");
    require_radii(f_radii_, "F");
    if (e_radii_.size() != f_radii_.size()) {
        throw ContractViolation("E and F radii differ in length");
    }
    const int n = dim();
    dirs_ = make_directions(n, quad);
    inv_f_sq_ = f_radii_.array().square().inverse();
    const Vector inv_e_sq = e_radii_.array().square().inverse();
    const auto k_count = dirs_.weights.size();
    reach_sq_.resize(k_count);
    for (Eigen::Index k = 0; k < k_count; ++k) {
        reach_sq_[k] = 1.0 / dirs_.directions.col(k).array().square().matrix().dot(inv_e_sq);
    }
}

double RotationObjective::radial(std::size_t k, double q) const
{
    const int n = dim();
    const double r2 = reach_sq_[static_cast<Eigen::Index>(k)];
    if (profile_.beta) {
        const double a = *profile_.beta * q + 0.5;
        return std::pow(2.0 * a, -0.5 * n) * gamma_p_half_integer(n, a * r2);
    }
    auto integrand = [&](double s) { return profile_.f(s * s * q) * chi_density(n, s); };
    return boost::math::quadrature::gauss<double, 40>::integrate(integrand, 0.0, std::sqrt(r2));
}

double RotationObjective::radial_dq(std::size_t k, double q) const
{
    const int n = dim();
    const double r2 = reach_sq_[static_cast<Eigen::Index>(k)];
    if (profile_.beta) {
        const double beta = *profile_.beta;
        const double a = beta * q + 0.5;
        return -beta * (0.5 * n / a) * std::pow(2.0 * a, -0.5 * n) * gamma_p_half_integer(n + 2, a * r2);
    }
    auto integrand = [&](double s) { return s * s * profile_.f_prime(s * s * q) * chi_density(n, s); };
    return boost::math::quadrature::gauss<double, 40>::integrate(integrand, 0.0, std::sqrt(r2));
}

Matrix RotationObjective::rotated_directions(const OrthogonalMatrix& u) const
{
    if (u.dim() != dim()) {
        throw ContractViolation("rotation dimension does not match the ellipsoids");
    }
    return u.matrix().transpose() * dirs_.directions;
}

double RotationObjective::value(const OrthogonalMatrix& u) const
{
    const Matrix v = rotated_directions(u);
    return node_sum(nodes(), 0.0, [&](std::size_t k, double& acc) {
        const auto kk = static_cast<Eigen::Index>(k);
        const double q = v.col(kk).array().square().matrix().dot(inv_f_sq_);
        acc += dirs_.weights[kk] * radial(k, q);
    });
}

Matrix RotationObjective::gradient(const OrthogonalMatrix& u) const
{
    const int n = dim();
    const Matrix v = rotated_directions(u);
    Matrix g = node_sum(nodes(), Matrix(Matrix::Zero(n, n)), [&](std::size_t k, Matrix& acc) {
        const auto kk = static_cast<Eigen::Index>(k);
        const auto col = v.col(kk);
        const double q = col.array().square().matrix().dot(inv_f_sq_);
        const double c = 2.0 * dirs_.weights[kk] * radial_dq(k, q);
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                acc(i, j) += c * col[i] * col[j];
            }
        }
    });
    for (int i = 0; i < n; ++i) {
        g(i, i) = 0.0;
        for (int j = i + 1; j < n; ++j) {
            g(i, j) *= inv_f_sq_[i] - inv_f_sq_[j];
            g(j, i) = -g(i, j);
        }
    }
    return g;
}

double RotationObjective::value_along(const Matrix& v, int i, int j, double alpha) const
{
    const double c = std::cos(alpha);
    const double s = std::sin(alpha);
    const double wi = inv_f_sq_[i];
    const double wj = inv_f_sq_[j];
    return node_sum(nodes(), 0.0, [&](std::size_t k, double& acc) {
        const auto kk = static_cast<Eigen::Index>(k);
        const auto col = v.col(kk);
        const double vi = col[i];
        const double vj = col[j];
        const double ni = c * vi + s * vj;
        const double nj = -s * vi + c * vj;
        double q = 0.0;
        for (Eigen::Index d = 0; d < col.size(); ++d) {
            if (d != i && d != j) {
                q += col[d] * col[d] * inv_f_sq_[d];
            }
        }
        q += ni * ni * wi + nj * nj * wj;
        acc += dirs_.weights[kk] * radial(k, q);
    });
}

double smoothed_objective(const OrthogonalMatrix& u, const Vector& e_radii, const SmoothProfile& profile,
                          const Vector& f_radii, const QuadratureSpec& quad)
{
    return RotationObjective(e_radii, f_radii, profile, quad).value(u);
}

Matrix objective_gradient(const OrthogonalMatrix& u, const Vector& e_radii, const SmoothProfile& profile,
                          const Vector& f_radii, const QuadratureSpec& quad)
{
    return RotationObjective(e_radii, f_radii, profile, quad).gradient(u);
}

double diagonality_diagnostic(const OrthogonalMatrix& u, const Vector& e_radii)
{
    require_radii(e_radii, "E");
    if (u.dim() != e_radii.size()) {
        throw ContractViolation("diagonality_diagnostic: dimension mismatch");
    }
    const Matrix& m = u.matrix();
    const Matrix c = m.transpose() * e_radii.array().square().inverse().matrix().asDiagonal() * m;
    double s = 0.0;
    for (Eigen::Index i = 0; i < c.rows(); ++i) {
        for (Eigen::Index j = 0; j < c.cols(); ++j) {
            if (i != j) {
                s += c(i, j) * c(i, j);
            }
        }
    }
    return std::sqrt(s);
}

Matrix permutation_matrix(const std::vector<int>& perm)
{
    const int n = static_cast<int>(perm.size());
    Matrix p = Matrix::Zero(n, n);
    for (int c = 0; c < n; ++c) {
        p(perm[static_cast<std::size_t>(c)], c) = 1.0;
    }
    return p;
}

PermutationScan permutation_scan(const RotationObjective& objective)
{
    const int n = objective.dim();
    if (n > 6) {
        throw ContractViolation("permutation_scan: n! enumeration is limited to n <= 6");
    }
    PermutationScan scan;
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    do {
        scan.perms.push_back(perm);
        scan.values.push_back(objective.value(OrthogonalMatrix(permutation_matrix(perm))));
    } while (std::next_permutation(perm.begin(), perm.end()));
    scan.best = static_cast<std::size_t>(std::min_element(scan.values.begin(), scan.values.end()) - scan.values.begin());
    return scan;
}

PermutationScan permutation_scan(const Vector& e_radii, const Vector& f_radii, const SmoothProfile& profile,
                                 const QuadratureSpec& quad)
{
    return permutation_scan(RotationObjective(e_radii, f_radii, profile, quad));
}

Vector separate_ties(const Vector& radii, double eps)
{
    Vector out = radii;
    for (Eigen::Index i = 0; i < radii.size(); ++i) {
        int repeats = 0;
        for (Eigen::Index j = 0; j < i; ++j) {
            repeats += radii[j] == radii[i] ? 1 : 0;
        }
        out[i] = radii[i] + repeats * eps;
    }
    return out;
}

} // namespace gcl
