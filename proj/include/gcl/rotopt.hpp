#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gcl/linalg.hpp"

namespace gcl {

/// Decreasing weight f on [0, inf) with f(0) = 1 and f -> 0, applied to
/// the squared F-norm. The exponential family has a closed-form radial
/// integral; other profiles use radial Gauss-Legendre quadrature.
struct SmoothProfile {
    std::string name;
    std::function<double(double)> f;
    std::function<double(double)> f_prime;
    /// Set for f(t) = exp(-beta t).
    std::optional<double> beta;

    static SmoothProfile exponential(double beta);
    /// f(0) = 1, f' < 0 and f decreasing on the grid, f small at its end.
    bool validate(const std::vector<double>& grid, double tail_tol = 1e-6) const;
};

/// Direction quadrature on the sphere, all with n <= 4 except `mc`:
///   gh:L   tensor Gauss-Hermite nodes in R^n projected to unit length
///   sph:L  tensor rule in spherical coordinates: L Gauss-Gegenbauer nodes
///          per polar angle, 2L trapezoid nodes in the azimuth
///   mc:N   a frozen Gaussian sample projected to unit length
/// The projected Hermite rule converges slowly (the projected integrand is
/// not smooth at the origin); sph is spectrally accurate for smooth
/// integrands and is the default.
struct QuadratureSpec {
    enum class Kind { gauss_hermite, spherical, monte_carlo };
    Kind kind = Kind::spherical;
    int level = 40;
    std::uint64_t samples = 200000;
    std::uint64_t seed = 0;

    static QuadratureSpec gauss_hermite(int level);
    static QuadratureSpec spherical(int level);
    static QuadratureSpec monte_carlo(std::uint64_t samples, std::uint64_t seed);
    /// Defaults: sph:40 for n <= 3, sph:24 for n = 4, mc:200000 beyond.
    static QuadratureSpec default_for(int n, std::uint64_t seed = 0);
    /// "gh:L", "sph:L" or "mc:N"; the seed is supplied separately.
    static QuadratureSpec parse(const std::string& text, std::uint64_t seed = 0);
    std::string to_string() const;
};

/// Probabilists' Gauss-Hermite rule (weight e^{-x^2/2}/sqrt(2 pi)),
/// weights summing to 1.
void gauss_hermite_rule(int level, std::vector<double>& nodes, std::vector<double>& weights);

/// Gauss rule on [-1, 1] for the weight (1 - t^2)^a, a >= 0, weights
/// summing to 1.
void gauss_gegenbauer_rule(int level, double a, std::vector<double>& nodes, std::vector<double>& weights);

/// Unit directions (columns) with weights summing to 1. Antipodal pairs
/// are merged since every integrand here is even.
struct DirectionSet {
    Matrix directions;
    Vector weights;
};

DirectionSet make_directions(int n, const QuadratureSpec& quad);

/// sum x_i^2 / rho_i^2
double f_norm_sq(const Vector& x, const Vector& rho);

/// J(U) = int 1_E(U x) f(|x|_F^2) dmu_n(x) for E, F axis-aligned
/// ellipsoids, evaluated as an integral over y = U x in polar form.
/// The quadrature is fixed at construction, so J is a deterministic
/// function of U.
class RotationObjective {
  public:
    RotationObjective(Vector e_radii, Vector f_radii, SmoothProfile profile, const QuadratureSpec& quad);

    int dim() const { return static_cast<int>(e_radii_.size()); }
    std::size_t nodes() const { return static_cast<std::size_t>(dirs_.weights.size()); }

    double value(const OrthogonalMatrix& u) const;
    /// g(i, j) = d/dalpha J(U givens(i, j, alpha)) at alpha = 0, for i < j;
    /// g(j, i) = -g(i, j).
    Matrix gradient(const OrthogonalMatrix& u) const;

    /// Coordinates U^T theta of every direction (n x K).
    Matrix rotated_directions(const OrthogonalMatrix& u) const;
    /// J(U givens(i, j, alpha)) given v = rotated_directions(U).
    double value_along(const Matrix& v, int i, int j, double alpha) const;

  private:
    // Radial integral h(q) and dh/dq for direction k at F-weight q.
    double radial(std::size_t k, double q) const;
    double radial_dq(std::size_t k, double q) const;

    Vector e_radii_;
    Vector f_radii_;
    Vector inv_f_sq_;
    SmoothProfile profile_;
    DirectionSet dirs_;
    Vector reach_sq_; // R_E(theta_k)^2
};

double smoothed_objective(const OrthogonalMatrix& u, const Vector& e_radii, const SmoothProfile& profile,
                          const Vector& f_radii, const QuadratureSpec& quad);
Matrix objective_gradient(const OrthogonalMatrix& u, const Vector& e_radii, const SmoothProfile& profile,
                          const Vector& f_radii, const QuadratureSpec& quad);

/// |offdiag(U^T diag(r^-2) U)|_F
double diagonality_diagnostic(const OrthogonalMatrix& u, const Vector& e_radii);

struct PermutationScan {
    /// perms[k][c] is the row holding the 1 in column c.
    std::vector<std::vector<int>> perms;
    std::vector<double> values;
    std::size_t best = 0;
};

/// Objective at every permutation matrix (n <= 6).
PermutationScan permutation_scan(const Vector& e_radii, const Vector& f_radii, const SmoothProfile& profile,
                                 const QuadratureSpec& quad);
PermutationScan permutation_scan(const RotationObjective& objective);

Matrix permutation_matrix(const std::vector<int>& perm);

/// Adds k * eps to the k-th repeat of a tied value (k = 1, 2, ...).
Vector separate_ties(const Vector& radii, double eps = 1e-6);

struct RotOptConfig {
    int max_iter = 2000;
    double grad_tol = 1e-8;
    int coarse_points = 24;
    /// Full line searches over every pair once the gradient is small, to
    /// leave non-global stationary points.
    bool sweep = true;
};

struct TracePoint {
    int iteration;
    double value;
    double diagnostic;
};

struct RotOptResult {
    OrthogonalMatrix u_star;
    double value = 0.0;
    double diagnostic = 0.0;
    double max_gradient = 0.0;
    std::vector<TracePoint> trace;
    /// value minus the best permutation value; NaN when n > 6.
    double permutation_gap = 0.0;
    bool converged = false;
    int iterations = 0;
    Vector e_radii;
    Vector f_radii;
    bool perturbed = false;
};

RotOptResult minimize_over_rotations(const Vector& e_radii, const Vector& f_radii, const SmoothProfile& profile,
                                     const QuadratureSpec& quad, const RotOptConfig& cfg = {},
                                     std::optional<OrthogonalMatrix> start = std::nullopt);

nlohmann::json to_json(const RotOptResult& r);

} // namespace gcl
