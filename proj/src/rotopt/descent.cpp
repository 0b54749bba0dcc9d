#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/tools/minima.hpp>

#include "gcl/body_json.hpp"
#include "gcl/errors.hpp"
#include "gcl/rotopt.hpp"

namespace gcl {
namespace {

struct LineResult {
    double alpha;
    double value;
};

// Minimizes J(U V_(i,j)(alpha)) over one period (-pi/2, pi/2]: a coarse
// scan followed by Brent refinement around the best scan point.
LineResult line_search(const RotationObjective& obj, const Matrix& v, int i, int j, int coarse)
{
    const double pi = std::numbers::pi;
    const double step = pi / coarse;
    LineResult best{0.0, std::numeric_limits<double>::infinity()};
    for (int k = 0; k < coarse; ++k) {
        const double a = -0.5 * pi + (k + 1) * step;
        const double val = obj.value_along(v, i, j, a);
        if (val < best.value) {
            best = {a, val};
        }
    }
    auto phi = [&](double a) { return obj.value_along(v, i, j, a); };
    std::uintmax_t max_iter = 200;
    const auto [a, val] =
        boost::math::tools::brent_find_minima(phi, best.alpha - step, best.alpha + step, 40, max_iter);
    if (val < best.value) {
        best = {a, val};
    }
    return best;
}

double max_abs_upper(const Matrix& g, int& bi, int& bj)
{
    double m = -1.0;
    bi = 0;
    bj = g.rows() > 1 ? 1 : 0;
    for (Eigen::Index i = 0; i < g.rows(); ++i) {
        for (Eigen::Index j = i + 1; j < g.cols(); ++j) {
            if (std::abs(g(i, j)) > m) {
                m = std::abs(g(i, j));
                bi = static_cast<int>(i);
                bj = static_cast<int>(j);
            }
        }
    }
    return std::max(m, 0.0);
}

} // namespace

RotOptResult minimize_over_rotations(const Vector& e_radii, const Vector& f_radii, const SmoothProfile& profile,
                                     const QuadratureSpec& quad, const RotOptConfig& cfg,
                                     std::optional<OrthogonalMatrix> start)
{
    RotOptResult res;
    res.e_radii = separate_ties(e_radii);
    res.f_radii = separate_ties(f_radii);
    res.perturbed = res.e_radii != e_radii || res.f_radii != f_radii;
    const RotationObjective obj(res.e_radii, res.f_radii, profile, quad);
    const int n = obj.dim();
    if (cfg.coarse_points < 2) {
        throw ContractViolation("minimize_over_rotations: coarse_points must be >= 2");
    }
    OrthogonalMatrix u = start ? *start : OrthogonalMatrix::identity(n);
    if (u.dim() != n) {
        throw ContractViolation("minimize_over_rotations: start matrix has the wrong dimension");
    }
    double value = obj.value(u);
    res.trace.push_back({0, value, diagonality_diagnostic(u, res.e_radii)});

    int it = 0;
    bool converged = false;
    double gmax = 0.0;
    while (true) {
        int bi = 0;
        int bj = 0;
        gmax = n > 1 ? max_abs_upper(obj.gradient(u), bi, bj) : 0.0;
        if (it >= cfg.max_iter) {
            break;
        }
        const double min_gain = 1e-14 * std::max(1.0, std::abs(value));
        bool moved = false;
        if (gmax > cfg.grad_tol) {
            const Matrix v = obj.rotated_directions(u);
            const LineResult lr = line_search(obj, v, bi, bj, cfg.coarse_points);
            if (lr.value < value - min_gain) {
                u.apply_givens_right(bi, bj, lr.alpha);
                moved = true;
            }
        }
        if (!moved && cfg.sweep && n > 1) {
            const Matrix v = obj.rotated_directions(u);
            for (int i = 0; i < n && !moved; ++i) {
                for (int j = i + 1; j < n && !moved; ++j) {
                    const LineResult lr = line_search(obj, v, i, j, cfg.coarse_points);
                    if (lr.value < value - min_gain) {
                        u.apply_givens_right(i, j, lr.alpha);
                        moved = true;
                    }
                }
            }
        }
        if (!moved) {
            converged = gmax <= cfg.grad_tol;
            break;
        }
        ++it;
        // Re-evaluate rather than trusting the line-search value so the
        // trace reflects the stored matrix.
        const double next = obj.value(u);
        value = std::min(value, next);
        res.trace.push_back({it, next, diagonality_diagnostic(u, res.e_radii)});
    }
    res.u_star = u;
    res.value = obj.value(u);
    res.diagnostic = diagonality_diagnostic(u, res.e_radii);
    res.max_gradient = gmax;
    res.iterations = it;
    res.converged = converged;
    if (n <= 6) {
        const PermutationScan scan = permutation_scan(obj);
        res.permutation_gap = res.value - scan.values[scan.best];
    } else {
        res.permutation_gap = std::numeric_limits<double>::quiet_NaN();
    }
    return res;
}

nlohmann::json to_json(const RotOptResult& r)
{
    nlohmann::json trace = nlohmann::json::array();
    for (const auto& t : r.trace) {
        trace.push_back({t.iteration, t.value, t.diagnostic});
    }
    nlohmann::json j = {
        {"u_star", to_json(r.u_star.matrix())},
        {"value", r.value},
        {"diagnostic", r.diagnostic},
        {"max_gradient", r.max_gradient},
        {"converged", r.converged},
        {"iterations", r.iterations},
        {"e_radii", to_json(r.e_radii)},
        {"f_radii", to_json(r.f_radii)},
        {"perturbed", r.perturbed},
        {"trace_columns", {"iteration", "value", "diagnostic"}},
        {"trace", std::move(trace)},
    };
    if (std::isnan(r.permutation_gap)) {
        j["permutation_gap"] = nullptr;
    } else {
        j["permutation_gap"] = r.permutation_gap;
    }
    return j;
}

} // namespace gcl
