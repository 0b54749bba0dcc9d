// Distribution of a positive definite quadratic form in Gaussian variables
// by inversion of its characteristic function:
//
//   P(sum l_i z_i^2 <= 1) = 1/2 - (1/pi) int_0^inf sin(theta(u)) / (u rho(u)) du
//   theta(u) = (1/2) sum atan(l_i u) - u/2,  rho(u) = prod (1 + l_i^2 u^2)^{1/4}
//
// The integrand oscillates with asymptotic period 4 pi. It is integrated
// over panels of half that length and the alternating partial sums are
// accelerated with Wynn's epsilon algorithm.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "gcl/errors.hpp"
#include "gcl/measure.hpp"

namespace gcl {
namespace {

constexpr double kPanel = 2.0 * std::numbers::pi;

// Last even-column entry of the epsilon table for the sequence s.
double wynn_epsilon(const std::vector<double>& s)
{
    const std::size_t m = s.size();
    if (m < 3) {
        return s.back();
    }
    std::vector<double> prev(m + 1, 0.0); // eps_{-1}
    std::vector<double> cur(s.begin(), s.end());
    double best = s.back();
    for (std::size_t k = 1; k < m; ++k) {
        std::vector<double> next(m - k);
        bool ok = true;
        for (std::size_t i = 0; i + k < m; ++i) {
            const double d = cur[i + 1] - cur[i];
            if (d == 0.0 || !std::isfinite(d)) {
                ok = false;
                break;
            }
            next[i] = prev[i + 1] + 1.0 / d;
        }
        if (!ok) {
            break;
        }
        prev = std::move(cur);
        cur = std::move(next);
        if (k % 2 == 0) {
            best = cur.back();
        }
    }
    return best;
}

} // namespace

Estimate ellipsoid_measure(std::span<const double> radii, const EllipsoidOptions& opts)
{
    if (radii.empty()) {
        throw ContractViolation("ellipsoid_measure: no radii");
    }
    std::vector<double> lam;
    lam.reserve(radii.size());
    double lam_sum = 0.0;
    for (double r : radii) {
        if (!(r > 0.0) || !std::isfinite(r)) {
            throw ContractViolation("ellipsoid_measure: radii must be positive and finite");
        }
        lam.push_back(1.0 / (r * r));
        lam_sum += lam.back();
    }

    auto integrand = [&](double u) {
        if (u < 1e-12) {
            return 0.5 * (lam_sum - 1.0);
        }
        double theta = -0.5 * u;
        double log_rho = 0.0;
        for (double l : lam) {
            const double lu = l * u;
            theta += 0.5 * std::atan(lu);
            log_rho += 0.25 * std::log1p(lu * lu);
        }
        return std::sin(theta) / (u * std::exp(log_rho));
    };

    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    std::vector<double> partial;
    double running = 0.0;
    double quad_err = 0.0;
    double last = 0.0;
    double last_diff = std::numeric_limits<double>::infinity();
    int stable = 0;
    constexpr std::size_t kWindow = 40;

    for (int k = 0; k < opts.max_panels; ++k) {
        double err = 0.0;
        running += GK::integrate(integrand, k * kPanel, (k + 1) * kPanel, 12, 1e-14, &err);
        quad_err += err;
        partial.push_back(running);

        const std::vector<double> window(partial.end() - static_cast<std::ptrdiff_t>(std::min(kWindow, partial.size())),
                                         partial.end());
        const double accel = wynn_epsilon(window);
        const double diff = std::abs(accel - last);
        last = accel;
        if (k >= 6) {
            stable = (diff < 0.1 * opts.abs_tol) ? stable + 1 : 0;
            last_diff = diff;
            if (stable >= 3) {
                const double value = 0.5 - accel / std::numbers::pi;
                const double bound = (last_diff + quad_err) / std::numbers::pi;
                Estimate e{std::clamp(value, 0.0, 1.0), bound, 0, Method::quadrature};
                if (bound > opts.abs_tol) {
                    throw AccuracyError("ellipsoid_measure: quadrature error above target", e.value, bound);
                }
                return e;
            }
        }
    }
    const double value = std::clamp(0.5 - last / std::numbers::pi, 0.0, 1.0);
    throw AccuracyError("ellipsoid_measure: accuracy target not reached within the panel cap", value,
                        (last_diff + quad_err) / std::numbers::pi);
}

Estimate ellipsoid_measure(const Vector& radii, const EllipsoidOptions& opts)
{
    return ellipsoid_measure(std::span<const double>(radii.data(), static_cast<std::size_t>(radii.size())), opts);
}

} // namespace gcl
