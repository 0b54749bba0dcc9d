#include <cmath>
#include <numbers>
#include <stdexcept>

#include "gcl/errors.hpp"
#include "gcl/rotopt.hpp"
#include "gcl/stream.hpp"

namespace gcl {

SmoothProfile SmoothProfile::exponential(double beta)
{
    if (!(beta > 0.0) || !std::isfinite(beta)) {
        throw ContractViolation("exponential profile needs a positive finite beta");
    }
    SmoothProfile p;
    p.name = "exponential";
    p.f = [beta](double t) { return std::exp(-beta * t); };
    p.f_prime = [beta](double t) { return -beta * std::exp(-beta * t); };
    p.beta = beta;
    return p;
}

bool SmoothProfile::validate(const std::vector<double>& grid, double tail_tol) const
{
    if (grid.empty() || std::abs(f(0.0) - 1.0) > 1e-12) {
        return false;
    }
    double prev = f(0.0);
    for (double t : grid) {
        if (t <= 0.0) {
            continue;
        }
        const double v = f(t);
        if (!(f_prime(t) < 0.0) || v > prev) {
            return false;
        }
        prev = v;
    }
    return prev <= tail_tol;
}

QuadratureSpec QuadratureSpec::gauss_hermite(int level)
{
    if (level < 2) {
        throw ContractViolation("Gauss-Hermite level must be >= 2");
    }
    QuadratureSpec q;
    q.kind = Kind::gauss_hermite;
    q.level = level;
    return q;
}

QuadratureSpec QuadratureSpec::spherical(int level)
{
    if (level < 2) {
        throw ContractViolation("spherical quadrature level must be >= 2");
    }
    QuadratureSpec q;
    q.kind = Kind::spherical;
    q.level = level;
    return q;
}

QuadratureSpec QuadratureSpec::monte_carlo(std::uint64_t samples, std::uint64_t seed)
{
    if (samples < 1) {
        throw ContractViolation("Monte Carlo direction count must be >= 1");
    }
    QuadratureSpec q;
    q.kind = Kind::monte_carlo;
    q.samples = samples;
    q.seed = seed;
    return q;
}

QuadratureSpec QuadratureSpec::default_for(int n, std::uint64_t seed)
{
    if (n <= 3) {
        return spherical(40);
    }
    if (n == 4) {
        return spherical(24);
    }
    return monte_carlo(200000, seed);
}

QuadratureSpec QuadratureSpec::parse(const std::string& text, std::uint64_t seed)
{
    const auto colon = text.find(':');
    if (colon == std::string::npos) {
        throw ParseError("quadrature '" + text + "': expected gh:L, sph:L or mc:N");
    }
    const std::string kind = text.substr(0, colon);
    const std::string arg = text.substr(colon + 1);
    std::size_t used = 0;
    long long value = 0;
    try {
        value = std::stoll(arg, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != arg.size() || arg.empty() || value < 1) {
        throw ParseError("quadrature '" + text + "': bad count '" + arg + "'");
    }
    if (kind == "gh") {
        return gauss_hermite(static_cast<int>(value));
    }
    if (kind == "sph") {
        return spherical(static_cast<int>(value));
    }
    if (kind == "mc") {
        return monte_carlo(static_cast<std::uint64_t>(value), seed);
    }
    throw ParseError("quadrature '" + text + "': unknown kind '" + kind + "'");
}

std::string QuadratureSpec::to_string() const
{
    if (kind == Kind::gauss_hermite) {
        return "gh:" + std::to_string(level);
    }
    if (kind == Kind::spherical) {
        return "sph:" + std::to_string(level);
    }
    return "mc:" + std::to_string(samples);
}

void gauss_hermite_rule(int level, std::vector<double>& nodes, std::vector<double>& weights)
{
    // Golub-Welsch: Jacobi matrix of the monic Hermite recurrence.
    Matrix jacobi = Matrix::Zero(level, level);
    for (int k = 1; k < level; ++k) {
        jacobi(k - 1, k) = jacobi(k, k - 1) = std::sqrt(static_cast<double>(k));
    }
    const Eigen::SelfAdjointEigenSolver<Matrix> es(jacobi);
    nodes.resize(static_cast<std::size_t>(level));
    weights.resize(static_cast<std::size_t>(level));
    for (int k = 0; k < level; ++k) {
        nodes[static_cast<std::size_t>(k)] = es.eigenvalues()[k];
        const double v = es.eigenvectors()(0, k);
        weights[static_cast<std::size_t>(k)] = v * v;
    }
    // Exact symmetry of the rule.
    for (int k = 0; k < level / 2; ++k) {
        const auto lo = static_cast<std::size_t>(k);
        const auto hi = static_cast<std::size_t>(level - 1 - k);
        const double x = 0.5 * (nodes[hi] - nodes[lo]);
        const double w = 0.5 * (weights[hi] + weights[lo]);
        nodes[lo] = -x;
        nodes[hi] = x;
        weights[lo] = weights[hi] = w;
    }
    if (level % 2 == 1) {
        nodes[static_cast<std::size_t>(level / 2)] = 0.0;
    }
}

void gauss_gegenbauer_rule(int level, double a, std::vector<double>& nodes, std::vector<double>& weights)
{
    if (level < 1 || !(a >= 0.0)) {
        throw ContractViolation("Gegenbauer rule needs level >= 1 and a >= 0");
    }
    // Golub-Welsch with the monic Jacobi recurrence for alpha = beta = a.
    Matrix jacobi = Matrix::Zero(level, level);
    for (int k = 1; k < level; ++k) {
        const double kk = k;
        const double b = kk * (kk + 2.0 * a) / ((2.0 * kk + 2.0 * a + 1.0) * (2.0 * kk + 2.0 * a - 1.0));
        jacobi(k - 1, k) = jacobi(k, k - 1) = std::sqrt(b);
    }
    const Eigen::SelfAdjointEigenSolver<Matrix> es(jacobi);
    nodes.resize(static_cast<std::size_t>(level));
    weights.resize(static_cast<std::size_t>(level));
    for (int k = 0; k < level; ++k) {
        nodes[static_cast<std::size_t>(k)] = es.eigenvalues()[k];
        const double v = es.eigenvectors()(0, k);
        weights[static_cast<std::size_t>(k)] = v * v;
    }
    for (int k = 0; k < level / 2; ++k) {
        const auto lo = static_cast<std::size_t>(k);
        const auto hi = static_cast<std::size_t>(level - 1 - k);
        const double x = 0.5 * (nodes[hi] - nodes[lo]);
        const double w = 0.5 * (weights[hi] + weights[lo]);
        nodes[lo] = -x;
        nodes[hi] = x;
        weights[lo] = weights[hi] = w;
    }
    if (level % 2 == 1) {
        nodes[static_cast<std::size_t>(level / 2)] = 0.0;
    }
}

namespace {

// Tensor rule on S^{m-1}: x = (sqrt(1 - t^2) y, t) with y on S^{m-2} and t
// carrying the weight (1 - t^2)^{(m-3)/2}.
void spherical_rule(int m, int level, std::vector<Vector>& dirs, std::vector<double>& wts)
{
    dirs.clear();
    wts.clear();
    if (m == 1) {
        dirs = {Vector::Constant(1, 1.0), Vector::Constant(1, -1.0)};
        wts = {0.5, 0.5};
        return;
    }
    if (m == 2) {
        const int count = 2 * level;
        for (int k = 0; k < count; ++k) {
            const double phi = 2.0 * std::numbers::pi * (k + 0.5) / count;
            Vector x(2);
            x << std::cos(phi), std::sin(phi);
            dirs.push_back(x);
            wts.push_back(1.0 / count);
        }
        return;
    }
    std::vector<Vector> inner;
    std::vector<double> inner_w;
    spherical_rule(m - 1, level, inner, inner_w);
    std::vector<double> t;
    std::vector<double> tw;
    gauss_gegenbauer_rule(level, 0.5 * (m - 3), t, tw);
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double s = std::sqrt(std::max(0.0, 1.0 - t[i] * t[i]));
        for (std::size_t k = 0; k < inner.size(); ++k) {
            Vector x(m);
            x.head(m - 1) = s * inner[k];
            x[m - 1] = t[i];
            dirs.push_back(x);
            wts.push_back(tw[i] * inner_w[k]);
        }
    }
}

} // namespace

DirectionSet make_directions(int n, const QuadratureSpec& quad)
{
    if (n < 1) {
        throw ContractViolation("direction set dimension must be >= 1");
    }
    std::vector<Vector> dirs;
    std::vector<double> wts;
    if (quad.kind == QuadratureSpec::Kind::gauss_hermite) {
        if (n > 4) {
            throw ContractViolation("tensor Gauss-Hermite quadrature is limited to n <= 4; use mc:N");
        }
        std::vector<double> x1, w1;
        gauss_hermite_rule(quad.level, x1, w1);
        const int level = quad.level;
        std::vector<int> idx(static_cast<std::size_t>(n), 0);
        Vector x(n);
        while (true) {
            double w = 1.0;
            for (int d = 0; d < n; ++d) {
                x[d] = x1[static_cast<std::size_t>(idx[static_cast<std::size_t>(d)])];
                w *= w1[static_cast<std::size_t>(idx[static_cast<std::size_t>(d)])];
            }
            // One node of each antipodal pair, weight doubled.
            int lead = 0;
            while (lead < n && x[lead] == 0.0) {
                ++lead;
            }
            if (lead < n && x[lead] > 0.0) {
                dirs.push_back(x / x.norm());
                wts.push_back(2.0 * w);
            }
            int d = 0;
            while (d < n && ++idx[static_cast<std::size_t>(d)] == level) {
                idx[static_cast<std::size_t>(d)] = 0;
                ++d;
            }
            if (d == n) {
                break;
            }
        }
    } else if (quad.kind == QuadratureSpec::Kind::spherical) {
        if (n > 4) {
            throw ContractViolation("tensor spherical quadrature is limited to n <= 4; use mc:N");
        }
        spherical_rule(n, quad.level, dirs, wts);
    } else {
        Stream s = Stream(quad.seed).derive("directions", 0);
        Vector x(n);
        for (std::uint64_t k = 0; k < quad.samples; ++k) {
            double norm = 0.0;
            do {
                s.fill_normal({x.data(), static_cast<std::size_t>(n)});
                norm = x.norm();
            } while (norm == 0.0);
            dirs.push_back(x / norm);
            wts.push_back(1.0);
        }
    }
    DirectionSet set;
    set.directions.resize(n, static_cast<Eigen::Index>(dirs.size()));
    set.weights.resize(static_cast<Eigen::Index>(dirs.size()));
    double total = 0.0;
    for (double w : wts) {
        total += w;
    }
    for (std::size_t k = 0; k < dirs.size(); ++k) {
        set.directions.col(static_cast<Eigen::Index>(k)) = dirs[k];
        set.weights[static_cast<Eigen::Index>(k)] = wts[k] / total;
    }
    return set;
}

} // namespace gcl
