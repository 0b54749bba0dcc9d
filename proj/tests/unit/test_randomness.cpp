#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "gcl/exec.hpp"
#include "gcl/stream.hpp"

using namespace gcl;

TEST_CASE("normal draws: moments and central mass")
{
    constexpr int kDim = 3;
    constexpr int kDraws = 1000000;
    Stream s(21);
    std::vector<double> x(kDim);
    double sum[kDim] = {};
    double sq[kDim] = {};
    int inside = 0;
    for (int k = 0; k < kDraws; ++k) {
        s.fill_normal(x);
        for (int i = 0; i < kDim; ++i) {
            sum[i] += x[i];
            sq[i] += x[i] * x[i];
        }
        inside += std::abs(x[0]) <= 1.0 ? 1 : 0;
    }
    for (int i = 0; i < kDim; ++i) {
        const double mean = sum[i] / kDraws;
        CHECK(std::abs(mean) < 0.005);
        CHECK(std::abs(sq[i] / kDraws - mean * mean - 1.0) < 0.01);
    }
    // Oracle: adaptive quadrature of the density over [-1, 1].
    auto density = [](double t) { return std::exp(-0.5 * t * t) / std::sqrt(2.0 * std::numbers::pi); };
    const double mass = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(density, -1.0, 1.0, 10, 1e-14);
    CHECK(mass == doctest::Approx(0.6826894921).epsilon(1e-9));
    CHECK(std::abs(static_cast<double>(inside) / kDraws - mass) < 0.002);
}

TEST_CASE("uniform draws stay in the open unit interval")
{
    Stream s(22);
    for (int k = 0; k < 100000; ++k) {
        const double u = s.next_uniform();
        REQUIRE(u > 0.0);
        REQUIRE(u < 1.0);
    }
}

TEST_CASE("haar rotations: orthogonality and sphere moments")
{
    constexpr int n = 4;
    constexpr int kDraws = 100000;
    Stream s(23);
    double sum[n] = {};
    double sq[n] = {};
    double first_sq = 0.0;
    double first_sq2 = 0.0;
    for (int k = 0; k < kDraws; ++k) {
        const OrthogonalMatrix u = haar_orthogonal(s, n);
        if (k < 100) {
            CHECK(u.orthogonality_error() < 1e-12);
        }
        const Vector x = u.matrix().col(0);
        for (int i = 0; i < n; ++i) {
            sum[i] += x[i];
            sq[i] += x[i] * x[i];
        }
        first_sq += x[0] * x[0];
        first_sq2 += std::pow(x[0], 4);
    }
    for (int i = 0; i < n; ++i) {
        const double mean = sum[i] / kDraws;
        const double se = std::sqrt((sq[i] / kDraws - mean * mean) / kDraws);
        CHECK(std::abs(mean) <= 3.0 * se);
    }
    const double m = first_sq / kDraws;
    const double se = std::sqrt((first_sq2 / kDraws - m * m) / kDraws);
    CHECK(std::abs(m - 1.0 / n) <= 3.0 * se);
}

TEST_CASE("haar rotations in the plane: uniform angle")
{
    Stream s(24);
    std::vector<double> angles;
    while (angles.size() < 20000) {
        const OrthogonalMatrix u = haar_orthogonal(s, 2);
        if (u.matrix().determinant() < 0.0) {
            continue;
        }
        double a = std::atan2(u(1, 0), u(0, 0));
        if (a < 0.0) {
            a += 2.0 * std::numbers::pi;
        }
        angles.push_back(a / (2.0 * std::numbers::pi));
    }
    std::sort(angles.begin(), angles.end());
    const double m = static_cast<double>(angles.size());
    double d = 0.0;
    for (std::size_t k = 0; k < angles.size(); ++k) {
        d = std::max({d, (k + 1) / m - angles[k], angles[k] - k / m});
    }
    // Asymptotic 1% critical value of the Kolmogorov-Smirnov statistic.
    CHECK(d < 1.628 / std::sqrt(m));
}

TEST_CASE("derived streams: determinism and separation")
{
    const Stream root(25);
    Stream a = root.derive("a", 0);
    Stream a2 = root.derive("a", 0);
    for (int k = 0; k < 1000; ++k) {
        REQUIRE(a.next_u64() == a2.next_u64());
    }
    Stream b = root.derive("b", 0);
    Stream a0 = root.derive("a", 0);
    int same = 0;
    for (int k = 0; k < 1000; ++k) {
        same += a0.next_u64() == b.next_u64() ? 1 : 0;
    }
    CHECK(same == 0);
    CHECK(root.derive("a", 0).key() != root.derive("a", 1).key());
    CHECK(root.derive("a", 0).derive("b", 0).key() != root.derive("b", 0).derive("a", 0).key());

    Stream x = root.derive("a", 0);
    Stream y = root.derive("a", 1);
    constexpr int kDraws = 1000000;
    double sxy = 0.0;
    double sx = 0.0;
    double sy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (int k = 0; k < kDraws; ++k) {
        const double u = x.next_normal();
        const double v = y.next_normal();
        sx += u;
        sy += v;
        sxy += u * v;
        sxx += u * u;
        syy += v * v;
    }
    const double cov = sxy / kDraws - (sx / kDraws) * (sy / kDraws);
    const double corr = cov / std::sqrt((sxx / kDraws - sx * sx / kDraws / kDraws) * (syy / kDraws - sy * sy / kDraws / kDraws));
    CHECK(std::abs(corr) < 0.005);
}

TEST_CASE("deriving does not consume parent draws")
{
    Stream p(26);
    Stream q(26);
    (void)p.derive("child", 3);
    CHECK(p.next_u64() == q.next_u64());
}

TEST_CASE("parallel map is order-preserving and worker independent")
{
    auto run = [](unsigned workers) {
        return parallel_map<double>(37, workers, [](std::size_t i) {
            Stream s = Stream(27).derive("chunk", i);
            double acc = 0.0;
            for (int k = 0; k < 1000; ++k) {
                acc += s.next_normal();
            }
            return acc;
        });
    };
    const auto one = run(1);
    const auto four = run(4);
    REQUIRE(one.size() == 37);
    for (std::size_t i = 0; i < one.size(); ++i) {
        CHECK(one[i] == four[i]);
    }
    CHECK_THROWS(parallel_map<int>(5, 3, [](std::size_t i) -> int {
        if (i == 2) {
            throw std::runtime_error("boom");
        }
        return 0;
    }));
}

TEST_CASE("map chunks covers the range in order")
{
    ScopedExec scope(ExecConfig{3, 10});
    const auto sizes = map_chunks<std::uint64_t>(95, [](std::uint64_t c, std::uint64_t count) { return c * 1000 + count; });
    REQUIRE(sizes.size() == 10);
    CHECK(sizes.front() == 10);
    CHECK(sizes.back() == 9 * 1000 + 5);
}
