#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gcl/errors.hpp"
#include "gcl/gaussian.hpp"
#include "gcl/measure.hpp"
#include "gcl/rotopt.hpp"

using namespace gcl;

namespace {

Vector vec(std::initializer_list<double> xs)
{
    Vector v(static_cast<Eigen::Index>(xs.size()));
    int i = 0;
    for (double x : xs) {
        v[i++] = x;
    }
    return v;
}

const QuadratureSpec kSph = QuadratureSpec::spherical(40);

} // namespace

TEST_CASE("F-norm")
{
    CHECK(f_norm_sq(vec({0.0, 0.0}), vec({1.0, 2.0})) == 0.0);
    CHECK(f_norm_sq(vec({1.0, 2.0}), vec({1.0, 1.0})) == doctest::Approx(5.0));
    CHECK(f_norm_sq(vec({0.0, 1.0}), vec({1.0, 2.0})) == doctest::Approx(0.25));
}

TEST_CASE("givens rotations")
{
    CHECK(givens(3, 0, 2, 0.0).matrix().isApprox(Matrix::Identity(3, 3)));
    const Matrix q = givens(2, 0, 1, std::numbers::pi / 2).matrix();
    CHECK((q * Vector::Unit(2, 0) - Vector::Unit(2, 1)).norm() < 1e-15);
    CHECK((q * Vector::Unit(2, 1) + Vector::Unit(2, 0)).norm() < 1e-15);
    const Matrix p = givens(4, 1, 3, 0.7).matrix() * givens(4, 1, 3, -0.7).matrix();
    CHECK((p - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-14);
    CHECK_THROWS_AS(givens(3, 1, 1, 0.1), ContractViolation);
}

TEST_CASE("quadrature rules")
{
    for (double a : {0.0, 0.5, 1.0}) {
        std::vector<double> t;
        std::vector<double> w;
        gauss_gegenbauer_rule(12, a, t, w);
        double m0 = 0.0;
        double m2 = 0.0;
        double m4 = 0.0;
        for (std::size_t k = 0; k < t.size(); ++k) {
            m0 += w[k];
            m2 += w[k] * t[k] * t[k];
            m4 += w[k] * std::pow(t[k], 4);
        }
        CHECK(m0 == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(m2 == doctest::Approx(1.0 / (2.0 * a + 3.0)).epsilon(1e-13));
        CHECK(m4 == doctest::Approx(3.0 / ((2.0 * a + 3.0) * (2.0 * a + 5.0))).epsilon(1e-13));
    }
    for (int n : {2, 3, 4}) {
        for (const QuadratureSpec& q : {QuadratureSpec::spherical(16), QuadratureSpec::gauss_hermite(16)}) {
            const DirectionSet d = make_directions(n, q);
            CHECK(d.weights.sum() == doctest::Approx(1.0).epsilon(1e-12));
            for (int i = 0; i < n; ++i) {
                double m2 = 0.0;
                double m4 = 0.0;
                for (Eigen::Index k = 0; k < d.weights.size(); ++k) {
                    m2 += d.weights[k] * std::pow(d.directions(i, k), 2);
                    m4 += d.weights[k] * std::pow(d.directions(i, k), 4);
                }
                CHECK(m2 == doctest::Approx(1.0 / n).epsilon(1e-12));
                if (q.kind == QuadratureSpec::Kind::spherical) {
                    CHECK(m4 == doctest::Approx(3.0 / (n * (n + 2.0))).epsilon(1e-12));
                }
            }
        }
    }
    CHECK_THROWS_AS(make_directions(5, QuadratureSpec::spherical(8)), ContractViolation);
    CHECK_THROWS_AS(make_directions(5, QuadratureSpec::gauss_hermite(8)), ContractViolation);
    CHECK(QuadratureSpec::parse("sph:30").to_string() == "sph:30");
    CHECK(QuadratureSpec::parse("gh:12").to_string() == "gh:12");
    CHECK(QuadratureSpec::parse("mc:500", 3).samples == 500);
    CHECK_THROWS_AS(QuadratureSpec::parse("gh:x"), ParseError);
    CHECK_THROWS_AS(QuadratureSpec::parse("lebedev:5"), ParseError);
}

TEST_CASE("objective against a Monte Carlo oracle")
{
    const Vector e = vec({0.7, 1.5, 2.5});
    const Vector f = vec({1.0, 0.5, 2.0});
    const double beta = 1.3;
    Stream s(91);
    const OrthogonalMatrix u = haar_orthogonal(s, 3);
    const double j = smoothed_objective(u, e, SmoothProfile::exponential(beta), f, kSph);
    // E[1_E(U x) exp(-beta |x|_F^2)] by direct sampling.
    const GaussianSpec spec = GaussianSpec::standard(3);
    const MomentSums sums = mc_accumulate(1, 2000000, Stream(92), "oracle", [&](Stream& st, std::span<double> out) {
        Vector x(3);
        spec.sample(st, {x.data(), 3});
        const Vector y = u.matrix() * x;
        out[0] = f_norm_sq(y, e) <= 1.0 ? std::exp(-beta * f_norm_sq(x, f)) : 0.0;
    });
    CHECK(std::abs(sums.mean(0) - j) <= 3.0 * sums.se(0));
    // Same value with the other rules.
    CHECK(smoothed_objective(u, e, SmoothProfile::exponential(beta), f, QuadratureSpec::gauss_hermite(60)) ==
          doctest::Approx(j).epsilon(1e-3));
}

TEST_CASE("objective symmetries")
{
    Stream s(93);
    const auto profile = SmoothProfile::exponential(1.0);
    // Both balls: every rotation gives the same value.
    const Vector ball = vec({1.5, 1.5, 1.5});
    const double base = smoothed_objective(OrthogonalMatrix::identity(3), ball, profile, vec({2.0, 2.0, 2.0}), kSph);
    for (int k = 0; k < 5; ++k) {
        CHECK(smoothed_objective(haar_orthogonal(s, 3), ball, profile, vec({2.0, 2.0, 2.0}), kSph) ==
              doctest::Approx(base).epsilon(1e-12));
    }
    // E a ball with a nearly flat profile: independent of U as well.
    const auto flat = SmoothProfile::exponential(1e-9);
    const double f0 = smoothed_objective(OrthogonalMatrix::identity(2), vec({1.0, 1.0}), flat, vec({1.0, 3.0}), kSph);
    CHECK(smoothed_objective(haar_orthogonal(s, 2), vec({1.0, 1.0}), flat, vec({1.0, 3.0}), kSph) ==
          doctest::Approx(f0).epsilon(1e-8));
    // Sign flips of the rows leave the value unchanged.
    const Vector e = vec({0.5, 1.0, 2.0});
    const Vector f = vec({1.5, 0.7, 1.1});
    const OrthogonalMatrix u = haar_orthogonal(s, 3);
    Matrix j = Matrix::Identity(3, 3);
    j(1, 1) = -1.0;
    const double v = smoothed_objective(u, e, profile, f, kSph);
    CHECK(smoothed_objective(OrthogonalMatrix(j * u.matrix()), e, profile, f, kSph) == doctest::Approx(v).epsilon(1e-12));
    // Identical ellipsoids r = rho = (1, 3): aligned beats a quarter turn.
    const Vector r = vec({1.0, 3.0});
    const double aligned = smoothed_objective(OrthogonalMatrix::identity(2), r, profile, r, kSph);
    const double turned = smoothed_objective(givens(2, 0, 1, std::numbers::pi / 2), r, profile, r, kSph);
    CHECK(aligned > turned);
}

TEST_CASE("gradient")
{
    const auto profile = SmoothProfile::exponential(1.0);
    const Vector e = vec({0.5, 1.0, 2.0});
    const Vector f = vec({1.5, 0.7, 1.1});
    const Matrix g0 = objective_gradient(OrthogonalMatrix::identity(3), e, profile, f, kSph);
    CHECK(g0.cwiseAbs().maxCoeff() < 1e-14);
    Stream s(94);
    const OrthogonalMatrix u = haar_orthogonal(s, 3);
    const Matrix tied = objective_gradient(u, e, profile, vec({1.5, 1.5, 1.1}), kSph);
    CHECK(std::abs(tied(0, 1)) < 1e-14);
    const RotationObjective obj(e, f, profile, kSph);
    const Matrix g = obj.gradient(u);
    CHECK((g + g.transpose()).cwiseAbs().maxCoeff() < 1e-15);
    for (double h : {1e-3, 1e-4}) {
        double err = 0.0;
        for (int i = 0; i < 3; ++i) {
            for (int j = i + 1; j < 3; ++j) {
                OrthogonalMatrix up = u;
                OrthogonalMatrix um = u;
                up.apply_givens_right(i, j, h);
                um.apply_givens_right(i, j, -h);
                err = std::max(err, std::abs(g(i, j) - (obj.value(up) - obj.value(um)) / (2.0 * h)));
            }
        }
        CHECK(err <= 10.0 * h * h * std::max(1.0, g.cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("diagonality diagnostic")
{
    const Vector r = vec({1.0, 2.0, 3.0});
    CHECK(diagonality_diagnostic(OrthogonalMatrix(permutation_matrix({2, 0, 1})), r) == 0.0);
    Matrix sp = permutation_matrix({1, 0, 2});
    sp(0, 1) = -1.0;
    CHECK(diagonality_diagnostic(OrthogonalMatrix(sp), r) == 0.0);
    CHECK(diagonality_diagnostic(givens(2, 0, 1, std::numbers::pi / 4), vec({1.0, 2.0})) ==
          doctest::Approx(std::sqrt(2.0) * 0.375).epsilon(1e-14));
    Stream s(95);
    CHECK(diagonality_diagnostic(haar_orthogonal(s, 3), vec({2.0, 2.0, 2.0})) < 1e-14);
}

TEST_CASE("permutation scan")
{
    const auto profile = SmoothProfile::exponential(1.0);
    const PermutationScan one = permutation_scan(vec({1.5}), vec({0.5}), profile, kSph);
    CHECK(one.perms.size() == 1);
    const Vector r = vec({0.6, 1.0, 2.5});
    const PermutationScan scan = permutation_scan(r, r, profile, kSph);
    CHECK(scan.perms.size() == 6);
    const double identity = scan.values[0];
    const auto rev = std::find(scan.perms.begin(), scan.perms.end(), std::vector<int>{2, 1, 0}) - scan.perms.begin();
    CHECK(std::abs(identity - scan.values[static_cast<std::size_t>(rev)]) > 1e-6);
    // Relabelling coordinates of both radii leaves the multiset of values fixed.
    const Vector f = vec({1.2, 0.4, 0.9});
    auto sorted = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        return v;
    };
    const auto a = sorted(permutation_scan(r, f, profile, kSph).values);
    const auto b = sorted(permutation_scan(vec({2.5, 0.6, 1.0}), vec({0.9, 1.2, 0.4}), profile, kSph).values);
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(a[k] == doctest::Approx(b[k]).epsilon(1e-12));
    }
}

TEST_CASE("descent")
{
    const auto profile = SmoothProfile::exponential(1.0);
    // Starting at the best signed permutation: stationary, nothing to do.
    const Vector e3 = vec({0.5, 1.0, 2.0});
    const Vector f3 = vec({1.5, 0.7, 1.1});
    const PermutationScan scan = permutation_scan(e3, f3, profile, kSph);
    Matrix sp = permutation_matrix(scan.perms[scan.best]);
    sp.col(2) *= -1.0;
    const RotOptResult still = minimize_over_rotations(e3, f3, profile, kSph, {}, OrthogonalMatrix(sp));
    CHECK(still.iterations == 0);
    CHECK(still.diagnostic == 0.0);
    CHECK(still.permutation_gap == doctest::Approx(0.0));
    // Any other permutation is stationary too, but the pair sweeps leave it.
    const std::size_t worst = static_cast<std::size_t>(
        std::max_element(scan.values.begin(), scan.values.end()) - scan.values.begin());
    const RotOptResult moved =
        minimize_over_rotations(e3, f3, profile, kSph, {}, OrthogonalMatrix(permutation_matrix(scan.perms[worst])));
    CHECK(moved.diagnostic <= 1e-6);
    CHECK(moved.permutation_gap <= 1e-10);

    // n = 2 against an exhaustive angle grid.
    const Vector r = vec({1.0, 2.0});
    Stream s(96);
    const RotOptResult two = minimize_over_rotations(r, r, profile, kSph, {}, haar_orthogonal(s, 2));
    const RotationObjective obj(r, r, profile, kSph);
    const Matrix v = obj.rotated_directions(OrthogonalMatrix::identity(2));
    double best = 1e300;
    for (double a = -std::numbers::pi / 2; a <= std::numbers::pi / 2; a += 1e-3) {
        best = std::min(best, obj.value_along(v, 0, 1, a));
    }
    CHECK(two.diagnostic < 1e-6);
    CHECK(two.value <= best + 1e-10);

    for (int k = 0; k < 3; ++k) {
        Stream inst = Stream(97).derive("instance", k);
        Vector e(3);
        Vector f(3);
        for (int i = 0; i < 3; ++i) {
            e[i] = 0.5 + 2.5 * inst.next_uniform();
            f[i] = 0.5 + 2.5 * inst.next_uniform();
        }
        const RotOptResult res = minimize_over_rotations(e, f, profile, kSph, {}, haar_orthogonal(inst, 3));
        CHECK(res.diagnostic <= 1e-3);
        CHECK(res.permutation_gap <= 1e-3);
        for (std::size_t t = 1; t < res.trace.size(); ++t) {
            CHECK(res.trace[t].value <= res.trace[t - 1].value);
        }
    }
}

TEST_CASE("tie separation")
{
    const Vector r = separate_ties(vec({1.0, 2.0, 1.0, 1.0}));
    CHECK(r[0] == 1.0);
    CHECK(r[2] == doctest::Approx(1.0 + 1e-6));
    CHECK(r[3] == doctest::Approx(1.0 + 2e-6));
}
