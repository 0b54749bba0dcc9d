#include <doctest.h>

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "gcl/errors.hpp"
#include "gcl/gaussian.hpp"
#include "gcl/measure.hpp"
#include "gcl/special.hpp"

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

double quad_interval(double s)
{
    auto density = [](double t) { return std::exp(-0.5 * t * t) / std::sqrt(2.0 * std::numbers::pi); };
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(density, -s, s, 15, 1e-15);
}

bool within(const Estimate& e, double target, double k = 3.0)
{
    return std::abs(e.value - target) <= k * e.std_error;
}

} // namespace

TEST_CASE("one-dimensional interval")
{
    CHECK(gauss_1d_interval(0.0).value == 0.0);
    CHECK(std::abs(gauss_1d_interval(40.0).value - 1.0) <= 1e-15);
    CHECK(gauss_1d_interval(1.0).value == doctest::Approx(quad_interval(1.0)).epsilon(1e-12));
    CHECK(gauss_1d_interval(1.0).value == doctest::Approx(0.6826894921).epsilon(1e-10));
    for (double s : {0.01, 0.5, 2.0, 3.7}) {
        CHECK(gauss_1d_interval(s).value == doctest::Approx(quad_interval(s)).epsilon(1e-12));
    }
}

TEST_CASE("box measure")
{
    CHECK(box_measure(vec({0.0, 0.0})).value == 0.0);
    const double p = quad_interval(1.0);
    CHECK(box_measure(vec({1.0, 1.0})).value == doctest::Approx(p * p).epsilon(1e-12));
    CHECK(box_measure(vec({1.0, 1.0})).value == doctest::Approx(0.46606496).epsilon(1e-7));
    CHECK(box_measure(vec({0.7})).value == gauss_1d_interval(0.7).value);
}

TEST_CASE("ball measure")
{
    CHECK(ball_measure(3, 0.0).value == 0.0);
    CHECK(ball_measure(2, std::sqrt(2.0 * std::log(2.0))).value == doctest::Approx(0.5).epsilon(1e-14));
    for (double r : {0.3, 1.0, 2.5}) {
        CHECK(ball_measure(2, r).value == doctest::Approx(1.0 - std::exp(-0.5 * r * r)).epsilon(1e-13));
        CHECK(ball_measure(5, r).value == doctest::Approx(boost::math::gamma_p(2.5, 0.5 * r * r)).epsilon(1e-13));
    }
    const double v = ball_measure(400, 20.0).value;
    CHECK(v >= 0.47);
    CHECK(v <= 0.53);
    CHECK(ball_measure(1, 1.3).value == doctest::Approx(gauss_1d_interval(1.3).value).epsilon(1e-13));
}

TEST_CASE("special functions against boost")
{
    for (int m = 1; m <= 64; ++m) {
        for (double x : {0.01, 0.7, 3.0, 20.0, 60.0}) {
            CHECK(std::abs(gamma_p_half_integer(m, x) - boost::math::gamma_p(0.5 * m, x)) < 1e-14);
        }
    }
    CHECK(normal_quantile(normal_cdf(1.7)) == doctest::Approx(1.7).epsilon(1e-12));
    CHECK(interval_probability(-1.0, 1.0, 0.0, 1.0) == doctest::Approx(gauss_1d_interval(1.0).value));
}

TEST_CASE("ellipsoid measure")
{
    for (int n : {1, 3, 8, 20}) {
        for (double r : {0.1, 1.0, 4.0}) {
            const Vector radii = Vector::Constant(n, r);
            CHECK(std::abs(ellipsoid_measure(radii).value - ball_measure(n, r).value) <= 1e-8);
        }
    }
    CHECK(std::abs(ellipsoid_measure(vec({1.0})).value - gauss_1d_interval(1.0).value) <= 1e-8);
    // Cross-check against a large Monte Carlo run.
    const Estimate exact = ellipsoid_measure(vec({1.0, 2.0}));
    const Estimate mc = mc_measure(Body::ellipsoid(vec({1.0, 2.0})), GaussianSpec::standard(2), 10000000, Stream(31));
    CHECK(within(mc, exact.value));
}

TEST_CASE("closed form dispatch")
{
    Stream s(32);
    const Body e = Body::ellipsoid(vec({0.5, 1.5, 3.0}), haar_orthogonal(s, 3));
    const auto cf = closed_form_measure(e);
    REQUIRE(cf.has_value());
    CHECK(cf->value == doctest::Approx(ellipsoid_measure(vec({0.5, 1.5, 3.0})).value).epsilon(1e-10));
    const auto slab = closed_form_measure(Body::slab(uniform_sphere(s, 3), 1.0));
    REQUIRE(slab.has_value());
    CHECK(slab->value == doctest::Approx(gauss_1d_interval(1.0).value));
    Matrix rows(2, 2);
    rows << 1.0, 1.0, 1.0, -1.0;
    CHECK_FALSE(closed_form_measure(Body::sym_polytope(rows)).has_value());
}

TEST_CASE("monte carlo measure")
{
    const auto std3 = GaussianSpec::standard(3);
    const Estimate full = mc_measure(full_space_proxy(3), std3, 100000, Stream(33));
    CHECK(full.value == 1.0);
    CHECK(full.std_error == 0.0);
    const Estimate ball = mc_measure(Body::ball(2, 1.0), GaussianSpec::standard(2), 1000000, Stream(34));
    CHECK(within(ball, 1.0 - std::exp(-0.5)));
    const Estimate box = mc_measure(Body::axis_box(vec({1.0, 1.0, 1.0})), std3, 1000000, Stream(35));
    CHECK(within(box, box_measure(vec({1.0, 1.0, 1.0})).value));
}

TEST_CASE("monte carlo is worker-count independent")
{
    const Body b = Body::ellipsoid(vec({0.5, 1.0, 2.0}));
    const auto spec = GaussianSpec::standard(3);
    Estimate one;
    Estimate four;
    {
        ScopedExec e(ExecConfig{1, 1 << 12});
        one = mc_measure(b, spec, 100000, Stream(36));
    }
    {
        ScopedExec e(ExecConfig{4, 1 << 12});
        four = mc_measure(b, spec, 100000, Stream(36));
    }
    CHECK(one.value == four.value);
    CHECK(one.std_error == four.std_error);
}

TEST_CASE("shaped gaussian")
{
    Matrix t(2, 2);
    t << 1.0, 0.0, 0.9, std::sqrt(1.0 - 0.81);
    const GaussianSpec g = GaussianSpec::shaped(t);
    CHECK_FALSE(g.is_standard());
    CHECK(g.covariance()(0, 1) == doctest::Approx(0.9));
    // First coordinate is still standard normal.
    const Estimate e = mc_measure(Body::slab(Vector::Unit(2, 0), 1.0), g, 1000000, Stream(37));
    CHECK(within(e, gauss_1d_interval(1.0).value));
    CHECK_THROWS_AS(GaussianSpec::shaped(Matrix::Zero(2, 2)), ContractViolation);
    const GaussianSpec back = GaussianSpec::from_json(g.to_json(), "g");
    CHECK(back.factor().isApprox(t));
}

TEST_CASE("joint estimates")
{
    const auto spec = GaussianSpec::standard(2);
    const Body b = Body::ellipsoid(vec({0.5, 2.0}), givens(2, 0, 1, 0.4));
    const JointEstimate full = mc_joint(full_space_proxy(2), b, spec, 200000, Stream(38));
    CHECK(full.pAB.value == full.pB.value);
    CHECK(full.slack() == doctest::Approx(0.0).epsilon(1e-15));
    const JointEstimate same = mc_joint(b, b, spec, 200000, Stream(39));
    CHECK(same.pAB.value == same.pA.value);
    CHECK(same.slack() == doctest::Approx(same.pA.value * (1.0 - same.pA.value)));
    const JointEstimate orth =
        mc_joint(Body::slab(Vector::Unit(2, 0), 1.0), Body::slab(Vector::Unit(2, 1), 1.0), spec, 1000000, Stream(40));
    CHECK(std::abs(orth.slack()) <= 3.0 * orth.slack_se());
}

TEST_CASE("volumes")
{
    const Stream s(41);
    CHECK(lebesgue_volume(Body::ball(2, 1.0), 0, s).value == doctest::Approx(std::numbers::pi));
    CHECK(lebesgue_volume(Body::axis_box(vec({1.0, 2.0})), 0, s).value == doctest::Approx(8.0));
    const Estimate sum = lebesgue_volume(minkowski_sum(Body::ball(2, 1.0), Body::ball(2, 1.0)), 0, s);
    CHECK(std::abs(sum.value - 4.0 * std::numbers::pi) <= 3.0 * sum.std_error + 1e-12);
    CHECK(ball_volume(2, 1.0) == doctest::Approx(std::numbers::pi));
    CHECK(ball_volume(3, 1.0) == doctest::Approx(4.0 * std::numbers::pi / 3.0));
    CHECK(ball_volume(1, 1.0) == doctest::Approx(2.0));
    // Hit-rate route on a body without a closed form.
    Matrix rows(2, 2);
    rows << 1.0, 1.0, 1.0, -1.0;
    const Estimate diamond = lebesgue_volume(Body::sym_polytope(rows), 400000, s);
    CHECK(within(diamond, 2.0));
    CHECK_THROWS_AS(lebesgue_volume(Body::slab(Vector::Unit(2, 0), 1.0), 1000, s), ContractViolation);
}

TEST_CASE("rho_n")
{
    CHECK(rho_n(1) == doctest::Approx(std::sqrt(std::numbers::pi / 8.0)).epsilon(1e-14));
    CHECK(4.0 * rho_n(1) == doctest::Approx(std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-14));
    for (int n = 1; n <= 50; ++n) {
        const double ratio = ball_volume(n, 2.0 * rho_n(n)) / std::pow(2.0 * std::numbers::pi, 0.5 * n);
        CHECK(std::abs(ratio - 1.0) <= 1e-10);
    }
    const double r = rho_n(10000) / (0.5 * std::sqrt(10000.0 / std::numbers::e));
    CHECK(r >= 0.98);
    CHECK(r <= 1.02);
}

TEST_CASE("marginal profile")
{
    const auto spec = GaussianSpec::standard(2);
    const std::vector<double> grid{-1.5, -0.5, 0.0, 0.5, 1.5};
    const auto ball = marginal_profile(Body::ball(2, 2.0), 0, grid, spec, 200000, Stream(42));
    CHECK(within(ball[2], gauss_1d_interval(2.0).value));
    CHECK(std::abs(ball[0].value - ball[4].value) <= 3.0 * std::hypot(ball[0].std_error, ball[4].std_error));
    const auto box = marginal_profile(Body::axis_box(vec({1.0, 1.0})), 0, grid, spec, 200000, Stream(43));
    CHECK(box[0].value == 0.0);
    CHECK(box[4].value == 0.0);
    for (int k = 1; k <= 3; ++k) {
        CHECK(within(box[k], gauss_1d_interval(1.0).value));
    }
}
