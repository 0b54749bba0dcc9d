#include <doctest.h>

#include <cmath>
#include <numbers>

#include "gcl/checks.hpp"
#include "gcl/errors.hpp"
#include "gcl/measure.hpp"

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

const CheckReport& part(const CheckReport& r, const std::string& name)
{
    for (const auto& p : r.parts) {
        if (p.name == name) {
            return p;
        }
    }
    FAIL("missing part " << name);
    return r;
}

} // namespace

TEST_CASE("verdict tiers")
{
    CHECK(classify(0.0, 0.0, Relation::ge) == Verdict::pass);
    CHECK(classify(-1e-13, 0.0, Relation::ge) == Verdict::pass);
    CHECK(classify(-1e-6, 0.0, Relation::ge) == Verdict::fail);
    CHECK(classify(-2.9, 1.0, Relation::ge) == Verdict::pass);
    CHECK(classify(-4.0, 1.0, Relation::ge) == Verdict::inconclusive);
    CHECK(classify(-5.1, 1.0, Relation::ge) == Verdict::fail);
    CHECK(classify(4.0, 1.0, Relation::eq) == Verdict::inconclusive);
    const Thresholds t = Thresholds::bonferroni(100);
    CHECK(t.pass_z > 3.0);
    CHECK(t.fail_z > t.pass_z);
    CHECK(Thresholds::bonferroni(1).pass_z == doctest::Approx(3.0));
    CHECK(combine(Verdict::pass, Verdict::inconclusive) == Verdict::inconclusive);
    CHECK(combine(Verdict::fail, Verdict::inconclusive) == Verdict::fail);
}

TEST_CASE("report json round trip")
{
    const CheckReport r = correlation_check(Body::ball(2, 1.0), Body::ball(2, 1.5), GaussianSpec::standard(2), 10000,
                                            Stream(51));
    const CheckReport back = report_from_json(to_json(r));
    CHECK(to_json(back) == to_json(r));
}

TEST_CASE("correlation")
{
    const auto spec2 = GaussianSpec::standard(2);
    // Balls: the intersection is known, so the slack oracle is p - p^2.
    const CheckReport same = correlation_check(Body::ball(2, 1.0), Body::ball(2, 1.0), spec2, 1000000, Stream(52));
    const double p = 1.0 - std::exp(-0.5);
    CHECK(std::abs(same.slack - (p - p * p)) <= 3.0 * same.slack_se);
    CHECK(same.verdict == Verdict::pass);
    const CheckReport full =
        correlation_check(full_space_proxy(2), Body::ellipsoid(vec({1.0, 0.3})), spec2, 100000, Stream(53));
    CHECK(full.slack == doctest::Approx(0.0).epsilon(1e-15));
    Stream s(54);
    for (int k = 0; k < 3; ++k) {
        const Body a = Body::ellipsoid(vec({0.4, 1.0, 2.5}), haar_orthogonal(s, 3));
        const Body b = Body::ellipsoid(vec({0.6, 1.5, 3.0}), haar_orthogonal(s, 3));
        CHECK(correlation_check(a, b, GaussianSpec::standard(3), 200000, s.derive("mc", k)).verdict == Verdict::pass);
    }
    CHECK_THROWS_AS(correlation_check(Body::ball(2, 1.0), Body::ball(3, 1.0), GaussianSpec::standard(2), 100, s),
                    ContractViolation);
}

TEST_CASE("khatri-sidak")
{
    Matrix t(2, 2);
    t << 1.0, 0.0, 0.9, std::sqrt(1.0 - 0.81);
    const CheckReport r = khatri_sidak_check(GaussianSpec::shaped(t), 1, vec({1.0, 1.0}), 200000, Stream(55));
    CHECK(r.verdict == Verdict::pass);
    CHECK(r.slack > 0.0);
    for (int n : {2, 4, 6}) {
        const CheckReport id = khatri_sidak_check(GaussianSpec::shaped(Matrix::Identity(n, n)), 1,
                                                  Vector::Constant(n, 1.0), 50000, Stream(56));
        CHECK(id.slack == 0.0);
        CHECK(id.verdict == Verdict::pass);
    }
    Stream s(57);
    for (int k = 0; k < 10; ++k) {
        const int n = 2 + k % 5;
        Matrix m(n, n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                m(i, j) = s.next_normal();
            }
        }
        const CheckReport prod =
            sidak_product_check(GaussianSpec::shaped(m), Vector::Constant(n, 1.0), 100000, s.derive("mc", k));
        CHECK(prod.verdict == Verdict::pass);
    }
}

TEST_CASE("minkowski bound")
{
    const auto spec = GaussianSpec::standard(3);
    const CheckReport balls = prop1_check(Body::ball(3, 1.0), Body::ball(3, 2.0), spec, 200000, Stream(58));
    CHECK(balls.verdict == Verdict::pass);
    // All four terms are balls here: lhs = mu(B1) mu(B2), rhs = mu(sqrt2 B1) mu(3/sqrt2 B).
    const double lhs = ball_measure(3, 1.0).value * ball_measure(3, 2.0).value;
    const double rhs = ball_measure(3, std::sqrt(2.0)).value * ball_measure(3, 3.0 / std::sqrt(2.0)).value;
    CHECK(std::abs(balls.slack - (rhs - lhs)) <= 3.0 * balls.slack_se + 1e-12);
    const CheckReport boxes =
        prop1_check(Body::axis_box(vec({0.5, 1.0})), Body::axis_box(vec({0.5, 1.0})), GaussianSpec::standard(2),
                    200000, Stream(59));
    CHECK(boxes.verdict == Verdict::pass);
    CHECK(boxes.details.at("minkowski") == "exact");
    CHECK_THROWS_AS(prop1_check(Body::ball(2, 1.0), Body::axis_box(vec({1.0, 1.0})), GaussianSpec::standard(2), 1000,
                                Stream(60)),
                    UnsupportedError);
}

TEST_CASE("power-of-two bound")
{
    const CheckReport full =
        pow2_bound_check(full_space_proxy(4), full_space_proxy(4), GaussianSpec::standard(4), 10000, Stream(61));
    CHECK(full.verdict == Verdict::pass);
    CHECK(full.slack == doctest::Approx(3.0));
    const CheckReport slabs = pow2_bound_check(Body::slab(Vector::Unit(2, 0), 1.0), Body::slab(Vector::Unit(2, 1), 1.0),
                                               GaussianSpec::standard(2), 1000000, Stream(62));
    const double p = gauss_1d_interval(1.0).value;
    CHECK(std::abs(slabs.slack - (2.0 * p * p - p * p)) <= 3.0 * slabs.slack_se);
}

TEST_CASE("small sets")
{
    const int n = 4;
    Stream s(63);
    const double limit = 0.99 * rho_n(n);
    const Body a = Body::ellipsoid(limit * vec({1.0, 0.5, 0.8, 0.3}), haar_orthogonal(s, n));
    const Body b = Body::ellipsoid(limit * vec({0.2, 1.0, 0.7, 0.9}), haar_orthogonal(s, n));
    CHECK(small_sets_check(a, b, GaussianSpec::standard(n), 200000, Stream(64)).verdict == Verdict::pass);
    CHECK_THROWS_AS(small_sets_check(Body::ball(n, rho_n(n) + 0.01), b, GaussianSpec::standard(n), 1000, Stream(65)),
                    ContainmentError);
    const double r1 = rho_n(1);
    const CheckReport nested = small_sets_check(Body::axis_box(vec({0.5 * r1})), Body::axis_box(vec({0.9 * r1})),
                                                GaussianSpec::standard(1), 100000, Stream(66));
    CHECK(nested.verdict == Verdict::pass);
    CHECK(nested.slack > 0.0);
}

TEST_CASE("tensor lift")
{
    const auto spec = GaussianSpec::standard(2);
    const CheckReport one = tensor_lift_check(Body::ball(2, 1.5), Body::ball(2, 1.0), 1, spec, 100000, Stream(67));
    CHECK(one.verdict == Verdict::pass);
    const CheckReport boxes = tensor_lift_check(Body::axis_box(vec({1.0, 1.0})), Body::axis_box(vec({1.0, 1.0})), 3,
                                                spec, 100000, Stream(68));
    CHECK(boxes.lhs.value == doctest::Approx(std::pow(box_measure(vec({1.0, 1.0})).value, 3)).epsilon(1e-12));
    CHECK(boxes.verdict == Verdict::pass);
    const CheckReport balls =
        tensor_lift_check(Body::ball(2, 1.5), Body::ball(2, 1.5), 4, spec, 200000, Stream(69), std::sqrt(2.0));
    CHECK(std::abs(balls.slack) <= 3.0 * balls.slack_se);
}

TEST_CASE("rotation average")
{
    const Body a = Body::ellipsoid(vec({0.3, 2.0}));
    const Body b = Body::ellipsoid(vec({2.0, 0.3}));
    const CheckReport g = rotation_average_check(a, b, GaussianSpec::standard(2), 500, 20000, Stream(70));
    CHECK(g.verdict == Verdict::pass);
    const CheckReport r = rotation_average_check(a, b, RadialMeasure::uniform_ball(2, 2.0), 200, 20000, Stream(71));
    CHECK(r.verdict != Verdict::fail);
    const CheckReport balls =
        rotation_average_check(Body::ball(2, 1.0), Body::ball(2, 1.0), GaussianSpec::standard(2), 50, 20000, Stream(72));
    CHECK(balls.slack > 0.0);
}

TEST_CASE("ball factor")
{
    const CheckReport r = cor6_check(Body::ball(3, 1.0), 2.0, GaussianSpec::standard(3), 100000, Stream(73));
    const double exact = ball_measure(3, 1.0).value * (1.0 - ball_measure(3, 2.0).value);
    CHECK(std::abs(r.slack - exact) <= 3.0 * r.slack_se + 1e-12);
    const CheckReport huge = cor6_check(Body::axis_box(vec({1.0, 1.0})), 50.0, GaussianSpec::standard(2), 100000,
                                        Stream(74));
    CHECK(std::abs(huge.slack) < 1e-12);
    Stream s(75);
    const Body e = Body::ellipsoid(vec({0.3, 0.8, 1.2, 2.0, 3.0}), haar_orthogonal(s, 5));
    CHECK(cor6_check(e, std::sqrt(5.0), GaussianSpec::standard(5), 200000, Stream(76)).verdict == Verdict::pass);
}

TEST_CASE("orthant decomposition")
{
    const auto spec = GaussianSpec::standard(2);
    const CheckReport r = orthant_conditions_check(Body::axis_box(vec({1.0, 0.5})), Body::ellipsoid(vec({2.0, 0.7})),
                                                   spec, 200000, Stream(77));
    CHECK(r.verdict == Verdict::pass);
    CHECK(part(r, "orthant_projection").lhs.value == 0.0);
    // Box against a tilted ellipsoid: the projection condition has a witness.
    const Body tilted = Body::ellipsoid(vec({2.0, 0.5}), givens(2, 0, 1, std::numbers::pi / 4));
    OrthantOptions opts;
    opts.projection_points = 20000;
    const CheckReport w =
        orthant_conditions_check(Body::axis_box(vec({1.0, 1.0})), tilted, spec, 20000, Stream(78), opts);
    CHECK(part(w, "orthant_projection").verdict == Verdict::fail);
    CHECK(part(w, "orthant_projection").details.contains("witness"));
}

TEST_CASE("lattice inequality")
{
    const Body box = Body::axis_box(vec({1.0, 0.5, 2.0}));
    const std::vector<int> pos{1, 1, 1};
    const IndicatorSpec f{box, pos};
    CHECK(kr_lattice_check(f, f, f, f, 20000, Stream(79)).verdict == Verdict::pass);
    const Body a = Body::ellipsoid(vec({1.0, 2.0, 0.5}));
    const Body b = Body::ball(3, 1.2);
    const std::vector<int> signs{1, -1, 1};
    const CheckReport natural = kr_lattice_check({a, signs}, {b, signs}, {full_space_proxy(3), signs},
                                               {intersect(a, b), signs}, 20000, Stream(80), signs);
    CHECK(natural.verdict == Verdict::pass);
    // A too-small f4 breaks the inequality on some pair.
    const CheckReport bad = kr_lattice_check({a, pos}, {b, pos}, {full_space_proxy(3), pos},
                                             {Body::axis_box(vec({0.1, 0.1, 0.1})), pos}, 20000, Stream(81));
    CHECK(bad.verdict == Verdict::fail);
    CHECK(bad.details.contains("witness"));
}

TEST_CASE("quadratic-exponential identity")
{
    const int n = 3;
    const auto spec = GaussianSpec::standard(n);
    const logconcave::BodyIndicator box{Body::axis_box(vec({0.5, 1.0, 1.5}))};
    const CheckReport zero = prop11_identity_check(Matrix::Zero(n, n), box, spec, 50000, Stream(82));
    CHECK(part(zero, "prop11_identity").slack == 0.0);
    CHECK(zero.verdict == Verdict::pass);
    const double a = 0.7;
    const CheckReport flat =
        prop11_identity_check(a * Matrix::Identity(n, n), logconcave::Constant{1.0}, spec, 200000, Stream(83));
    const CheckReport& id = part(flat, "prop11_identity");
    CHECK(std::abs(id.lhs.value - std::pow(1.0 + a, -0.5 * n)) <= 3.0 * id.lhs.std_error);
    // Diagonal A with a box: the rescaled side is exact.
    const Vector d = vec({0.2, 1.0, 3.0});
    const CheckReport diag = prop11_identity_check(d.asDiagonal(), box, spec, 200000, Stream(84));
    const CheckReport& did = part(diag, "prop11_identity");
    const Vector hw = vec({0.5, 1.0, 1.5}).cwiseProduct((Vector::Ones(n) + d).cwiseSqrt());
    const double exact = box_measure(hw).value / std::sqrt((Vector::Ones(n) + d).prod());
    CHECK(std::abs(did.rhs.value - exact) <= 3.0 * did.rhs.std_error);
    CHECK(std::abs(did.lhs.value - exact) <= 3.0 * did.lhs.std_error);
    CHECK(did.verdict == Verdict::pass);
    CHECK(part(diag, "prop11_inequality").verdict == Verdict::pass);
    Matrix indefinite = Matrix::Identity(n, n);
    indefinite(0, 0) = -1.0;
    CHECK_THROWS_AS(prop11_identity_check(indefinite, box, spec, 100, Stream(85)), ContractViolation);
}

TEST_CASE("log-concavity")
{
    std::vector<double> gauss;
    std::vector<double> interval;
    std::vector<double> dip;
    for (int k = -10; k <= 10; ++k) {
        const double t = 0.2 * k;
        gauss.push_back(std::exp(-0.5 * t * t));
        interval.push_back(std::abs(t) <= 1.0 ? 1.0 : 0.0);
        dip.push_back(k == 3 ? 0.8 : 1.0);
    }
    const std::vector<double> tiny(gauss.size(), 1e-6);
    CHECK(logconcavity_check(gauss, tiny).verdict == Verdict::pass);
    CHECK(logconcavity_check(interval, tiny).verdict == Verdict::pass);
    const CheckReport r = logconcavity_check(dip, tiny);
    CHECK(r.verdict == Verdict::fail);
    std::vector<double> gap = interval;
    gap[10] = 0.0;
    CHECK(logconcavity_check(gap, tiny).verdict == Verdict::fail);
}
