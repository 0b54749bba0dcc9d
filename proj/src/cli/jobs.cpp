#include <cmath>
#include <numbers>

#include "gcl/body_json.hpp"
#include "gcl/checks.hpp"
#include "gcl/cli.hpp"
#include "gcl/errors.hpp"
#include "gcl/measure.hpp"
#include "gcl/rotopt.hpp"

namespace gcl {
namespace {

using nlohmann::json;

const json& require(const json& params, const std::string& key)
{
    if (!params.is_object() || !params.contains(key)) {
        throw ParseError("params." + key + ": missing key");
    }
    return params.at(key);
}

template <class T>
T get(const json& params, const std::string& key)
{
    try {
        return require(params, key).get<T>();
    } catch (const json::exception& e) {
        throw ParseError("params." + key + ": " + e.what());
    }
}

template <class T>
T get_or(const json& params, const std::string& key, T fallback)
{
    if (!params.is_object() || !params.contains(key)) {
        return fallback;
    }
    return get<T>(params, key);
}

Body body_param(const json& params, const std::string& key)
{
    return body_from_json(require(params, key), "params." + key);
}

GaussianSpec gaussian_param(const json& params, int n)
{
    if (params.contains("gaussian")) {
        GaussianSpec g = GaussianSpec::from_json(params["gaussian"], "params.gaussian");
        if (g.dim() != n) {
            throw ContractViolation("params.gaussian: dimension " + std::to_string(g.dim()) +
                                    " does not match the bodies (" + std::to_string(n) + ")");
        }
        return g;
    }
    return GaussianSpec::standard(n);
}

InvariantMeasure measure_param(const json& params, int n)
{
    if (!params.contains("measure")) {
        return GaussianSpec::standard(n);
    }
    const json& m = params["measure"];
    if (m.value("kind", "") != "radial") {
        return gaussian_param({{"gaussian", m}}, n);
    }
    const std::string name = m.value("name", "");
    if (name == "gaussian") {
        return RadialMeasure::gaussian(n);
    }
    if (name == "uniform_ball") {
        return RadialMeasure::uniform_ball(n, get<double>(m, "radius"));
    }
    if (name == "exponential") {
        return RadialMeasure::exponential(n, get<double>(m, "scale"));
    }
    throw ParseError("params.measure.name: unknown radial measure '" + name + "'");
}

LogConcaveFn g_param(const json& params, int n)
{
    const json& g = require(params, "g");
    const std::string kind = get<std::string>(g, "kind");
    if (kind == "indicator") {
        return logconcave::BodyIndicator{body_from_json(require(g, "body"), "params.g.body")};
    }
    if (kind == "gaussian_bump") {
        Matrix p = matrix_from_json(require(g, "precision"), "params.g.precision");
        if (p.rows() != n || p.cols() != n) {
            throw ContractViolation("params.g.precision: wrong size");
        }
        return logconcave::GaussianBump{std::move(p)};
    }
    if (kind == "l1_exponential") {
        return logconcave::L1Exponential{get<double>(g, "lambda")};
    }
    if (kind == "constant") {
        return logconcave::Constant{get_or<double>(g, "value", 1.0)};
    }
    throw ParseError("params.g.kind: unknown function kind '" + kind + "'");
}

IndicatorSpec indicator_param(const json& params, const std::string& key)
{
    const json& f = require(params, key);
    return {body_from_json(require(f, "body"), "params." + key + ".body"), get_or<std::vector<int>>(f, "orthant", {})};
}

CheckReport deterministic(const std::string& name, double lhs, double rhs, Relation rel)
{
    CheckReport r;
    r.name = name;
    r.lhs = Estimate::exact(lhs);
    r.rhs = Estimate::exact(rhs);
    r.relation = rel;
    r.finalize_from_sides();
    return r;
}

CheckReport rho_identity()
{
    double worst = 0.0;
    int worst_n = 1;
    for (int n = 1; n <= 50; ++n) {
        const double target = std::pow(2.0 * std::numbers::pi, 0.5 * n);
        const double rel = std::abs(ball_volume(n, 2.0 * rho_n(n)) / target - 1.0);
        if (rel > worst) {
            worst = rel;
            worst_n = n;
        }
    }
    CheckReport identity = deterministic("rho_volume_identity", worst, 1e-10, Relation::le);
    identity.details["worst_n"] = worst_n;
    const double big = 1e4;
    const double ratio = rho_n(10000) / (0.5 * std::sqrt(big / std::numbers::e));
    CheckReport asym = deterministic("rho_asymptotic_ratio", std::abs(ratio - 1.0), 0.02, Relation::le);
    asym.details["ratio"] = ratio;
    CheckReport r = identity;
    r.name = "rho_identity";
    r.parts = {identity, asym};
    r.finalize();
    return r;
}

CheckReport ball_clt()
{
    CheckReport r;
    r.name = "ball_clt";
    for (int n : {25, 100, 400}) {
        const double v = ball_measure(n, std::sqrt(static_cast<double>(n))).value;
        CheckReport p = deterministic("ball_clt_n" + std::to_string(n), std::abs(v - 0.5), 1.5 / std::sqrt(n),
                                      Relation::le);
        p.details["ball_measure"] = v;
        r.parts.push_back(p);
    }
    r.lhs = r.parts.back().lhs;
    r.rhs = r.parts.back().rhs;
    r.relation = Relation::le;
    r.finalize_from_sides();
    return r;
}

struct RotoptInputs {
    Vector e;
    Vector f;
    SmoothProfile profile;
    QuadratureSpec quad;
};

RotoptInputs rotopt_inputs(const json& params, const Stream& stream)
{
    RotoptInputs in{vector_from_json(require(params, "e_radii"), "params.e_radii"),
                    vector_from_json(require(params, "f_radii"), "params.f_radii"),
                    SmoothProfile::exponential(get_or<double>(params, "beta", 1.0)), {}};
    if (in.e.size() != in.f.size()) {
        throw ContractViolation("params.e_radii and params.f_radii differ in length");
    }
    const int n = static_cast<int>(in.e.size());
    const std::string q = get_or<std::string>(params, "quad", "");
    in.quad = q.empty() ? QuadratureSpec::default_for(n, stream.key()) : QuadratureSpec::parse(q, stream.key());
    return in;
}

json rotopt_inputs_json(const json& params, const RotoptInputs& in)
{
    json j = params;
    j["quad"] = in.quad.to_string();
    return j;
}

CheckReport rotopt_gradient(const json& params, const Stream& stream)
{
    const RotoptInputs in = rotopt_inputs(params, stream);
    const int n = static_cast<int>(in.e.size());
    const RotationObjective obj(in.e, in.f, in.profile, in.quad);
    OrthogonalMatrix u;
    if (params.contains("u")) {
        u = OrthogonalMatrix(matrix_from_json(params["u"], "params.u"));
    } else {
        Stream s = stream.derive("start", 0);
        u = haar_orthogonal(s, n);
    }
    const double h = get_or<double>(params, "h", 1e-4);
    const Matrix g = obj.gradient(u);
    double err = 0.0;
    double scale = 0.0;
    json pairs = json::array();
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            OrthogonalMatrix up = u;
            OrthogonalMatrix um = u;
            up.apply_givens_right(i, j, h);
            um.apply_givens_right(i, j, -h);
            const double fd = (obj.value(up) - obj.value(um)) / (2.0 * h);
            err = std::max(err, std::abs(g(i, j) - fd));
            scale = std::max(scale, std::abs(g(i, j)));
            pairs.push_back({{"i", i}, {"j", j}, {"analytic", g(i, j)}, {"central_difference", fd}});
        }
    }
    const double rel = scale > 0.0 ? err / scale : err;
    CheckReport r = deterministic("rotopt_gradient", rel, get_or<double>(params, "tolerance", 1e-4), Relation::le);
    r.inputs = rotopt_inputs_json(params, in);
    r.inputs["u"] = to_json(u.matrix());
    r.details["pairs"] = std::move(pairs);
    r.details["h"] = h;
    return r;
}

CheckReport rotopt_alpha_grid(const json& params, const Stream& stream)
{
    const RotoptInputs in = rotopt_inputs(params, stream);
    if (in.e.size() != 2) {
        throw ContractViolation("rotopt_alpha_grid: needs n = 2");
    }
    const RotationObjective obj(in.e, in.f, in.profile, in.quad);
    const double step = get_or<double>(params, "step", 1e-3);
    const double pi = std::numbers::pi;
    const Matrix v = obj.rotated_directions(OrthogonalMatrix::identity(2));
    double best_alpha = 0.0;
    double best = std::numeric_limits<double>::infinity();
    std::size_t points = 0;
    for (double a = -0.5 * pi + step; a <= 0.5 * pi + 1e-12; a += step) {
        const double val = obj.value_along(v, 0, 1, a);
        ++points;
        if (val < best) {
            best = val;
            best_alpha = a;
        }
    }
    const double dist =
        std::min({std::abs(best_alpha), std::abs(best_alpha - 0.5 * pi), std::abs(best_alpha + 0.5 * pi)});
    CheckReport r = deterministic("rotopt_alpha_grid", dist, step, Relation::le);
    r.inputs = rotopt_inputs_json(params, in);
    r.details["best_alpha"] = best_alpha;
    r.details["best_value"] = best;
    r.details["grid_points"] = points;
    r.details["value_at_0"] = obj.value_along(v, 0, 1, 0.0);
    r.details["value_at_half_pi"] = obj.value_along(v, 0, 1, 0.5 * pi);
    return r;
}

CheckReport rotopt_descent(const json& params, const Stream& stream)
{
    const RotoptInputs in = rotopt_inputs(params, stream);
    const int n = static_cast<int>(in.e.size());
    Stream s = stream.derive("start", 0);
    const OrthogonalMatrix start = haar_orthogonal(s, n);
    const RotOptResult res = minimize_over_rotations(in.e, in.f, in.profile, in.quad, {}, start);
    double rise = 0.0;
    for (std::size_t k = 1; k < res.trace.size(); ++k) {
        rise = std::max(rise, res.trace[k].value - res.trace[k - 1].value);
    }
    const double tol = get_or<double>(params, "tolerance", 1e-3);
    CheckReport diag = deterministic("rotopt_diagnostic", res.diagnostic, tol, Relation::le);
    CheckReport gap = deterministic("rotopt_permutation_gap", res.permutation_gap, tol, Relation::le);
    CheckReport mono = deterministic("rotopt_monotone_trace", rise, 0.0, Relation::le);
    CheckReport r = diag;
    r.name = "rotopt_descent";
    r.inputs = rotopt_inputs_json(params, in);
    r.inputs["start"] = to_json(start.matrix());
    r.details["result"] = to_json(res);
    r.parts = {diag, gap, mono};
    r.finalize();
    return r;
}

CheckReport rotopt_haar_scan(const json& params, const Stream& stream)
{
    const RotoptInputs in = rotopt_inputs(params, stream);
    const int n = static_cast<int>(in.e.size());
    const RotationObjective obj(in.e, in.f, in.profile, in.quad);
    const PermutationScan scan = permutation_scan(obj);
    const int rotations = get_or<int>(params, "rotations", 1000);
    double lowest = std::numeric_limits<double>::infinity();
    for (int m = 0; m < rotations; ++m) {
        Stream s = stream.derive("haar", static_cast<std::uint64_t>(m));
        lowest = std::min(lowest, obj.value(haar_orthogonal(s, n)));
    }
    const double tol = get_or<double>(params, "tolerance", 1e-3);
    const double best = scan.values[scan.best];
    CheckReport r = deterministic("rotopt_haar_scan", lowest, best - tol, Relation::ge);
    r.inputs = rotopt_inputs_json(params, in);
    r.details["best_permutation"] = scan.perms[scan.best];
    r.details["permutation_values"] = scan.values;
    r.details["rotations"] = rotations;
    return r;
}

// Largest t with t e_axis in the body (bisection), used when the support
// function is unavailable.
double axis_reach(const Body& body, int axis)
{
    const int n = body.dim();
    Vector e = Vector::Zero(n);
    e[axis] = 1.0;
    try {
        const double h = support(body, e);
        if (std::isfinite(h)) {
            return h;
        }
    } catch (const UnsupportedError&) {
    }
    double lo = 0.0;
    double hi = 1.0;
    while (contains(body, Vector(hi * e))) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e6) {
            throw ContractViolation("marginal_logconcavity: body is unbounded along the axis");
        }
    }
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (contains(body, Vector(mid * e))) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return lo;
}

CheckReport marginal_logconcavity(const json& params, std::uint64_t samples, const Stream& stream)
{
    const Body body = body_param(params, "body");
    const int axis = get_or<int>(params, "axis", 0);
    std::vector<double> grid;
    if (params.contains("grid")) {
        grid = get<std::vector<double>>(params, "grid");
    } else {
        const int points = get_or<int>(params, "points", 21);
        const double span = get_or<double>(params, "span", 0.9);
        if (points < 3) {
            throw ContractViolation("params.points: need at least 3 grid points");
        }
        const double reach = span * axis_reach(body, axis);
        for (int k = 0; k < points; ++k) {
            grid.push_back(-reach + 2.0 * reach * k / (points - 1));
        }
    }
    const GaussianSpec spec = GaussianSpec::standard(body.dim());
    const auto profile = marginal_profile(body, axis, grid, spec, samples, stream);
    std::vector<double> values;
    std::vector<double> ses;
    for (const auto& e : profile) {
        values.push_back(e.value);
        ses.push_back(e.std_error);
    }
    CheckReport r = logconcavity_check(values, ses);
    r.name = "marginal_logconcavity";
    r.inputs = {{"body", to_json(body)}, {"axis", axis}, {"grid", grid}, {"stream", stream.describe()}};
    return r;
}

CheckReport prop11_analytic(const json& params, std::uint64_t samples, const Stream& stream)
{
    const double a = get<double>(params, "a");
    const int n = get<int>(params, "dim");
    const Matrix m = a * Matrix::Identity(n, n);
    const CheckReport inner =
        prop11_identity_check(m, logconcave::Constant{1.0}, GaussianSpec::standard(n), samples, stream);
    CheckReport r;
    r.name = "prop11_analytic";
    r.relation = Relation::eq;
    r.lhs = inner.parts.at(0).lhs;
    r.rhs = Estimate::exact(std::pow(1.0 + a, -0.5 * n));
    r.slack = r.lhs.value - r.rhs.value;
    r.slack_se = r.lhs.std_error;
    r.inputs = inner.inputs;
    r.finalize();
    return r;
}

CheckReport orthant_witness(const json& params, std::uint64_t samples, const Stream& stream)
{
    const Body a = body_param(params, "a");
    const Body b = body_param(params, "b");
    OrthantOptions opts;
    opts.projection_points = get_or<std::uint64_t>(params, "projection_points", opts.projection_points);
    const CheckReport inner = orthant_conditions_check(a, b, gaussian_param(params, a.dim()), samples, stream, opts);
    const CheckReport& projection = inner.parts.at(0);
    CheckReport r = deterministic("orthant_witness", projection.lhs.value, 1.0, Relation::ge);
    r.inputs = inner.inputs;
    r.details["projection"] = to_json(projection);
    return r;
}

} // namespace

std::uint64_t default_samples(const std::string& kind)
{
    if (kind == "rotation_average") {
        return 20000;
    }
    if (kind == "kr_lattice") {
        return 100000;
    }
    return 1000000;
}

CheckReport run_check(const std::string& kind, const json& params, std::uint64_t samples, const Stream& stream)
{
    if (kind == "correlation" || kind == "pow2_bound" || kind == "small_sets" || kind == "cor2" ||
        kind == "prop1" || kind == "tensor_lift" || kind == "orthant_conditions") {
        const Body a = body_param(params, "a");
        const Body b = body_param(params, "b");
        if (a.dim() != b.dim()) {
            throw ContractViolation("params.a has dimension " + std::to_string(a.dim()) + " but params.b has " +
                                    std::to_string(b.dim()));
        }
        const GaussianSpec spec = gaussian_param(params, a.dim());
        if (kind == "correlation") {
            return correlation_check(a, b, spec, samples, stream);
        }
        if (kind == "pow2_bound") {
            return pow2_bound_check(a, b, spec, samples, stream);
        }
        if (kind == "small_sets") {
            return small_sets_check(a, b, spec, samples, stream);
        }
        if (kind == "cor2") {
            return cor2_check(a, b, spec, samples, stream);
        }
        if (kind == "prop1") {
            std::vector<Vector> dirs;
            if (params.contains("directions")) {
                for (const auto& d : params["directions"]) {
                    dirs.push_back(vector_from_json(d, "params.directions[]"));
                }
            }
            return prop1_check(a, b, spec, samples, stream, dirs);
        }
        if (kind == "tensor_lift") {
            std::optional<double> c;
            if (params.contains("amplification")) {
                c = get<double>(params, "amplification");
            }
            return tensor_lift_check(a, b, get<int>(params, "copies"), spec, samples, stream, c);
        }
        OrthantOptions opts;
        opts.projection_points = get_or<std::uint64_t>(params, "projection_points", opts.projection_points);
        return orthant_conditions_check(a, b, spec, samples, stream, opts);
    }
    if (kind == "khatri_sidak" || kind == "sidak_product") {
        const GaussianSpec spec = GaussianSpec::from_json(require(params, "gaussian"), "params.gaussian");
        const Vector w = vector_from_json(require(params, "halfwidths"), "params.halfwidths");
        if (kind == "khatri_sidak") {
            return khatri_sidak_check(spec, get_or<int>(params, "k", 1), w, samples, stream);
        }
        return sidak_product_check(spec, w, samples, stream);
    }
    if (kind == "rotation_average") {
        const Body a = body_param(params, "a");
        const Body b = body_param(params, "b");
        return rotation_average_check(a, b, measure_param(params, a.dim()), get_or<int>(params, "rotations", 500),
                                      samples, stream);
    }
    if (kind == "cor6") {
        const Body a = body_param(params, "a");
        return cor6_check(a, get<double>(params, "radius"), gaussian_param(params, a.dim()), samples, stream);
    }
    if (kind == "kr_lattice") {
        return kr_lattice_check(indicator_param(params, "f1"), indicator_param(params, "f2"),
                                indicator_param(params, "f3"), indicator_param(params, "f4"), samples, stream,
                                get_or<std::vector<int>>(params, "orthant", {}));
    }
    if (kind == "prop11") {
        const Matrix m = matrix_from_json(require(params, "matrix"), "params.matrix");
        const int n = static_cast<int>(m.rows());
        return prop11_identity_check(m, g_param(params, n), GaussianSpec::standard(n), samples, stream);
    }
    if (kind == "logconcavity") {
        const auto values = get<std::vector<double>>(params, "values");
        const auto ses = get<std::vector<double>>(params, "ses");
        return logconcavity_check(values, ses);
    }
    if (kind == "marginal_logconcavity") {
        return marginal_logconcavity(params, samples, stream);
    }
    if (kind == "prop11_analytic") {
        return prop11_analytic(params, samples, stream);
    }
    if (kind == "orthant_witness") {
        return orthant_witness(params, samples, stream);
    }
    if (kind == "rho_identity") {
        return rho_identity();
    }
    if (kind == "ball_clt") {
        return ball_clt();
    }
    if (kind == "rotopt_gradient") {
        return rotopt_gradient(params, stream);
    }
    if (kind == "rotopt_alpha_grid") {
        return rotopt_alpha_grid(params, stream);
    }
    if (kind == "rotopt_descent") {
        return rotopt_descent(params, stream);
    }
    if (kind == "rotopt_haar_scan") {
        return rotopt_haar_scan(params, stream);
    }
    throw ParseError("unknown check '" + kind + "'");
}

} // namespace gcl
