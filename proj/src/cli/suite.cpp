#include <cmath>
#include <cstdio>
#include <numbers>

#include "gcl/body_json.hpp"
#include "gcl/cli.hpp"
#include "gcl/errors.hpp"
#include "gcl/measure.hpp"

namespace gcl {
namespace {

using nlohmann::json;

// Instances are drawn from a fixed manifest stream so every run seed tests
// the same bodies; the run seed only drives the estimators.
constexpr std::uint64_t kManifestSeed = 0x6465736b2d7631ULL; // "desk-v1"

class Builder {
  public:
    explicit Builder(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo, double hi) { return lo + (hi - lo) * rng_.next_uniform(); }
    int integer(int lo, int hi) { return lo + static_cast<int>(rng_.next_u64() % static_cast<std::uint64_t>(hi - lo + 1)); }
    Stream& rng() { return rng_; }

    Vector uniform_vector(int n, double lo, double hi)
    {
        Vector v(n);
        for (int i = 0; i < n; ++i) {
            v[i] = uniform(lo, hi);
        }
        return v;
    }

    Body ellipsoid(int n, double lo, double hi)
    {
        return Body::ellipsoid(uniform_vector(n, lo, hi), haar_orthogonal(rng_, n));
    }

    Body slab(int n, double lo, double hi) { return Body::slab(uniform_sphere(rng_, n), uniform(lo, hi)); }

    Body box(int n, double lo, double hi) { return Body::axis_box(uniform_vector(n, lo, hi)); }

    /// m rows u_i / s_i with random unit u_i and halfwidths s_i.
    Body polytope(int n, int m, double lo, double hi)
    {
        Matrix rows(m, n);
        for (int i = 0; i < m; ++i) {
            rows.row(i) = uniform_sphere(rng_, n).transpose() / uniform(lo, hi);
        }
        return Body::sym_polytope(rows);
    }

    Body any_body(int n)
    {
        switch (integer(0, 4)) {
        case 0:
            return ellipsoid(n, 0.3, 3.0);
        case 1:
            return box(n, 0.3, 2.0);
        case 2:
            return slab(n, 0.3, 2.0);
        case 3:
            return Body::ball(n, uniform(0.5, 3.0));
        default:
            return polytope(n, n + 2, 0.4, 2.0);
        }
    }

    Matrix gaussian_matrix(int rows, int cols)
    {
        Matrix m(rows, cols);
        for (int i = 0; i < rows; ++i) {
            for (int j = 0; j < cols; ++j) {
                m(i, j) = rng_.next_normal();
            }
        }
        return m;
    }

  private:
    Stream rng_;
};

std::string job_id(const char* group, const char* kind, int index)
{
    char buf[96];
    std::snprintf(buf, sizeof buf, "%s_%s_%03d", group, kind, index);
    return buf;
}

// Sample counts per job; count_scale shrinks instance counts for smoke runs.
struct Sizes {
    std::uint64_t big;
    std::uint64_t medium;
    std::uint64_t small;
    double count_scale;
};

int count(int full, const Sizes& s)
{
    return std::max(1, static_cast<int>(std::lround(full * s.count_scale)));
}

void add(Suite& suite, const char* group, const char* kind, int index, json params, std::uint64_t samples,
         const char* require, json tags = json::object())
{
    tags["require"] = require;
    suite.jobs.push_back({job_id(group, kind, index), group, kind, std::move(params), samples, std::move(tags)});
}

void add_constants(Suite& suite)
{
    add(suite, "c01", "rho_identity", 0, json::object(), 0, "pass");
    add(suite, "c02", "ball_clt", 0, json::object(), 0, "pass");
}

void add_khatri_sidak(Suite& suite, Builder& g, const Sizes& s)
{
    const int total = count(200, s);
    for (int k = 0; k < total; ++k) {
        const int n = g.integer(2, 6);
        const bool identity = k % 10 == 0;
        const Matrix t = identity ? Matrix(Matrix::Identity(n, n)) : g.gaussian_matrix(n, n);
        json params = {{"gaussian", GaussianSpec::shaped(t).to_json()},
                       {"k", 1},
                       {"halfwidths", to_json(g.uniform_vector(n, 0.5, 2.0))}};
        add(suite, "c03", "khatri_sidak", k, std::move(params), s.medium, "pass",
            {{"identity", identity}});
    }
    // Full product form on random covariances.
    const int products = count(50, s);
    for (int k = 0; k < products; ++k) {
        const int n = g.integer(2, 6);
        json params = {{"gaussian", GaussianSpec::shaped(g.gaussian_matrix(n, n)).to_json()},
                       {"halfwidths", to_json(Vector(Vector::Constant(n, 1.0)))}};
        add(suite, "x01", "sidak_product", k, std::move(params), s.medium, "pass");
    }
}

void add_pitt(Suite& suite, Builder& g, const Sizes& s)
{
    const int total = count(100, s);
    auto planar = [&]() {
        switch (g.integer(0, 3)) {
        case 0:
            return g.slab(2, 0.3, 2.0);
        case 1:
            return g.box(2, 0.3, 2.0);
        case 2:
            return g.ellipsoid(2, 0.3, 3.0);
        default:
            return g.polytope(2, 4, 0.4, 2.0);
        }
    };
    for (int k = 0; k < total; ++k) {
        const Body a = planar();
        const Body b = planar();
        add(suite, "c04", "correlation", k, {{"a", to_json(a)}, {"b", to_json(b)}}, s.big, "no_fail");
    }
}

void add_ellipsoids(Suite& suite, Builder& g, const Sizes& s)
{
    const int total = count(100, s);
    for (int k = 0; k < total; ++k) {
        const int n = 2 + k % 4;
        const Body a = g.ellipsoid(n, 0.3, 3.0);
        const Body b = g.ellipsoid(n, 0.3, 3.0);
        add(suite, "c05", "correlation", k, {{"a", to_json(a)}, {"b", to_json(b)}}, s.big, "no_fail");
    }
}

void add_prop1(Suite& suite, Builder& g, const Sizes& s)
{
    const int total = count(50, s);
    for (int k = 0; k < total; ++k) {
        const int n = g.integer(1, 6);
        Body a = Body::ball(n, g.uniform(0.3, 3.0));
        Body b = Body::ball(n, g.uniform(0.3, 3.0));
        if (k % 2 == 1) {
            a = g.box(n, 0.3, 2.0);
            b = g.box(n, 0.3, 2.0);
        }
        add(suite, "c06", "prop1", k, {{"a", to_json(a)}, {"b", to_json(b)}}, s.medium, "pass");
    }
    const int pow2 = count(100, s);
    for (int k = 0; k < pow2; ++k) {
        const int n = g.integer(1, 6);
        const Body a = g.any_body(n);
        const Body b = g.any_body(n);
        add(suite, "c06", "pow2_bound", k, {{"a", to_json(a)}, {"b", to_json(b)}}, s.medium, "pass");
    }
}

void add_small_and_rotations(Suite& suite, Builder& g, const Sizes& s)
{
    const int small = count(50, s);
    for (int k = 0; k < small; ++k) {
        const int n = g.integer(1, 6);
        const double limit = 0.99 * rho_n(n);
        auto inside = [&]() {
            if (g.integer(0, 1) == 0) {
                Vector r = g.uniform_vector(n, 0.2, 1.0);
                r *= limit / r.maxCoeff();
                return Body::ellipsoid(r, haar_orthogonal(g.rng(), n));
            }
            Vector w = g.uniform_vector(n, 0.2, 1.0);
            w *= limit / w.norm();
            return Body::axis_box(w);
        };
        const Body a = inside();
        const Body b = inside();
        add(suite, "c07", "small_sets", k, {{"a", to_json(a)}, {"b", to_json(b)}}, s.medium, "no_fail");
    }
    const int cor6 = count(50, s);
    for (int k = 0; k < cor6; ++k) {
        const int n = g.integer(2, 6);
        const Body a = g.any_body(n);
        const double r = g.uniform(0.5, 2.0 * std::sqrt(static_cast<double>(n)));
        add(suite, "c07", "cor6", k, {{"a", to_json(a)}, {"radius", r}}, s.medium, "no_fail");
    }
    const int rot = count(20, s);
    for (int k = 0; k < rot; ++k) {
        const int n = g.integer(2, 4);
        const Body a = k % 2 == 0 ? g.polytope(n, n + 1, 0.2, 1.5) : g.ellipsoid(n, 0.2, 2.5);
        const Body b = k % 3 == 0 ? g.polytope(n, n + 1, 0.2, 1.5) : g.ellipsoid(n, 0.2, 2.5);
        json params = {{"a", to_json(a)}, {"b", to_json(b)}, {"rotations", s.count_scale < 1.0 ? 50 : 500}};
        if (k % 4 == 1) {
            params["measure"] = {{"kind", "radial"}, {"name", "uniform_ball"}, {"radius", 2.0}};
        } else if (k % 4 == 3) {
            params["measure"] = {{"kind", "radial"}, {"name", "exponential"}, {"scale", 1.0}};
        }
        add(suite, "c07", "rotation_average", k, std::move(params), s.small, "no_fail");
    }
}

void add_tensor(Suite& suite, Builder& g, const Sizes& s)
{
    const int total = count(20, s);
    for (int k = 0; k < total; ++k) {
        const int n = g.integer(1, 4);
        const int copies = g.integer(1, std::min(4, 16 / n));
        Body a = g.ellipsoid(n, 0.8, 3.0);
        Body b = Body::ball(n, g.uniform(1.0, 3.0));
        if (k % 5 == 0) {
            a = g.box(n, 0.8, 2.0);
            b = g.box(n, 0.8, 2.0);
        }
        json params = {{"a", to_json(a)}, {"b", to_json(b)}, {"copies", copies}, {"amplification", std::pow(2.0, 0.5 * n)}};
        add(suite, "c08", "tensor_lift", k, std::move(params), s.medium, "pass");
    }
}

void add_orthants(Suite& suite, Builder& g, const Sizes& s)
{
    const int total = count(20, s);
    auto unconditional = [&](int n) {
        switch (g.integer(0, 3)) {
        case 0:
            return g.box(n, 0.3, 2.0);
        case 1:
            return Body::ball(n, g.uniform(0.5, 3.0));
        case 2:
            return Body::ellipsoid(g.uniform_vector(n, 0.3, 3.0));
        default:
            return intersect(g.box(n, 0.5, 2.0), Body::ellipsoid(g.uniform_vector(n, 0.5, 3.0)));
        }
    };
    for (int k = 0; k < total; ++k) {
        const int n = g.integer(2, 6);
        const Body a = unconditional(n);
        const Body b = unconditional(n);
        json params = {{"a", to_json(a)}, {"b", to_json(b)}, {"projection_points", 100000}};
        add(suite, "c09", "orthant_conditions", k, params, s.medium, "pass");

        std::vector<int> signs(static_cast<std::size_t>(n));
        for (auto& v : signs) {
            v = g.integer(0, 1) == 0 ? 1 : -1;
        }
        json lattice = {{"f1", {{"body", to_json(a)}, {"orthant", signs}}},
                        {"f2", {{"body", to_json(b)}, {"orthant", signs}}},
                        {"f3", {{"body", to_json(full_space_proxy(n))}, {"orthant", signs}}},
                        {"f4", {{"body", to_json(intersect(a, b))}, {"orthant", signs}}},
                        {"orthant", signs}};
        add(suite, "c09", "kr_lattice", k, std::move(lattice), 100000, "pass");
    }
    // Box against a 45-degree rotated ellipsoid: not unconditional, so the
    // projection condition must produce a witness.
    Vector radii(2);
    radii << 2.0, 0.5;
    const Body box = Body::axis_box(Vector::Ones(2));
    const Body tilted = Body::ellipsoid(radii, givens(2, 0, 1, std::numbers::pi / 4));
    add(suite, "c09", "orthant_witness", 0,
        {{"a", to_json(box)}, {"b", to_json(tilted)}, {"projection_points", 100000}}, s.small, "pass");
}

void add_prop11(Suite& suite, Builder& g, const Sizes& s)
{
    const int total = count(50, s);
    for (int k = 0; k < total; ++k) {
        const int n = g.integer(1, 5);
        Matrix a;
        switch (k % 5) {
        case 0:
            a = g.uniform_vector(n, 0.0, 2.0).asDiagonal();
            break;
        case 1: {
            const Matrix b = g.gaussian_matrix(n, std::max(1, n - 1));
            a = 0.5 * b * b.transpose();
            break;
        }
        default: {
            const Matrix b = g.gaussian_matrix(n, n);
            a = 0.5 * b * b.transpose();
            break;
        }
        }
        a = 0.5 * (a + a.transpose()).eval();
        json gj;
        switch (k % 3) {
        case 0:
            gj = {{"kind", "indicator"}, {"body", to_json(g.box(n, 0.3, 2.0))}};
            break;
        case 1: {
            const Matrix b = g.gaussian_matrix(n, n);
            Matrix p = 0.5 * b * b.transpose();
            p = 0.5 * (p + p.transpose()).eval();
            gj = {{"kind", "gaussian_bump"}, {"precision", to_json(p)}};
            break;
        }
        default:
            gj = {{"kind", "l1_exponential"}, {"lambda", g.uniform(0.2, 2.0)}};
            break;
        }
        add(suite, "c10", "prop11", k, {{"matrix", to_json(a)}, {"g", std::move(gj)}}, s.medium, "pass");
    }
    // Larger a in lower dimension: the weight's relative variance is
    // ((1+a)^2/(1+2a))^{n/2}, which must stay small for the SE to be honest.
    const double levels[] = {0.1, 0.5, 1.0, 2.0, 4.0};
    for (int k = 0; k < 5; ++k) {
        add(suite, "c10", "prop11_analytic", k, {{"a", levels[k]}, {"dim", 5 - k}}, s.medium, "pass");
    }
}

json rotopt_params(Builder& g, int n, double beta)
{
    return {{"e_radii", to_json(g.uniform_vector(n, 0.5, 3.0))},
            {"f_radii", to_json(g.uniform_vector(n, 0.5, 3.0))},
            {"beta", beta},
            {"quad", "sph:40"}};
}

void add_rotopt(Suite& suite, Builder& g, const Sizes& s)
{
    const int grads = count(100, s);
    for (int k = 0; k < grads; ++k) {
        add(suite, "c11", "rotopt_gradient", k, rotopt_params(g, 2 + k % 2, 1.0), 0, "pass");
    }
    const int grid = count(20, s);
    for (int k = 0; k < grid + 5; ++k) {
        const double beta = k < grid ? 1.0 : 8.0;
        add(suite, "c12", "rotopt_alpha_grid", k, rotopt_params(g, 2, beta), 0, "pass");
    }
    const int descents = count(10, s);
    for (int k = 0; k < descents + 3; ++k) {
        const double beta = k < descents ? 1.0 : 8.0;
        add(suite, "c12", "rotopt_descent", k, rotopt_params(g, 3, beta), 0, "pass");
    }
    const int scans = count(3, s);
    for (int k = 0; k < scans; ++k) {
        json params = rotopt_params(g, 3, 1.0);
        params["rotations"] = s.count_scale < 1.0 ? 50 : 1000;
        add(suite, "c12", "rotopt_haar_scan", k, std::move(params), 0, "pass");
    }
}

void add_marginals(Suite& suite, Builder& g, const Sizes& s)
{
    const int total = count(10, s);
    const int n = 4;
    for (int k = 0; k < total; ++k) {
        Body body = g.ellipsoid(n, 0.5, 2.5);
        if (k % 3 == 1) {
            body = rotate(g.box(n, 0.5, 2.0), haar_orthogonal(g.rng(), n));
        } else if (k % 3 == 2) {
            body = intersect(g.ellipsoid(n, 0.8, 2.5), g.slab(n, 0.5, 1.5));
        }
        add(suite, "c13", "marginal_logconcavity", k, {{"body", to_json(body)}, {"axis", 0}, {"points", 21}, {"span", 0.9}},
            s.big, "pass");
    }
}

} // namespace

Suite build_suite(const std::string& name)
{
    Sizes sizes{};
    if (name == "desk") {
        sizes = {1000000, 200000, 20000, 1.0};
    } else if (name == "smoke") {
        sizes = {20000, 10000, 2000, 0.05};
    } else {
        throw ParseError("suite: unknown suite '" + name + "' (expected desk or smoke)");
    }
    Suite suite;
    suite.name = name;
    suite.version = name + "-v1";
    Builder g(kManifestSeed);
    add_constants(suite);
    add_khatri_sidak(suite, g, sizes);
    add_pitt(suite, g, sizes);
    add_ellipsoids(suite, g, sizes);
    add_prop1(suite, g, sizes);
    add_small_and_rotations(suite, g, sizes);
    add_tensor(suite, g, sizes);
    add_orthants(suite, g, sizes);
    add_prop11(suite, g, sizes);
    add_rotopt(suite, g, sizes);
    add_marginals(suite, g, sizes);
    return suite;
}

} // namespace gcl
