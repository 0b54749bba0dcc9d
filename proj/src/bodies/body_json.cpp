#include "gcl/body_json.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <sstream>

#include "gcl/errors.hpp"

namespace gcl {

using nlohmann::json;

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

[[noreturn]] void fail(const std::string& where, const std::string& what)
{
    throw ParseError(where + ": " + what);
}

const json& field(const json& j, const char* key, const std::string& where)
{
    if (!j.is_object()) {
        fail(where, "expected an object");
    }
    const auto it = j.find(key);
    if (it == j.end()) {
        fail(where + "." + key, "missing key");
    }
    return *it;
}

double number(const json& j, const std::string& where)
{
    if (!j.is_number()) {
        fail(where, "expected a number");
    }
    return j.get<double>();
}

/// Construction errors from the body factories are re-raised as parse errors
/// naming the key that carried the bad value.
template <class F>
Body build(const std::string& where, F&& f)
{
    try {
        return f();
    } catch (const ContractViolation& e) {
        fail(where, e.what());
    }
}

} // namespace

json to_json(const Vector& v)
{
    return json(std::vector<double>(v.data(), v.data() + v.size()));
}

json to_json(const Matrix& m)
{
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k) {
            row.push_back(m(i, k));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

Vector vector_from_json(const json& j, const std::string& where)
{
    if (!j.is_array() || j.empty()) {
        fail(where, "expected a nonempty array of numbers");
    }
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        v[static_cast<Eigen::Index>(i)] = number(j[i], where + "[" + std::to_string(i) + "]");
    }
    return v;
}

Matrix matrix_from_json(const json& j, const std::string& where)
{
    if (!j.is_array() || j.empty()) {
        fail(where, "expected a nonempty array of rows");
    }
    const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
    if (cols == 0) {
        fail(where + "[0]", "expected a nonempty row");
    }
    Matrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string rw = where + "[" + std::to_string(i) + "]";
        if (!j[i].is_array() || j[i].size() != cols) {
            fail(rw, "rows must all have length " + std::to_string(cols));
        }
        for (std::size_t k = 0; k < cols; ++k) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
                number(j[i][k], rw + "[" + std::to_string(k) + "]");
        }
    }
    return m;
}

json to_json(const Body& body)
{
    return std::visit(
        Overloaded{
            [](const shape::Slab& s) {
                return json{{"kind", "slab"}, {"direction", to_json(s.direction)}, {"halfwidth", s.halfwidth}};
            },
            [](const shape::AxisBox& b) {
                return json{{"kind", "axis_box"}, {"halfwidths", to_json(b.halfwidths)}};
            },
            [](const shape::Ball& b) { return json{{"kind", "ball"}, {"dim", b.dim}, {"radius", b.radius}}; },
            [](const shape::Ellipsoid& e) {
                return json{{"kind", "ellipsoid"},
                            {"radii", to_json(e.radii)},
                            {"orientation", to_json(e.orientation.matrix())}};
            },
            [](const shape::SymPolytope& p) { return json{{"kind", "sym_polytope"}, {"rows", to_json(p.rows)}}; },
            [](const shape::Intersection& in) {
                json parts = json::array();
                for (const Body& p : in.parts) {
                    parts.push_back(to_json(p));
                }
                return json{{"kind", "intersection"}, {"parts", std::move(parts)}};
            },
            [](const shape::Scaled& s) {
                return json{{"kind", "scaled"}, {"factor", s.factor}, {"inner", to_json(*s.inner)}};
            },
            [](const shape::Rotated& r) {
                return json{{"kind", "rotated"},
                            {"rotation", to_json(r.rotation.matrix())},
                            {"inner", to_json(*r.inner)}};
            },
            [](const shape::MinkowskiSum& m) {
                return json{{"kind", "minkowski_sum"}, {"a", to_json(*m.a)}, {"b", to_json(*m.b)}};
            },
        },
        body.node());
}

Body body_from_json(const json& j, const std::string& where)
{
    const json& kind_j = field(j, "kind", where);
    if (!kind_j.is_string()) {
        fail(where + ".kind", "expected a string");
    }
    const std::string kind = kind_j.get<std::string>();
    const auto at = [&](const char* key) { return where + "." + key; };

    if (kind == "slab") {
        Vector u = vector_from_json(field(j, "direction", where), at("direction"));
        const double s = number(field(j, "halfwidth", where), at("halfwidth"));
        return build(at("halfwidth"), [&] { return Body::slab(u, s); });
    }
    if (kind == "axis_box") {
        Vector w = vector_from_json(field(j, "halfwidths", where), at("halfwidths"));
        return build(at("halfwidths"), [&] { return Body::axis_box(w); });
    }
    if (kind == "ball") {
        const json& dj = field(j, "dim", where);
        if (!dj.is_number_integer()) {
            fail(at("dim"), "expected an integer");
        }
        const int dim = dj.get<int>();
        const double r = number(field(j, "radius", where), at("radius"));
        return build(at("radius"), [&] { return Body::ball(dim, r); });
    }
    if (kind == "ellipsoid") {
        Vector radii = vector_from_json(field(j, "radii", where), at("radii"));
        if (j.contains("orientation")) {
            Matrix o = matrix_from_json(j["orientation"], at("orientation"));
            return build(at("orientation"), [&] { return Body::ellipsoid(radii, OrthogonalMatrix(o)); });
        }
        return build(at("radii"), [&] { return Body::ellipsoid(radii); });
    }
    if (kind == "ellipsoid_shape") {
        Matrix s = matrix_from_json(field(j, "shape", where), at("shape"));
        return build(at("shape"), [&] { return Body::ellipsoid_from_shape(s); });
    }
    if (kind == "sym_polytope") {
        Matrix rows = matrix_from_json(field(j, "rows", where), at("rows"));
        return build(at("rows"), [&] { return Body::sym_polytope(rows); });
    }
    if (kind == "intersection") {
        const json& pj = field(j, "parts", where);
        if (!pj.is_array() || pj.empty()) {
            fail(at("parts"), "expected a nonempty array of bodies");
        }
        std::vector<Body> parts;
        for (std::size_t i = 0; i < pj.size(); ++i) {
            parts.push_back(body_from_json(pj[i], at("parts") + "[" + std::to_string(i) + "]"));
        }
        return build(at("parts"), [&] { return intersect(parts); });
    }
    if (kind == "scaled") {
        const double c = number(field(j, "factor", where), at("factor"));
        Body inner = body_from_json(field(j, "inner", where), at("inner"));
        return build(at("factor"), [&] { return scale(inner, c); });
    }
    if (kind == "rotated") {
        Matrix u = matrix_from_json(field(j, "rotation", where), at("rotation"));
        Body inner = body_from_json(field(j, "inner", where), at("inner"));
        return build(at("rotation"), [&] { return rotate(inner, OrthogonalMatrix(u)); });
    }
    if (kind == "minkowski_sum") {
        Body a = body_from_json(field(j, "a", where), at("a"));
        Body b = body_from_json(field(j, "b", where), at("b"));
        return build(where, [&] { return minkowski_sum(a, b); });
    }
    fail(at("kind"), "unknown body kind '" + kind + "'");
}

json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ParseError(path + ": cannot open file");
    }
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        const auto upto = std::min<std::size_t>(e.byte, text.size());
        const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
        std::ostringstream os;
        os << path << ":" << line << ": " << e.what();
        throw ParseError(os.str());
    }
}

} // namespace gcl
