#include "gcl/body.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "gcl/errors.hpp"

namespace gcl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_positive(double v, const char* what)
{
    if (!(v > 0.0) || !std::isfinite(v)) {
        std::ostringstream os;
        os << what << " must be positive and finite, got " << v;
        throw ContractViolation(os.str());
    }
}

void require_dim(const Body& body, std::size_t n)
{
    if (static_cast<std::size_t>(body.dim()) != n) {
        std::ostringstream os;
        os << "dimension mismatch: " << body.kind() << " body has dimension " << body.dim()
           << ", point has " << n;
        throw ContractViolation(os.str());
    }
}

using ConstMap = Eigen::Map<const Vector>;

bool contains_impl(const Body& body, std::span<const double> x);

bool minkowski_exact(const shape::MinkowskiSum& m, std::span<const double> x)
{
    const ConstMap xv(x.data(), static_cast<Eigen::Index>(x.size()));
    if (const auto* ba = m.a->as<shape::Ball>()) {
        const auto* bb = m.b->as<shape::Ball>();
        const double r = ba->radius + bb->radius;
        return xv.squaredNorm() <= r * r;
    }
    const auto& wa = m.a->as<shape::AxisBox>()->halfwidths;
    const auto& wb = m.b->as<shape::AxisBox>()->halfwidths;
    for (Eigen::Index i = 0; i < xv.size(); ++i) {
        if (std::abs(xv[i]) > wa[i] + wb[i]) {
            return false;
        }
    }
    return true;
}

bool contains_impl(const Body& body, std::span<const double> x)
{
    const auto n = static_cast<Eigen::Index>(x.size());
    const ConstMap xv(x.data(), n);
    return std::visit(
        Overloaded{
            [&](const shape::Slab& s) { return std::abs(s.direction.dot(xv)) <= s.halfwidth; },
            [&](const shape::AxisBox& b) {
                for (Eigen::Index i = 0; i < n; ++i) {
                    if (std::abs(xv[i]) > b.halfwidths[i]) {
                        return false;
                    }
                }
                return true;
            },
            [&](const shape::Ball& b) { return xv.squaredNorm() <= b.radius * b.radius; },
            [&](const shape::Ellipsoid& e) {
                double acc = 0.0;
                if (e.axis_aligned) {
                    for (Eigen::Index i = 0; i < n; ++i) {
                        const double t = xv[i] / e.radii[i];
                        acc += t * t;
                    }
                } else {
                    const Matrix& o = e.orientation.matrix();
                    for (Eigen::Index i = 0; i < n; ++i) {
                        const double t = o.row(i).dot(xv) / e.radii[i];
                        acc += t * t;
                    }
                }
                return acc <= 1.0;
            },
            [&](const shape::SymPolytope& p) {
                for (Eigen::Index i = 0; i < p.rows.rows(); ++i) {
                    if (std::abs(p.rows.row(i).dot(xv)) > 1.0) {
                        return false;
                    }
                }
                return true;
            },
            [&](const shape::Intersection& in) {
                for (const Body& part : in.parts) {
                    if (!contains_impl(part, x)) {
                        return false;
                    }
                }
                return true;
            },
            [&](const shape::Scaled& s) {
                ScratchVector y = xv / s.factor;
                return contains_impl(*s.inner, {y.data(), x.size()});
            },
            [&](const shape::Rotated& r) {
                ScratchVector y = r.rotation.matrix().transpose() * xv;
                return contains_impl(*r.inner, {y.data(), x.size()});
            },
            [&](const shape::MinkowskiSum& m) {
                if (!exact_minkowski_family(body)) {
                    throw UnsupportedError(
                        "membership in a Minkowski sum outside Ball+Ball / AxisBox+AxisBox needs an "
                        "explicit direction set (minkowski_contains)");
                }
                return minkowski_exact(m, x);
            },
        },
        body.node());
}

} // namespace

Body Body::slab(Vector direction, double halfwidth)
{
    const double norm = direction.norm();
    require_positive(norm, "slab direction norm");
    require_positive(halfwidth, "slab halfwidth");
    const int n = static_cast<int>(direction.size());
    return Body(n, shape::Slab{direction / norm, halfwidth / norm});
}

Body Body::axis_box(Vector halfwidths)
{
    if (halfwidths.size() == 0) {
        throw ContractViolation("axis box needs at least one halfwidth");
    }
    for (double w : halfwidths) {
        require_positive(w, "axis box halfwidth");
    }
    const int n = static_cast<int>(halfwidths.size());
    return Body(n, shape::AxisBox{std::move(halfwidths)});
}

Body Body::ball(int dim, double radius)
{
    if (dim < 1) {
        throw ContractViolation("ball dimension must be >= 1");
    }
    require_positive(radius, "ball radius");
    return Body(dim, shape::Ball{dim, radius});
}

Body Body::ellipsoid(Vector radii)
{
    const int n = static_cast<int>(radii.size());
    return ellipsoid(std::move(radii), OrthogonalMatrix::identity(n));
}

Body Body::ellipsoid(Vector radii, OrthogonalMatrix orientation)
{
    if (radii.size() == 0) {
        throw ContractViolation("ellipsoid needs at least one radius");
    }
    if (orientation.dim() != radii.size()) {
        throw ContractViolation("ellipsoid orientation dimension does not match radii");
    }
    for (double r : radii) {
        require_positive(r, "ellipsoid radius");
    }
    const int n = static_cast<int>(radii.size());
    const bool aligned = orientation.matrix().isIdentity(0.0);
    return Body(n, shape::Ellipsoid{std::move(radii), std::move(orientation), aligned});
}

Body Body::ellipsoid_from_shape(const Matrix& shape_matrix)
{
    if (shape_matrix.rows() != shape_matrix.cols() || shape_matrix.rows() == 0) {
        throw ContractViolation("ellipsoid shape matrix must be square");
    }
    if (!shape_matrix.isApprox(shape_matrix.transpose(), 1e-12)) {
        throw ContractViolation("ellipsoid shape matrix must be symmetric");
    }
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(shape_matrix);
    const auto n = shape_matrix.rows();
    Vector radii(n);
    Matrix rows(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const Eigen::Index src = n - 1 - k; // descending eigenvalues
        const double lambda = eig.eigenvalues()[src];
        if (!(lambda > 0.0)) {
            throw ContractViolation("ellipsoid shape matrix must be positive definite");
        }
        radii[k] = std::sqrt(lambda);
        Vector v = eig.eigenvectors().col(src);
        for (Eigen::Index i = 0; i < n; ++i) {
            if (std::abs(v[i]) > 1e-14) {
                if (v[i] < 0.0) {
                    v = -v;
                }
                break;
            }
        }
        rows.row(k) = v.transpose();
    }
    return ellipsoid(std::move(radii), orthogonal_from_qr(rows.transpose()).transpose());
}

Body Body::sym_polytope(Matrix rows)
{
    if (rows.rows() == 0 || rows.cols() == 0) {
        throw ContractViolation("symmetric polytope needs at least one row");
    }
    if (!rows.allFinite()) {
        throw ContractViolation("symmetric polytope rows must be finite");
    }
    const int n = static_cast<int>(rows.cols());
    return Body(n, shape::SymPolytope{std::move(rows)});
}

const char* Body::kind() const
{
    return std::visit(Overloaded{
                          [](const shape::Slab&) { return "slab"; },
                          [](const shape::AxisBox&) { return "axis_box"; },
                          [](const shape::Ball&) { return "ball"; },
                          [](const shape::Ellipsoid&) { return "ellipsoid"; },
                          [](const shape::SymPolytope&) { return "sym_polytope"; },
                          [](const shape::Intersection&) { return "intersection"; },
                          [](const shape::Scaled&) { return "scaled"; },
                          [](const shape::Rotated&) { return "rotated"; },
                          [](const shape::MinkowskiSum&) { return "minkowski_sum"; },
                      },
                      *node_);
}

Body intersect(std::vector<Body> parts)
{
    if (parts.empty()) {
        throw ContractViolation("intersection needs at least one part");
    }
    const int n = parts.front().dim();
    for (const Body& p : parts) {
        if (p.dim() != n) {
            throw ContractViolation("intersection parts must share a dimension");
        }
    }
    return Body(n, shape::Intersection{std::move(parts)});
}

Body intersect(const Body& a, const Body& b)
{
    return intersect(std::vector<Body>{a, b});
}

Body scale(const Body& body, double c)
{
    require_positive(c, "scale factor");
    const int n = body.dim();
    return std::visit(
        Overloaded{
            [&](const shape::Slab& s) { return Body(n, shape::Slab{s.direction, c * s.halfwidth}); },
            [&](const shape::AxisBox& b) { return Body(n, shape::AxisBox{c * b.halfwidths}); },
            [&](const shape::Ball& b) { return Body(n, shape::Ball{n, c * b.radius}); },
            [&](const shape::Ellipsoid& e) {
                return Body(n, shape::Ellipsoid{c * e.radii, e.orientation, e.axis_aligned});
            },
            [&](const shape::SymPolytope& p) { return Body(n, shape::SymPolytope{p.rows / c}); },
            [&](const shape::Scaled& s) { return Body(n, shape::Scaled{c * s.factor, s.inner}); },
            [&](const auto&) { return Body(n, shape::Scaled{c, std::make_shared<const Body>(body)}); },
        },
        body.node());
}

Body rotate(const Body& body, const OrthogonalMatrix& u)
{
    const int n = body.dim();
    if (u.dim() != n) {
        throw ContractViolation("rotate: rotation dimension does not match body");
    }
    return std::visit(
        Overloaded{
            [&](const shape::Ball&) { return body; },
            [&](const shape::Slab& s) {
                return Body(n, shape::Slab{u.matrix() * s.direction, s.halfwidth});
            },
            [&](const shape::Ellipsoid& e) {
                OrthogonalMatrix o = e.orientation * u.transpose();
                const bool aligned = o.matrix().isIdentity(0.0);
                return Body(n, shape::Ellipsoid{e.radii, std::move(o), aligned});
            },
            [&](const shape::SymPolytope& p) {
                return Body(n, shape::SymPolytope{p.rows * u.matrix().transpose()});
            },
            [&](const shape::Rotated& r) { return Body(n, shape::Rotated{u * r.rotation, r.inner}); },
            [&](const auto&) {
                return Body(n, shape::Rotated{u, std::make_shared<const Body>(body)});
            },
        },
        body.node());
}

Body minkowski_sum(const Body& a, const Body& b)
{
    if (a.dim() != b.dim()) {
        throw ContractViolation("Minkowski sum: summands must share a dimension");
    }
    return Body(a.dim(),
                shape::MinkowskiSum{std::make_shared<const Body>(a), std::make_shared<const Body>(b)});
}

Body full_space_proxy(int dim)
{
    return Body::ball(dim, 1e3);
}

bool contains(const Body& body, std::span<const double> x)
{
    require_dim(body, x.size());
    return contains_impl(body, x);
}

bool contains(const Body& body, const Vector& x)
{
    return contains(body, std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
}

double support(const Body& body, const Vector& u)
{
    if (u.size() != body.dim()) {
        throw ContractViolation("support: direction dimension does not match body");
    }
    return std::visit(
        Overloaded{
            [&](const shape::Slab& s) {
                const double c = s.direction.dot(u);
                const double un = u.norm();
                if (std::abs(c) >= un * (1.0 - 1e-12)) {
                    return s.halfwidth * std::abs(c);
                }
                return kInf;
            },
            [&](const shape::AxisBox& b) { return b.halfwidths.dot(u.cwiseAbs()); },
            [&](const shape::Ball& b) { return b.radius * u.norm(); },
            [&](const shape::Ellipsoid& e) {
                const Vector p = e.orientation.matrix() * u;
                return std::sqrt(p.cwiseProduct(e.radii).squaredNorm());
            },
            [&](const shape::SymPolytope&) -> double {
                throw UnsupportedError("no closed-form support for a symmetric polytope");
            },
            [&](const shape::Intersection&) -> double {
                throw UnsupportedError("no closed-form support for an intersection");
            },
            [&](const shape::Scaled& s) { return s.factor * support(*s.inner, u); },
            [&](const shape::Rotated& r) {
                return support(*r.inner, Vector(r.rotation.matrix().transpose() * u));
            },
            [&](const shape::MinkowskiSum& m) { return support(*m.a, u) + support(*m.b, u); },
        },
        body.node());
}

bool minkowski_contains(const Body& sum, std::span<const double> x, std::span<const Vector> directions)
{
    const auto* m = sum.as<shape::MinkowskiSum>();
    if (m == nullptr) {
        throw ContractViolation("minkowski_contains: body is not a Minkowski sum");
    }
    if (directions.empty()) {
        throw ContractViolation("minkowski_contains: direction set is empty");
    }
    require_dim(sum, x.size());
    const ConstMap xv(x.data(), static_cast<Eigen::Index>(x.size()));
    for (const Vector& u : directions) {
        const double h = support(*m->a, u) + support(*m->b, u);
        if (std::abs(xv.dot(u)) > h) {
            return false;
        }
    }
    return true;
}

bool minkowski_contains(const Body& sum, const Vector& x, std::span<const Vector> directions)
{
    return minkowski_contains(sum, std::span<const double>(x.data(), static_cast<std::size_t>(x.size())),
                              directions);
}

bool exact_minkowski_family(const Body& sum)
{
    const auto* m = sum.as<shape::MinkowskiSum>();
    if (m == nullptr) {
        return false;
    }
    const bool balls = m->a->as<shape::Ball>() && m->b->as<shape::Ball>();
    const bool boxes = m->a->as<shape::AxisBox>() && m->b->as<shape::AxisBox>();
    return balls || boxes;
}

double bounding_radius(const Body& body)
{
    return std::visit(
        Overloaded{
            [&](const shape::Slab& s) { return body.dim() == 1 ? s.halfwidth : kInf; },
            [&](const shape::AxisBox& b) { return b.halfwidths.norm(); },
            [&](const shape::Ball& b) { return b.radius; },
            [&](const shape::Ellipsoid& e) { return e.radii.maxCoeff(); },
            [&](const shape::SymPolytope& p) {
                // |x| <= |Ax| / sigma_min(A) <= sqrt(m) / sigma_min(A)
                if (p.rows.rows() < p.rows.cols()) {
                    return kInf;
                }
                const Eigen::JacobiSVD<Matrix> svd(p.rows);
                const double smin = svd.singularValues().minCoeff();
                if (!(smin > 1e-12 * svd.singularValues().maxCoeff())) {
                    return kInf;
                }
                return std::sqrt(static_cast<double>(p.rows.rows())) / smin;
            },
            [&](const shape::Intersection& in) {
                double r = kInf;
                for (const Body& part : in.parts) {
                    r = std::min(r, bounding_radius(part));
                }
                return r;
            },
            [&](const shape::Scaled& s) { return s.factor * bounding_radius(*s.inner); },
            [&](const shape::Rotated& r) { return bounding_radius(*r.inner); },
            [&](const shape::MinkowskiSum& m) { return bounding_radius(*m.a) + bounding_radius(*m.b); },
        },
        body.node());
}

} // namespace gcl
