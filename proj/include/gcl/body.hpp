#pragma once

#include <memory>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "gcl/linalg.hpp"

namespace gcl {

class Body;

namespace shape {

/// {x : |<x,u>| <= s}
struct Slab {
    Vector direction;
    double halfwidth;
};

/// {x : |x_i| <= w_i}
struct AxisBox {
    Vector halfwidths;
};

/// {x : |x| <= r} in dimension `dim`.
struct Ball {
    int dim;
    double radius;
};

/// {x : sum_i <row_i, x>^2 / r_i^2 <= 1}, rows of `orientation`.
struct Ellipsoid {
    Vector radii;
    OrthogonalMatrix orientation;
    bool axis_aligned;
};

/// {x : |<a_i, x>| <= 1 for all rows a_i}
struct SymPolytope {
    Matrix rows;
};

struct Intersection {
    std::vector<Body> parts;
};

/// factor * inner
struct Scaled {
    double factor;
    std::shared_ptr<const Body> inner;
};

/// U(inner) = {Ux : x in inner}
struct Rotated {
    OrthogonalMatrix rotation;
    std::shared_ptr<const Body> inner;
};

/// a + b; membership needs support functions of both summands.
struct MinkowskiSum {
    std::shared_ptr<const Body> a;
    std::shared_ptr<const Body> b;
};

} // namespace shape

/// Immutable handle to a centered, symmetric, closed convex body.
///
/// Copies share the underlying node, so derived bodies (scaled, rotated,
/// intersected) reference their inputs instead of duplicating payloads.
class Body {
  public:
    using Variant = std::variant<shape::Slab, shape::AxisBox, shape::Ball, shape::Ellipsoid,
                                 shape::SymPolytope, shape::Intersection, shape::Scaled,
                                 shape::Rotated, shape::MinkowskiSum>;

    static Body slab(Vector direction, double halfwidth);
    static Body axis_box(Vector halfwidths);
    static Body ball(int dim, double radius);
    static Body ellipsoid(Vector radii);
    static Body ellipsoid(Vector radii, OrthogonalMatrix orientation);
    /// E = {x : x^T S^{-1} x <= 1}. Radii are sqrt(eig(S)) sorted descending;
    /// each eigenvector's first nonzero component is made positive.
    static Body ellipsoid_from_shape(const Matrix& shape);
    static Body sym_polytope(Matrix rows);

    int dim() const { return dim_; }
    const Variant& node() const { return *node_; }

    template <class T>
    const T* as() const
    {
        return std::get_if<T>(node_.get());
    }

    /// Stable lower-case variant name used in JSON ("ball", "axis_box", ...).
    const char* kind() const;

  private:
    friend Body intersect(std::vector<Body> parts);
    friend Body scale(const Body& body, double c);
    friend Body rotate(const Body& body, const OrthogonalMatrix& u);
    friend Body minkowski_sum(const Body& a, const Body& b);

    Body(int dim, Variant v) : dim_(dim), node_(std::make_shared<const Variant>(std::move(v))) {}

    int dim_ = 0;
    std::shared_ptr<const Variant> node_;
};

Body intersect(std::vector<Body> parts);
Body intersect(const Body& a, const Body& b);

/// c * body. Balls, boxes, slabs, ellipsoids and polytopes are folded into
/// their own variant; other bodies get a Scaled view.
Body scale(const Body& body, double c);

/// U(body); contains(rotate(B, U), x) <=> contains(B, U^T x).
Body rotate(const Body& body, const OrthogonalMatrix& u);

Body minkowski_sum(const Body& a, const Body& b);

/// A ball of radius 1e3: contains every Gaussian sample in desk dimensions.
Body full_space_proxy(int dim);

/// Closed-set membership. Throws ContractViolation on dimension mismatch and
/// UnsupportedError for a Minkowski sum outside the exact families (see
/// exact_minkowski_family).
bool contains(const Body& body, std::span<const double> x);
bool contains(const Body& body, const Vector& x);

/// h_B(u) = sup{<x,u> : x in B}; +inf for a slab and u not parallel to its
/// direction. Throws UnsupportedError for Intersection and SymPolytope.
double support(const Body& body, const Vector& u);

/// Outer approximation of membership in a + b: true iff
/// |<x,u>| <= h_a(u) + h_b(u) for every supplied direction. A false answer is
/// certified; a true answer may be spurious unless the directions contain
/// all active normals.
bool minkowski_contains(const Body& sum, std::span<const double> x, std::span<const Vector> directions);
bool minkowski_contains(const Body& sum, const Vector& x, std::span<const Vector> directions);

/// True when the summands of a Minkowski sum are Ball+Ball or
/// AxisBox+AxisBox, for which membership is decided exactly.
bool exact_minkowski_family(const Body& sum);

/// Smallest known r with body inside rB (may be +inf).
double bounding_radius(const Body& body);

} // namespace gcl
