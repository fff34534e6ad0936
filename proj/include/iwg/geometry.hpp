#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "iwg/errors.hpp"

namespace iwg {

using Point = Eigen::Vector2d;
using Triangle = std::array<Point, 3>;

/// Subdomain label. Omega_1 is the inside of the interface, Omega_2 the outside.
enum class Side { inside = 1, outside = 2 };

inline int side_index(Side s) { return s == Side::inside ? 0 : 1; }

/// Absolute tolerance for root and degeneracy tests on the [-1,1]^2 domain.
inline constexpr double kDomainDiameter = 2.0 * std::numbers::sqrt2;
inline constexpr double kGeomTol = 1e-12 * kDomainDiameter;

/// Analytic interface phi(x,y) = (x-cx)^2 + (y-cy)^2 - r^2.
class LevelSetInterface {
public:
    enum class Kind { circle };

    static LevelSetInterface circle(const Point& center, double radius_squared)
    {
        if (!(radius_squared > 0.0))
            throw Error(ErrorKind::invalid_config, "circle radius_squared must be positive");
        return LevelSetInterface(center, radius_squared);
    }

    Kind kind() const { return Kind::circle; }
    const Point& center() const { return center_; }
    double radius_squared() const { return radius_squared_; }
    double radius() const { return std::sqrt(radius_squared_); }

    double value(const Point& p) const { return (p - center_).squaredNorm() - radius_squared_; }
    Point gradient(const Point& p) const { return 2.0 * (p - center_); }

    /// Unit normal pointing from Omega_1 into Omega_2.
    Point normal(const Point& p) const { return gradient(p).normalized(); }

    Side side_of(const Point& p) const { return value(p) < 0.0 ? Side::inside : Side::outside; }

    /// Point on the interface at polar angle theta about the center.
    Point at_angle(double theta) const
    {
        return center_ + radius() * Point(std::cos(theta), std::sin(theta));
    }

    /// Roots t in [0,1] of phi(a + t (b - a)), sorted ascending.
    std::vector<double> segment_roots(const Point& a, const Point& b) const
    {
        const Point d = b - a;
        const Point w = a - center_;
        const double qa = d.squaredNorm();
        const double qb = 2.0 * d.dot(w);
        const double qc = w.squaredNorm() - radius_squared_;
        std::vector<double> roots;
        const double disc = qb * qb - 4.0 * qa * qc;
        if (disc < 0.0 || qa == 0.0)
            return roots;
        const double sq = std::sqrt(disc);
        // cancellation-free pair of roots
        const double q = -0.5 * (qb + std::copysign(sq, qb));
        std::array<double, 2> cand{q / qa, q != 0.0 ? qc / q : q / qa};
        if (cand[0] > cand[1])
            std::swap(cand[0], cand[1]);
        for (double t : cand) {
            if (t < 0.0 || t > 1.0)
                continue;
            roots.push_back(refine_root(a, b, t));
        }
        return roots;
    }

private:
    LevelSetInterface(const Point& c, double r2) : center_(c), radius_squared_(r2) {}

    // Newton polish along the segment.
    double refine_root(const Point& a, const Point& b, double t) const
    {
        const Point d = b - a;
        for (int it = 0; it < 3; ++it) {
            const Point p = a + t * d;
            const double g = gradient(p).dot(d);
            if (g == 0.0)
                break;
            const double step = value(p) / g;
            t -= step;
            if (std::abs(step) <= kGeomTol)
                break;
        }
        return std::clamp(t, 0.0, 1.0);
    }

    Point center_;
    double radius_squared_;
};

inline double signed_area(const Point& a, const Point& b, const Point& c)
{
    return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y()));
}

inline double signed_area(const std::vector<Point>& poly)
{
    double s = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Point& p = poly[i];
        const Point& q = poly[(i + 1) % poly.size()];
        s += p.x() * q.y() - q.x() * p.y();
    }
    return 0.5 * s;
}

inline double diameter(const Triangle& t)
{
    return std::max({(t[0] - t[1]).norm(), (t[1] - t[2]).norm(), (t[2] - t[0]).norm()});
}

inline Point centroid(const Triangle& t) { return (t[0] + t[1] + t[2]) / 3.0; }

inline bool contains(const Triangle& t, const Point& p, double tol = 0.0)
{
    const double s0 = signed_area(t[0], t[1], p);
    const double s1 = signed_area(t[1], t[2], p);
    const double s2 = signed_area(t[2], t[0], p);
    const double a = signed_area(t[0], t[1], t[2]);
    const double m = tol * std::abs(a);
    if (a > 0)
        return s0 >= -m && s1 >= -m && s2 >= -m;
    return s0 <= m && s1 <= m && s2 <= m;
}

struct ElementClass {
    bool interface = false;
    Side side = Side::inside; ///< meaningful only when !interface

    static ElementClass non_interface(Side s) { return {false, s}; }
    static ElementClass cut() { return {true, Side::inside}; }
    bool operator==(const ElementClass&) const = default;
};

namespace detail {

inline int snapped_sign(double v, double tol)
{
    if (std::abs(v) <= tol)
        return 0;
    return v < 0.0 ? -1 : 1;
}

inline void check_nondegenerate(const Triangle& t, double tol)
{
    const double h = diameter(t);
    if (std::abs(signed_area(t[0], t[1], t[2])) < tol * h * h || h == 0.0)
        throw Error(ErrorKind::degenerate_triangle, "triangle area below tolerance");
}

/// Interior roots of phi along the segment, endpoints excluded by tolerance.
inline std::vector<double> interior_roots(const LevelSetInterface& iface, const Point& a,
                                          const Point& b, double tol)
{
    const double len = (b - a).norm();
    std::vector<double> out;
    for (double t : iface.segment_roots(a, b)) {
        if (t * len > tol && (1.0 - t) * len > tol)
            out.push_back(t);
    }
    return out;
}

} // namespace detail

/// Classify a triangle against the interface. Vertices with |phi| <= tol are
/// snapped onto the interface and do not by themselves make an element cut.
inline ElementClass classify_element(const Triangle& tri, const LevelSetInterface& iface,
                                     double tol = kGeomTol)
{
    detail::check_nondegenerate(tri, tol);
    bool neg = false, pos = false;
    for (const auto& v : tri) {
        const int s = detail::snapped_sign(iface.value(v), tol);
        neg |= s < 0;
        pos |= s > 0;
    }
    if (neg && pos)
        return ElementClass::cut();
    if (!pos)
        return ElementClass::non_interface(Side::inside);
    // All vertices outside or on Gamma: the circle can still dip through an edge
    // or sit inside the triangle.
    for (int i = 0; i < 3; ++i) {
        const auto roots = detail::interior_roots(iface, tri[i], tri[(i + 1) % 3], tol);
        if (!roots.empty())
            return ElementClass::cut();
    }
    if (contains(tri, iface.center()))
        return ElementClass::cut();
    return ElementClass::non_interface(Side::outside);
}

/// Location of an interface crossing on the element boundary.
struct EdgeCrossing {
    int edge = -1;      ///< local edge i joins vertex i and vertex (i+1)%3
    double t = 0.0;     ///< barycentric coordinate along the edge
    Point point = Point::Zero();
};

/// Geometric description of one cut element.
struct ElementCut {
    Triangle triangle;
    EdgeCrossing d, e;
    Point normal = Point::Zero(); ///< unit normal of segment DE, Omega_1 -> Omega_2
    std::vector<Point> inside_polygon;  ///< counterclockwise, straight chord
    std::vector<Point> outside_polygon; ///< counterclockwise, straight chord

    double chord_length() const { return (e.point - d.point).norm(); }
    Point chord_midpoint() const { return 0.5 * (d.point + e.point); }
    const std::vector<Point>& polygon(Side s) const
    {
        return s == Side::inside ? inside_polygon : outside_polygon;
    }
};

/// Split a cut triangle along the chord joining its two interface crossings.
inline ElementCut compute_cut(const Triangle& tri, const LevelSetInterface& iface,
                              double tol = kGeomTol)
{
    detail::check_nondegenerate(tri, tol);
    std::array<int, 3> sign{};
    for (int i = 0; i < 3; ++i)
        sign[i] = detail::snapped_sign(iface.value(tri[i]), tol);

    ElementCut cut;
    cut.triangle = tri;
    std::vector<EdgeCrossing> crossings;
    for (int i = 0; i < 3; ++i) {
        const Point& a = tri[i];
        const Point& b = tri[(i + 1) % 3];
        if (sign[i] == 0) {
            crossings.push_back({i, 0.0, a});
            cut.inside_polygon.push_back(a);
            cut.outside_polygon.push_back(a);
        } else {
            (sign[i] < 0 ? cut.inside_polygon : cut.outside_polygon).push_back(a);
        }
        const auto roots = detail::interior_roots(iface, a, b, tol);
        if (roots.size() > 1)
            throw Error(ErrorKind::multiple_crossings, "interface crosses one edge twice");
        if (!roots.empty()) {
            const double t = roots.front();
            const Point p = a + t * (b - a);
            crossings.push_back({i, t, p});
            cut.inside_polygon.push_back(p);
            cut.outside_polygon.push_back(p);
        }
    }
    if (crossings.size() != 2)
        throw Error(ErrorKind::multiple_crossings,
                    "interface must cross the element boundary exactly twice, found " +
                        std::to_string(crossings.size()));
    if (cut.inside_polygon.size() < 3 || cut.outside_polygon.size() < 3)
        throw Error(ErrorKind::multiple_crossings, "cut does not split the element");

    cut.d = crossings[0];
    cut.e = crossings[1];
    const Point chord = cut.e.point - cut.d.point;
    if (chord.norm() <= tol)
        throw Error(ErrorKind::multiple_crossings, "coincident interface crossings");
    Point n(chord.y(), -chord.x());
    n.normalize();
    if (n.dot(iface.gradient(cut.chord_midpoint())) < 0.0)
        n = -n;
    cut.normal = n;
    return cut;
}

/// Points strictly between `from` and `to` on the interface arc lying inside the
/// triangle, at 2^depth - 1 equally spaced angles (recursive midpoint bisection).
inline std::vector<Point> arc_points(const ElementCut& cut, const LevelSetInterface& iface,
                                     const Point& from, const Point& to, int depth)
{
    std::vector<Point> pts;
    if (depth <= 0)
        return pts;
    const Point c = iface.center();
    const double t0 = std::atan2(from.y() - c.y(), from.x() - c.x());
    const double t1 = std::atan2(to.y() - c.y(), to.x() - c.x());
    double span = t1 - t0;
    while (span > std::numbers::pi)
        span -= 2.0 * std::numbers::pi;
    while (span <= -std::numbers::pi)
        span += 2.0 * std::numbers::pi;
    if (!contains(cut.triangle, iface.at_angle(t0 + 0.5 * span), 1e-9))
        span -= std::copysign(2.0 * std::numbers::pi, span);
    const int segments = 1 << depth;
    pts.reserve(segments - 1);
    for (int j = 1; j < segments; ++j)
        pts.push_back(iface.at_angle(t0 + span * j / segments));
    return pts;
}

/// Sub-polygon of side `s` whose chord DE is replaced by a polyline inscribed in
/// the true arc. depth = 0 returns the straight-chord polygon.
inline std::vector<Point> curved_subregion(const ElementCut& cut, Side s,
                                           const LevelSetInterface& iface, int depth)
{
    const auto& poly = cut.polygon(s);
    if (depth <= 0)
        return poly;
    const std::size_t n = poly.size();
    auto is_crossing = [&](const Point& p) {
        return p == cut.d.point || p == cut.e.point;
    };
    for (std::size_t i = 0; i < n; ++i) {
        const Point& p = poly[i];
        const Point& q = poly[(i + 1) % n];
        if (!(is_crossing(p) && is_crossing(q) && p != q))
            continue;
        std::vector<Point> out;
        out.reserve(n + (1u << depth));
        for (std::size_t j = 0; j <= i; ++j)
            out.push_back(poly[j]);
        for (const auto& a : arc_points(cut, iface, p, q, depth))
            out.push_back(a);
        for (std::size_t j = i + 1; j < n; ++j)
            out.push_back(poly[j]);
        return out;
    }
    return poly;
}

/// Ear-clipping triangulation of a simple counterclockwise polygon.
inline std::vector<Triangle> triangulate(const std::vector<Point>& poly)
{
    std::vector<Triangle> tris;
    std::vector<Point> rest = poly;
    const double scale = std::abs(signed_area(poly));
    const double eps = 1e-14 * std::max(scale, 1e-300);

    // closed triangle minus its corners: a reflex vertex on the ear's diagonal blocks it
    auto blocks = [eps](const Triangle& t, const Point& p) {
        for (const auto& v : t)
            if ((v - p).squaredNorm() == 0.0)
                return false;
        return signed_area(t[0], t[1], p) >= -eps && signed_area(t[1], t[2], p) >= -eps &&
               signed_area(t[2], t[0], p) >= -eps;
    };

    while (rest.size() > 3) {
        const std::size_t n = rest.size();
        std::optional<std::size_t> ear;
        for (std::size_t i = 0; i < n && !ear; ++i) {
            const Triangle t{rest[(i + n - 1) % n], rest[i], rest[(i + 1) % n]};
            if (signed_area(t[0], t[1], t[2]) <= eps)
                continue;
            bool blocked = false;
            for (std::size_t j = 0; j < n && !blocked; ++j) {
                if (j == i || j == (i + 1) % n || j == (i + n - 1) % n)
                    continue;
                blocked = blocks(t, rest[j]);
            }
            if (!blocked)
                ear = i;
        }
        if (!ear) {
            // only flat vertices remain: drop one with zero turn
            std::size_t flat = 0;
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < n; ++i) {
                const double a = std::abs(
                    signed_area(rest[(i + n - 1) % n], rest[i], rest[(i + 1) % n]));
                if (a < best) {
                    best = a;
                    flat = i;
                }
            }
            rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(flat));
            continue;
        }
        const std::size_t i = *ear;
        tris.push_back({rest[(i + n - 1) % n], rest[i], rest[(i + 1) % n]});
        rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(i));
    }
    if (rest.size() == 3 && signed_area(rest[0], rest[1], rest[2]) > eps)
        tris.push_back({rest[0], rest[1], rest[2]});
    return tris;
}

} // namespace iwg
