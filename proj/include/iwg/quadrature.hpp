#pragma once

#include <cmath>
#include <numbers>
#include <numeric>
#include <utility>
#include <vector>

#include "iwg/geometry.hpp"

namespace iwg {

/// Weighted point set on a region or segment; weights carry the measure.
struct QuadratureRule {
    std::vector<Point> points;
    std::vector<double> weights;
    int exactness_degree = 0;

    std::size_t size() const { return points.size(); }
    double measure() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }

    void append(const QuadratureRule& other)
    {
        points.insert(points.end(), other.points.begin(), other.points.end());
        weights.insert(weights.end(), other.weights.begin(), other.weights.end());
    }

    template <typename F>
    double integrate(F&& f) const
    {
        double s = 0.0;
        for (std::size_t q = 0; q < points.size(); ++q)
            s += weights[q] * f(points[q]);
        return s;
    }
};

/// A rule split by subdomain: points in `inside` belong to Omega_1.
struct SidedRule {
    QuadratureRule inside;
    QuadratureRule outside;

    const QuadratureRule& on(Side s) const { return s == Side::inside ? inside : outside; }
    double measure() const { return inside.measure() + outside.measure(); }
};

/// n-point Gauss-Legendre nodes and weights on [0,1].
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n)
{
    std::vector<double> x(n), w(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            dp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16)
                break;
        }
        // recompute derivative at the converged node
        {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            dp = n * (z * p0 - p1) / (z * z - 1.0);
        }
        const double wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = 0.5 * (1.0 - z);
        x[n - 1 - i] = 0.5 * (1.0 + z);
        w[i] = w[n - 1 - i] = 0.5 * wi;
    }
    return {x, w};
}

/// Gauss-Legendre rule on a segment, exact to `degree`.
inline QuadratureRule quadrature_on_edge(const Point& a, const Point& b, int degree)
{
    const int n = std::max(1, (degree + 2) / 2);
    const auto [x, w] = gauss_legendre(n);
    const double len = (b - a).norm();
    QuadratureRule r;
    r.exactness_degree = 2 * n - 1;
    r.points.reserve(n);
    r.weights.reserve(n);
    for (int i = 0; i < n; ++i) {
        r.points.push_back(a + x[i] * (b - a));
        r.weights.push_back(w[i] * len);
    }
    return r;
}

/// Edge rule split at the interface root, if any, so piecewise integrands are exact.
inline SidedRule quadrature_on_edge(const Point& a, const Point& b, int degree,
                                    const LevelSetInterface& iface, double tol = kGeomTol)
{
    SidedRule out;
    const auto roots = detail::interior_roots(iface, a, b, tol);
    std::vector<Point> cuts{a};
    for (double t : roots)
        cuts.push_back(a + t * (b - a));
    cuts.push_back(b);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const auto piece = quadrature_on_edge(cuts[i], cuts[i + 1], degree);
        const Side s = iface.side_of(0.5 * (cuts[i] + cuts[i + 1]));
        (s == Side::inside ? out.inside : out.outside).append(piece);
    }
    out.inside.exactness_degree = out.outside.exactness_degree = std::max(1, degree);
    return out;
}

/// Collapsed-coordinate (Duffy) Gauss rule on a triangle; positive weights.
inline QuadratureRule triangle_rule(const Triangle& t, int degree)
{
    const int n = std::max(1, (degree + 3) / 2);
    const auto [x, w] = gauss_legendre(n);
    const double area2 = 2.0 * std::abs(signed_area(t[0], t[1], t[2]));
    QuadratureRule r;
    r.exactness_degree = degree;
    r.points.reserve(n * n);
    r.weights.reserve(n * n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double u = x[i];
            const double v = x[j] * (1.0 - u);
            r.points.push_back(t[0] + u * (t[1] - t[0]) + v * (t[2] - t[0]));
            r.weights.push_back(w[i] * w[j] * (1.0 - u) * area2);
        }
    }
    return r;
}

inline QuadratureRule polygon_rule(const std::vector<Point>& poly, int degree)
{
    QuadratureRule r;
    r.exactness_degree = degree;
    for (const auto& t : triangulate(poly))
        r.append(triangle_rule(t, degree));
    return r;
}

/// Rule on one side of a cut element. With depth > 0 the chord is replaced by
/// 2^depth chords inscribed in the true arc.
inline QuadratureRule quadrature_on_subregion(const ElementCut& cut, Side side, int degree,
                                              int depth, const LevelSetInterface& iface)
{
    return polygon_rule(curved_subregion(cut, side, iface, depth), degree);
}

inline SidedRule quadrature_on_cut_element(const ElementCut& cut, int degree, int depth,
                                           const LevelSetInterface& iface)
{
    return {quadrature_on_subregion(cut, Side::inside, degree, depth, iface),
            quadrature_on_subregion(cut, Side::outside, degree, depth, iface)};
}

} // namespace iwg
