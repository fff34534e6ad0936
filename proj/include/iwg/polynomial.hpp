#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "iwg/geometry.hpp"

namespace iwg {

inline int poly_dim(int k) { return (k + 1) * (k + 2) / 2; }

/// Monomials of total degree <= k in element-local coordinates (x - x_T) / h_T,
/// ordered by total degree: 1, X, Y, X^2, XY, Y^2, ...
class PolyBasis {
public:
    PolyBasis(int degree, const Point& center, double scale)
        : degree_(degree), center_(center), scale_(scale)
    {
        for (int d = 0; d <= degree; ++d)
            for (int b = 0; b <= d; ++b)
                exps_.emplace_back(d - b, b);
    }

    int degree() const { return degree_; }
    int size() const { return static_cast<int>(exps_.size()); }
    const Point& center() const { return center_; }
    double scale() const { return scale_; }
    const std::vector<std::pair<int, int>>& exponents() const { return exps_; }

    Point local(const Point& p) const { return (p - center_) / scale_; }

    Eigen::VectorXd values(const Point& p) const
    {
        const Point s = local(p);
        Eigen::VectorXd v(size());
        for (int i = 0; i < size(); ++i)
            v[i] = ipow(s.x(), exps_[i].first) * ipow(s.y(), exps_[i].second);
        return v;
    }

    /// Physical-coordinate gradients, one row per monomial.
    Eigen::MatrixX2d gradients(const Point& p) const
    {
        const Point s = local(p);
        Eigen::MatrixX2d g(size(), 2);
        for (int i = 0; i < size(); ++i) {
            const auto [a, b] = exps_[i];
            g(i, 0) = a == 0 ? 0.0 : a * ipow(s.x(), a - 1) * ipow(s.y(), b) / scale_;
            g(i, 1) = b == 0 ? 0.0 : b * ipow(s.x(), a) * ipow(s.y(), b - 1) / scale_;
        }
        return g;
    }

    /// Physical-coordinate Laplacians.
    Eigen::VectorXd laplacians(const Point& p) const
    {
        const Point s = local(p);
        Eigen::VectorXd l(size());
        const double h2 = scale_ * scale_;
        for (int i = 0; i < size(); ++i) {
            const auto [a, b] = exps_[i];
            double v = 0.0;
            if (a >= 2)
                v += a * (a - 1) * ipow(s.x(), a - 2) * ipow(s.y(), b);
            if (b >= 2)
                v += b * (b - 1) * ipow(s.x(), a) * ipow(s.y(), b - 2);
            l[i] = v / h2;
        }
        return l;
    }

private:
    static double ipow(double x, int n)
    {
        double r = 1.0;
        for (int i = 0; i < n; ++i)
            r *= x;
        return r;
    }

    int degree_;
    Point center_;
    double scale_;
    std::vector<std::pair<int, int>> exps_;
};

inline double legendre(int j, double x)
{
    double p0 = 1.0, p1 = x;
    if (j == 0)
        return p0;
    for (int n = 1; n < j; ++n) {
        const double p2 = ((2.0 * n + 1.0) * x * p1 - n * p0) / (n + 1.0);
        p0 = p1;
        p1 = p2;
    }
    return p1;
}

/// Orthonormal Legendre basis of P_{n-1} on the oriented segment a -> b.
class EdgeBasis {
public:
    EdgeBasis(const Point& a, const Point& b, int size) : a_(a), b_(b), size_(size)
    {
        length_ = (b - a).norm();
    }

    int size() const { return size_; }
    double length() const { return length_; }
    const Point& start() const { return a_; }
    const Point& end() const { return b_; }

    /// Arc-length fraction of the projection of p onto the segment.
    double parameter(const Point& p) const
    {
        return (p - a_).dot(b_ - a_) / (length_ * length_);
    }

    Eigen::VectorXd values(const Point& p) const
    {
        const double x = 2.0 * parameter(p) - 1.0;
        Eigen::VectorXd v(size_);
        for (int j = 0; j < size_; ++j)
            v[j] = std::sqrt((2.0 * j + 1.0) / length_) * legendre(j, x);
        return v;
    }

private:
    Point a_, b_;
    int size_;
    double length_ = 0.0;
};

} // namespace iwg
