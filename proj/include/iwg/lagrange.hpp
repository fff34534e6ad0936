#pragma once

#include <array>

#include <Eigen/Dense>

#include "iwg/geometry.hpp"

namespace iwg {

/// Lagrange P_k element (k = 1, 2) on a physical triangle. Local node order:
/// vertices 0,1,2, then for k = 2 the midpoints of edges (0,1), (1,2), (2,0).
class LagrangeTriangle {
public:
    LagrangeTriangle(const Triangle& t, int k) : tri_(t), k_(k)
    {
        const double a2 = 2.0 * signed_area(t[0], t[1], t[2]);
        for (int i = 0; i < 3; ++i) {
            const Point& p = t[(i + 1) % 3];
            const Point& q = t[(i + 2) % 3];
            grad_lambda_[i] = Point(p.y() - q.y(), q.x() - p.x()) / a2;
        }
    }

    int degree() const { return k_; }
    int size() const { return k_ == 1 ? 3 : 6; }
    const Triangle& triangle() const { return tri_; }

    Eigen::Vector3d barycentric(const Point& p) const
    {
        Eigen::Vector3d l;
        for (int i = 0; i < 3; ++i)
            l[i] = grad_lambda_[i].dot(p - tri_[(i + 1) % 3]);
        return l;
    }

    Eigen::VectorXd values(const Point& p) const
    {
        const Eigen::Vector3d l = barycentric(p);
        Eigen::VectorXd v(size());
        if (k_ == 1) {
            v = l;
            return v;
        }
        for (int i = 0; i < 3; ++i) {
            v[i] = l[i] * (2.0 * l[i] - 1.0);
            v[3 + i] = 4.0 * l[i] * l[(i + 1) % 3];
        }
        return v;
    }

    Eigen::MatrixX2d gradients(const Point& p) const
    {
        Eigen::MatrixX2d g(size(), 2);
        if (k_ == 1) {
            for (int i = 0; i < 3; ++i)
                g.row(i) = grad_lambda_[i].transpose();
            return g;
        }
        const Eigen::Vector3d l = barycentric(p);
        for (int i = 0; i < 3; ++i) {
            const int j = (i + 1) % 3;
            g.row(i) = ((4.0 * l[i] - 1.0) * grad_lambda_[i]).transpose();
            g.row(3 + i) = (4.0 * (l[i] * grad_lambda_[j] + l[j] * grad_lambda_[i])).transpose();
        }
        return g;
    }

    /// Physical location of local node i.
    Point node(int i) const
    {
        if (i < 3)
            return tri_[i];
        return 0.5 * (tri_[i - 3] + tri_[(i - 2) % 3]);
    }

private:
    Triangle tri_;
    int k_;
    std::array<Point, 3> grad_lambda_;
};

/// 1D Lagrange shape values on an edge at parameter t in [0,1]: endpoint a,
/// endpoint b, and (k = 2) the midpoint.
inline Eigen::VectorXd edge_lagrange(int k, double t)
{
    Eigen::VectorXd v(k == 1 ? 2 : 3);
    if (k == 1) {
        v << 1.0 - t, t;
    } else {
        v << (1.0 - t) * (1.0 - 2.0 * t), t * (2.0 * t - 1.0), 4.0 * t * (1.0 - t);
    }
    return v;
}

} // namespace iwg
