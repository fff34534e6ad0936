#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "iwg/assembly.hpp"

namespace iwg {

/// Exact solution used for error measurement; piecewise by side.
struct ExactSolution {
    ScalarField u;
    VectorField grad;
};

/// Circular-interface benchmark on [-1,1]^2 with Gamma: x^2 + y^2 = 1/3,
///   u = cos(pi r^2) / A1                               inside,
///   u = cos(pi r^2) / A2 + (1/A1 - 1/A2) / 2           outside,
/// so that [u] = 0 and [A du/dn] = 0 on Gamma and f = -A lap(u) is smooth.
struct ManufacturedSolution {
    double a1 = 1.0;
    double a2 = 1.0;

    static LevelSetInterface interface() { return LevelSetInterface::circle(Point::Zero(), 1.0 / 3.0); }

    double coefficient(Side s) const { return s == Side::inside ? a1 : a2; }

    double u(const Point& p, Side s) const
    {
        const double c = std::cos(std::numbers::pi * p.squaredNorm());
        if (s == Side::inside)
            return c / a1;
        return c / a2 + 0.5 * (1.0 / a1 - 1.0 / a2);
    }

    Point grad(const Point& p, Side s) const
    {
        const double r2 = p.squaredNorm();
        return -2.0 * std::numbers::pi * std::sin(std::numbers::pi * r2) / coefficient(s) * p;
    }

    /// -A lap(u), identical on both sides.
    double f(const Point& p) const
    {
        const double r2 = p.squaredNorm();
        const double pi = std::numbers::pi;
        return 4.0 * pi * std::sin(pi * r2) + 4.0 * pi * pi * r2 * std::cos(pi * r2);
    }

    ProblemData problem() const
    {
        ProblemData d;
        d.a1 = a1;
        d.a2 = a2;
        d.f = [*this](const Point& p, Side) { return f(p); };
        d.g = [*this](const Point& p, Side s) { return u(p, s); };
        return d;
    }

    ExactSolution exact() const
    {
        return {[*this](const Point& p, Side s) { return u(p, s); },
                [*this](const Point& p, Side s) { return grad(p, s); }};
    }
};

struct ErrorNorms {
    double energy = 0.0; ///< ||P_h u - u_h||_{1,h}
    double l2 = 0.0;     ///< ||e_0||
    double linf = 0.0;   ///< max |u - u_h| over quadrature points
};

/// Local representation of Q_h u = {Q_0 u, Q_b u} on a cut element.
inline Eigen::VectorXd local_projection(const LocalIfeSpace& sp, const ScalarField& u)
{
    Eigen::VectorXd v(sp.num_dofs());
    v.head(sp.dim()) = project_q0(sp, u);
    for (int i = 0; i < 3; ++i)
        v.segment(sp.dim() + i * sp.k, sp.k) = project_qb(sp.edge_bases[i], sp.edge_rules[i], u);
    return v;
}

/// Energy, L2 and max errors of a solved discretization against an exact solution.
inline ErrorNorms compute_errors(const Discretization& d, const Eigen::VectorXd& x,
                                 const ExactSolution& ex)
{
    const auto& m = *d.mesh;
    const int k = d.options.k;
    ErrorNorms err;
    double e2 = 0.0, l2 = 0.0;
    for (std::size_t t = 0; t < m.num_triangles(); ++t) {
        const Eigen::VectorXd loc = d.maps[t].expand(x);
        if (const auto* sp = d.space(t)) {
            const Eigen::VectorXd proj = local_projection(*sp, ex.u);
            const Eigen::VectorXd diff = proj - loc;
            e2 += local_energy(*sp, diff);
            const Eigen::VectorXd d0 = diff.head(sp->dim());
            l2 += d0.dot(sp->mass * d0);
            for (Side s : {Side::inside, Side::outside}) {
                const auto& rule = sp->volume.on(s);
                for (std::size_t q = 0; q < rule.size(); ++q) {
                    const double uh = sp->evaluate(loc.head(sp->dim()), rule.points[q], s);
                    err.linf = std::max(err.linf, std::abs(ex.u(rule.points[q], s) - uh));
                }
            }
            continue;
        }
        const Side side = m.element_class[t].side;
        const LagrangeTriangle el(m.triangle(t), k);
        const auto rule = triangle_rule(m.triangle(t), d.options.error_degree());
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const Point& p = rule.points[q];
            const double diff = ex.u(p, side) - el.values(p).dot(loc);
            const Point gd = ex.grad(p, side) - el.gradients(p).transpose() * loc;
            e2 += rule.weights[q] * gd.squaredNorm();
            l2 += rule.weights[q] * diff * diff;
            err.linf = std::max(err.linf, std::abs(diff));
        }
    }
    err.energy = std::sqrt(std::max(0.0, e2));
    err.l2 = std::sqrt(std::max(0.0, l2));
    return err;
}

inline double energy_error(const Discretization& d, const Eigen::VectorXd& x, const ExactSolution& ex)
{
    return compute_errors(d, x, ex).energy;
}

inline double l2_error(const Discretization& d, const Eigen::VectorXd& x, const ExactSolution& ex)
{
    return compute_errors(d, x, ex).l2;
}

inline double linf_error(const Discretization& d, const Eigen::VectorXd& x, const ExactSolution& ex)
{
    return compute_errors(d, x, ex).linf;
}

/// Observed orders log2(e_{i-1} / e_i) for a ratio-2 refinement sequence.
inline std::vector<double> convergence_orders(const std::vector<double>& errors)
{
    for (double e : errors)
        if (!(e > 0.0))
            throw Error(ErrorKind::non_positive_error, "errors must be positive to take orders");
    std::vector<double> orders;
    for (std::size_t i = 1; i < errors.size(); ++i)
        orders.push_back(std::log2(errors[i - 1] / errors[i]));
    return orders;
}

struct InterpolationErrors {
    double grad_interp = 0.0; ///< ||grad(Pi_h u - u)|| over non-interface elements
    double l2_projection = 0.0; ///< ||Q_0 u - u|| over interface elements
};

/// Approximation power of the discrete spaces, independent of the solver.
inline InterpolationErrors interpolation_errors(const Discretization& d, const ExactSolution& ex)
{
    const auto& m = *d.mesh;
    const int k = d.options.k;
    double g2 = 0.0, q2 = 0.0;
    for (std::size_t t = 0; t < m.num_triangles(); ++t) {
        if (const auto* sp = d.space(t)) {
            const Eigen::VectorXd c = project_q0(*sp, ex.u);
            for (Side s : {Side::inside, Side::outside}) {
                const auto& rule = sp->volume.on(s);
                for (std::size_t q = 0; q < rule.size(); ++q) {
                    const double e = ex.u(rule.points[q], s) - sp->evaluate(c, rule.points[q], s);
                    q2 += rule.weights[q] * e * e;
                }
            }
            continue;
        }
        const Side side = m.element_class[t].side;
        const LagrangeTriangle el(m.triangle(t), k);
        Eigen::VectorXd nodal(el.size());
        for (int i = 0; i < el.size(); ++i)
            nodal[i] = ex.u(el.node(i), side);
        const auto rule = triangle_rule(m.triangle(t), d.options.error_degree());
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const Point gd =
                ex.grad(rule.points[q], side) - el.gradients(rule.points[q]).transpose() * nodal;
            g2 += rule.weights[q] * gd.squaredNorm();
        }
    }
    return {std::sqrt(g2), std::sqrt(q2)};
}

} // namespace iwg
