#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "iwg/analysis.hpp"
#include "iwg/solver.hpp"

using namespace iwg;

namespace {

const LevelSetInterface kCircle = ManufacturedSolution::interface();

/// Free vector holding the projections of u: nodal values, Q_0 u and Q_b u.
Eigen::VectorXd projected_solution(const Discretization& d, const ScalarField& u)
{
    const auto& m = *d.mesh;
    const int k = d.options.k;
    Eigen::VectorXd x = Eigen::VectorXd::Zero(d.dofs.num_free);
    for (std::size_t n = 0; n < d.dofs.cg_index.size(); ++n)
        if (d.dofs.cg_index[n] >= 0) {
            const Point p = cg_node_point(m, static_cast<int>(n));
            x[d.dofs.cg_index[n]] = u(p, d.side_of(p));
        }
    for (std::size_t t = 0; t < m.num_triangles(); ++t)
        if (const auto* sp = d.space(t))
            x.segment(d.dofs.interior_offset[t], sp->dim()) = project_q0(*sp, u);
    for (std::size_t e = 0; e < m.edges.size(); ++e) {
        if (d.dofs.trace_offset[e] < 0)
            continue;
        const Point a = m.vertices[m.edges[e].vertices[0]];
        const Point b = m.vertices[m.edges[e].vertices[1]];
        const auto rule = quadrature_on_edge(a, b, 2 * k + 4, kCircle);
        x.segment(d.dofs.trace_offset[e], k) = project_qb(EdgeBasis(a, b, k), rule, u);
    }
    return x;
}

} // namespace

TEST(Orders, Examples)
{
    const auto a = convergence_orders({0.2, 0.1});
    ASSERT_EQ(a.size(), 1u);
    EXPECT_NEAR(a[0], 1.0, 1e-15);
    // five-digit inputs carry about 1e-4 of rounding into the order
    EXPECT_NEAR(convergence_orders({3.0795e-2, 7.6231e-3})[0], 2.0142, 2e-4);
    EXPECT_NEAR(convergence_orders({2.2370, 1.1168})[0], 1.0021, 2e-4);
    EXPECT_TRUE(convergence_orders({1.0}).empty());
}

TEST(Orders, NonPositiveErrorIsRejected)
{
    for (const std::vector<double>& bad : {std::vector<double>{1.0, 0.0}, {-1.0, 0.5}, {1.0, NAN}}) {
        try {
            convergence_orders(bad);
            FAIL() << "expected NonPositiveError";
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::non_positive_error);
        }
    }
}

class ManufacturedTest : public ::testing::TestWithParam<double> {};

TEST_P(ManufacturedTest, InterfaceConditionsHold)
{
    const ManufacturedSolution ms{1.0, GetParam()};
    for (int i = 0; i < 64; ++i) {
        const Point p = kCircle.at_angle(2.0 * std::numbers::pi * i / 64.0);
        const Point n = kCircle.normal(p);
        EXPECT_NEAR(ms.u(p, Side::inside), ms.u(p, Side::outside), 1e-12);
        EXPECT_NEAR(ms.a1 * ms.grad(p, Side::inside).dot(n), ms.a2 * ms.grad(p, Side::outside).dot(n),
                    1e-12);
    }
}

TEST_P(ManufacturedTest, SourceMatchesFiniteDifferences)
{
    const ManufacturedSolution ms{1.0, GetParam()};
    // fourth-order stencils with a wide step; the additive constant outside makes
    // a narrow second-order stencil roundoff-bound for large coefficients
    const double d = 2e-3;
    for (const Point& p : {Point(0.1, 0.2), Point(-0.3, 0.1), Point(0.7, -0.4), Point(-0.8, 0.9)}) {
        const Side s = kCircle.side_of(p);
        auto u = [&](const Point& q) { return ms.coefficient(s) * ms.u(q, s); };
        auto second = [&](const Point& dir) {
            return (-u(p + 2 * d * dir) + 16 * u(p + d * dir) - 30 * u(p) + 16 * u(p - d * dir) -
                    u(p - 2 * d * dir)) /
                   (12 * d * d);
        };
        auto first = [&](const Point& dir) {
            return (-u(p + 2 * d * dir) + 8 * u(p + d * dir) - 8 * u(p - d * dir) + u(p - 2 * d * dir)) /
                   (12 * d);
        };
        const double lap = second(Point(1, 0)) + second(Point(0, 1));
        EXPECT_NEAR(-lap, ms.f(p), 1e-6 * std::max(1.0, std::abs(ms.f(p))));
        const Point g(first(Point(1, 0)), first(Point(0, 1)));
        EXPECT_LT((g - ms.coefficient(s) * ms.grad(p, s)).norm(), 1e-6);
    }
}

INSTANTIATE_TEST_SUITE_P(Coefficients, ManufacturedTest, ::testing::Values(1.0, 10.0, 1000.0));

TEST(Errors, ProjectionOfAMemberOfTheSpaceHasZeroError)
{
    // a linear function with equal coefficients lies in V_h
    ProblemData pd;
    pd.f = [](const Point&, Side) { return 0.0; };
    pd.g = [](const Point& p, Side) { return 0.5 - p.x() + 0.25 * p.y(); };
    const ExactSolution ex{pd.g, [](const Point&, Side) { return Point(-1.0, 0.25); }};
    for (int k : {1, 2}) {
        const auto mesh = build_mesh(2, kCircle);
        DiscretizationOptions o;
        o.k = k;
        const auto d = discretize(mesh, kCircle, pd, o);
        const auto e = compute_errors(d, projected_solution(d, pd.g), ex);
        EXPECT_LT(e.energy, 1e-12);
        EXPECT_LT(e.l2, 1e-12);
        EXPECT_LT(e.linf, 1e-12);
    }
}

TEST(Errors, ProjectionGivesZeroErrorOnInterfaceElements)
{
    // for the curved benchmark the only error of the projected vector sits on non-interface elements
    const ManufacturedSolution ms{1.0, 10.0};
    const auto mesh = build_mesh(3, kCircle);
    const auto d = discretize(mesh, kCircle, ms.problem(), {});
    const Eigen::VectorXd x = projected_solution(d, ms.exact().u);
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
        const auto* sp = d.space(t);
        if (!sp)
            continue;
        const Eigen::VectorXd diff = local_projection(*sp, ms.exact().u) - d.maps[t].expand(x);
        const Eigen::VectorXd traces = diff.tail(3 * sp->k);
        // coupling traces are Q_b of the CG interpolant, not of u
        EXPECT_LT(diff.head(sp->dim()).norm(), 1e-12);
        EXPECT_LT(traces.norm(), 0.05);
    }
}

TEST(Errors, EachColumnDecreasesUnderRefinement)
{
    const ManufacturedSolution ms{1.0, 10.0};
    ErrorNorms prev;
    for (int level = 2; level <= 5; ++level) {
        const auto mesh = build_mesh(level, kCircle);
        const auto d = discretize(mesh, kCircle, ms.problem(), {});
        const auto sys = assemble(d);
        const auto e = compute_errors(d, solve(sys.matrix, sys.rhs).x, ms.exact());
        if (level > 2) {
            EXPECT_LT(e.energy, prev.energy) << "level " << level;
            EXPECT_LT(e.l2, prev.l2) << "level " << level;
            EXPECT_LT(e.linf, prev.linf) << "level " << level;
        }
        prev = e;
    }
}

class InterpolationTest : public ::testing::TestWithParam<int> {};

TEST_P(InterpolationTest, ApproximationOrders)
{
    const int k = GetParam();
    const ManufacturedSolution ms{1.0, 10.0};
    std::vector<double> grad, l2;
    for (int level = 3; level <= 5; ++level) {
        const auto mesh = build_mesh(level, kCircle);
        DiscretizationOptions o;
        o.k = k;
        const auto d = discretize(mesh, kCircle, ms.problem(), o);
        const auto ie = interpolation_errors(d, ms.exact());
        grad.push_back(ie.grad_interp);
        l2.push_back(ie.l2_projection);
    }
    // the band holds O(1/h) elements of area h^2, so Q_0 gains half an order in the global norm
    EXPECT_NEAR(convergence_orders(grad).back(), k, 0.15);
    EXPECT_NEAR(convergence_orders(l2).back(), k + 1.5, 0.25);
}

INSTANTIATE_TEST_SUITE_P(Degrees, InterpolationTest, ::testing::Values(1, 2));

TEST(Interpolation, EqualCoefficientsMatchPlainNodalInterpolation)
{
    // without an interface every element uses the nodal interpolant
    const ManufacturedSolution ms{1.0, 1.0};
    const auto mesh = build_mesh(3, std::nullopt);
    const auto d = discretize(mesh, std::nullopt, ms.problem(), {});
    const auto ie = interpolation_errors(d, ms.exact());
    double g2 = 0.0;
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
        const auto tri = mesh.triangle(t);
        // P1 interpolant gradient from the three vertex values
        const Point e1 = tri[1] - tri[0], e2 = tri[2] - tri[0];
        Eigen::Matrix2d j;
        j << e1.x(), e1.y(), e2.x(), e2.y();
        const Eigen::Vector2d du(ms.u(tri[1], Side::inside) - ms.u(tri[0], Side::inside),
                                 ms.u(tri[2], Side::inside) - ms.u(tri[0], Side::inside));
        const Point gi = j.inverse() * du;
        const auto rule = triangle_rule(tri, d.options.error_degree());
        for (std::size_t q = 0; q < rule.size(); ++q)
            g2 += rule.weights[q] * (ms.grad(rule.points[q], Side::inside) - gi).squaredNorm();
    }
    EXPECT_NEAR(ie.grad_interp, std::sqrt(g2), 1e-8 * std::sqrt(g2));
    EXPECT_EQ(ie.l2_projection, 0.0);
}
