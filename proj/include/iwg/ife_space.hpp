#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <string>

#include <Eigen/Dense>

#include "iwg/geometry.hpp"
#include "iwg/polynomial.hpp"
#include "iwg/quadrature.hpp"

namespace iwg {

/// Where the value/flux/Laplacian jump conditions of the immersed space are imposed.
enum class JumpGeometry {
    chord, ///< pointwise on the straight segment DE with the fixed normal of DE
    arc,   ///< as moments along the true interface arc with the true normal
};

inline const char* to_string(JumpGeometry g) { return g == JumpGeometry::chord ? "chord" : "arc"; }

struct IfeOptions {
    int k = 1;
    double a1 = 1.0;
    double a2 = 1.0;
    int depth = 6;          ///< arc subdivision depth for cut-region quadrature
    int quad_degree = -1;   ///< volume/edge rule degree; < 0 selects 2k+4
    JumpGeometry jump = JumpGeometry::arc;
    double cond_max = 1e12; ///< Gram condition number above which a space is flagged
    bool weighted_gradient = true; ///< define grad_w in the A-weighted L2(T) inner product

    int degree() const { return quad_degree < 0 ? 2 * k + 4 : quad_degree; }
};

/// Number of jump constraints: k+1 value, k flux, and one Laplacian row for k = 2.
inline int constraint_count(int k) { return 2 * k + 1 + (k >= 2 ? 1 : 0); }

/// Local weak-function layout: m_k interior coefficients, then k traces per edge.
inline int local_wg_dofs(int k) { return poly_dim(k) + 3 * k; }

namespace detail {

struct ArcSample {
    Point point;
    Point normal;
    double weight;
    double s; ///< normalized arc parameter in [0,1]
};

inline std::vector<ArcSample> arc_samples(const ElementCut& cut, const LevelSetInterface& iface,
                                          int n)
{
    const Point c = iface.center();
    const Point& p = cut.d.point;
    const Point& q = cut.e.point;
    const double t0 = std::atan2(p.y() - c.y(), p.x() - c.x());
    const double t1 = std::atan2(q.y() - c.y(), q.x() - c.x());
    double span = t1 - t0;
    while (span > std::numbers::pi)
        span -= 2.0 * std::numbers::pi;
    while (span <= -std::numbers::pi)
        span += 2.0 * std::numbers::pi;
    if (!contains(cut.triangle, iface.at_angle(t0 + 0.5 * span), 1e-9))
        span -= std::copysign(2.0 * std::numbers::pi, span);
    const auto [x, w] = gauss_legendre(n);
    std::vector<ArcSample> out;
    out.reserve(n);
    const double len = std::abs(span) * iface.radius();
    for (int i = 0; i < n; ++i) {
        const Point pt = iface.at_angle(t0 + span * x[i]);
        out.push_back({pt, iface.normal(pt), w[i] * len, x[i]});
    }
    return out;
}

} // namespace detail

/// Rows of the homogeneous jump system acting on stacked coefficients [p1; p2].
/// Each row is scaled to unit Euclidean norm.
inline Eigen::MatrixXd build_constraint_system(const ElementCut& cut, const PolyBasis& basis,
                                               double a1, double a2, JumpGeometry geometry,
                                               const LevelSetInterface& iface)
{
    if (!(a1 > 0.0) || !(a2 > 0.0))
        throw Error(ErrorKind::invalid_config, "coefficients must be positive");
    const int k = basis.degree();
    const int m = basis.size();
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(constraint_count(k), 2 * m);
    int row = 0;

    if (geometry == JumpGeometry::chord) {
        const auto [x, w] = gauss_legendre(k + 1);
        for (int i = 0; i <= k; ++i) {
            const Point p = cut.d.point + x[i] * (cut.e.point - cut.d.point);
            const Eigen::VectorXd v = basis.values(p);
            c.block(row, 0, 1, m) = v.transpose();
            c.block(row, m, 1, m) = -v.transpose();
            ++row;
        }
        const auto [xf, wf] = gauss_legendre(k);
        for (int i = 0; i < k; ++i) {
            const Point p = cut.d.point + xf[i] * (cut.e.point - cut.d.point);
            const Eigen::VectorXd dn = basis.gradients(p) * cut.normal;
            c.block(row, 0, 1, m) = a1 * dn.transpose();
            c.block(row, m, 1, m) = -a2 * dn.transpose();
            ++row;
        }
    } else {
        const auto samples = detail::arc_samples(cut, iface, 2 * k + 8);
        for (int j = 0; j <= k; ++j) {
            for (const auto& s : samples) {
                const double q = s.weight * legendre(j, 2.0 * s.s - 1.0);
                const Eigen::VectorXd v = basis.values(s.point);
                c.block(row, 0, 1, m) += q * v.transpose();
                c.block(row, m, 1, m) -= q * v.transpose();
            }
            ++row;
        }
        for (int j = 0; j < k; ++j) {
            for (const auto& s : samples) {
                const double q = s.weight * legendre(j, 2.0 * s.s - 1.0);
                const Eigen::VectorXd dn = basis.gradients(s.point) * s.normal;
                c.block(row, 0, 1, m) += q * a1 * dn.transpose();
                c.block(row, m, 1, m) -= q * a2 * dn.transpose();
            }
            ++row;
        }
    }
    if (k >= 2) {
        const Eigen::VectorXd lap = basis.laplacians(cut.chord_midpoint());
        c.block(row, 0, 1, m) = a1 * lap.transpose();
        c.block(row, m, 1, m) = -a2 * lap.transpose();
        ++row;
    }
    for (int r = 0; r < c.rows(); ++r) {
        const double n = c.row(r).norm();
        if (n > 0.0)
            c.row(r) /= n;
    }
    return c;
}

/// Orthonormal basis of the null space of a constraint matrix; throws
/// RankDeficient unless its dimension is exactly `expected`.
inline Eigen::MatrixXd constraint_null_space(const Eigen::MatrixXd& c, int expected)
{
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(c, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double tol = 1e-10 * std::max(1.0, sv.size() ? sv[0] : 0.0);
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
        rank += sv[i] > tol ? 1 : 0;
    const int nullity = static_cast<int>(c.cols()) - rank;
    if (nullity != expected)
        throw Error(ErrorKind::rank_deficient, "constraint null space has dimension " +
                                                   std::to_string(nullity) + ", expected " +
                                                   std::to_string(expected));
    return svd.matrixV().rightCols(nullity);
}

/// Immersed space V_k(T) on one cut element together with the local weak
/// Galerkin operators built on it.
struct LocalIfeSpace {
    int element = -1;
    int k = 1;
    double a1 = 1.0, a2 = 1.0;
    double h = 0.0; ///< element diameter
    ElementCut cut;
    PolyBasis poly{1, Point::Zero(), 1.0};
    JumpGeometry jump = JumpGeometry::chord;
    bool weighted_gradient = true;

    /// Column i holds basis function i as stacked monomial coefficients [p1; p2].
    Eigen::MatrixXd coeffs;
    double constraint_residual = 0.0;
    double gram_condition = 1.0;
    bool ill_conditioned = false;

    SidedRule volume;
    std::array<SidedRule, 3> edge_rules;
    std::array<EdgeBasis, 3> edge_bases{EdgeBasis(Point::Zero(), Point::UnitX(), 1),
                                        EdgeBasis(Point::Zero(), Point::UnitX(), 1),
                                        EdgeBasis(Point::Zero(), Point::UnitX(), 1)};
    std::array<Point, 3> edge_normals; ///< outward unit normals of the local edges

    Eigen::MatrixXd mass;            ///< (phi_i, phi_j)_T, identity up to rounding
    Eigen::MatrixXd grad_gram;       ///< (grad phi_a, grad phi_b)_T, a,b >= 1
    Eigen::MatrixXd grad_gram_a;     ///< (A grad phi_a, grad phi_b)_T
    std::array<Eigen::MatrixXd, 3> trace_projection; ///< Q_b of interior basis, k x m
    Eigen::MatrixXd weak_gradient;   ///< (m-1) x (m+3k): local WG dofs -> grad V_k coefficients

    int dim() const { return static_cast<int>(coeffs.cols()); }
    int num_dofs() const { return dim() + 3 * k; }
    double coefficient(Side s) const { return s == Side::inside ? a1 : a2; }

    Eigen::VectorXd values(const Point& p, Side s) const
    {
        const int m = poly.size();
        return coeffs.middleRows(s == Side::inside ? 0 : m, m).transpose() * poly.values(p);
    }

    Eigen::MatrixX2d gradients(const Point& p, Side s) const
    {
        const int m = poly.size();
        return coeffs.middleRows(s == Side::inside ? 0 : m, m).transpose() * poly.gradients(p);
    }

    Eigen::VectorXd laplacians(const Point& p, Side s) const
    {
        const int m = poly.size();
        return coeffs.middleRows(s == Side::inside ? 0 : m, m).transpose() * poly.laplacians(p);
    }

    double evaluate(const Eigen::VectorXd& v0, const Point& p, Side s) const
    {
        return values(p, s).dot(v0);
    }

    Point evaluate_gradient(const Eigen::VectorXd& v0, const Point& p, Side s) const
    {
        return gradients(p, s).transpose() * v0;
    }

    /// Weak gradient of a local weak function, as a vector at point p.
    Point weak_gradient_at(const Eigen::VectorXd& local, const Point& p, Side s) const
    {
        const Eigen::VectorXd c = weak_gradient * local;
        return gradients(p, s).bottomRows(dim() - 1).transpose() * c;
    }

    /// Selection block S_e with S_e * local = Q_b v0 - v_b on local edge i.
    Eigen::MatrixXd stabilizer_block(int i) const
    {
        Eigen::MatrixXd s = Eigen::MatrixXd::Zero(k, num_dofs());
        s.leftCols(dim()) = trace_projection[i];
        s.block(0, dim() + i * k, k, k) = -Eigen::MatrixXd::Identity(k, k);
        return s;
    }
};

/// Orthonormalize the null-space basis in the piecewise L2(T) inner product,
/// with the normalized constant as the first member.
inline void construct_ife_basis(LocalIfeSpace& sp, const Eigen::MatrixXd& null_space,
                                const Eigen::MatrixXd& constraints, double cond_max = 1e12)
{
    const int m = sp.poly.size();
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(2 * m, 2 * m);
    for (Side s : {Side::inside, Side::outside}) {
        const auto& rule = sp.volume.on(s);
        const int off = s == Side::inside ? 0 : m;
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const Eigen::VectorXd b = sp.poly.values(rule.points[q]);
            gram.block(off, off, m, m) += rule.weights[q] * b * b.transpose();
        }
    }

    Eigen::VectorXd one = Eigen::VectorXd::Zero(2 * m);
    one[0] = one[m] = 1.0;
    one /= std::sqrt(one.dot(gram * one));

    Eigen::MatrixXd rest = null_space - one * (one.transpose() * gram * null_space);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(rest.transpose() * gram * rest);
    // eigenvalues ascending; the smallest belongs to the removed constant direction
    const Eigen::VectorXd lam = eig.eigenvalues();
    sp.coeffs.resize(2 * m, m);
    sp.coeffs.col(0) = one;
    for (int i = 1; i < m; ++i) {
        const int j = m - i; // largest first
        sp.coeffs.col(i) = rest * eig.eigenvectors().col(j) / std::sqrt(lam[j]);
    }

    const Eigen::MatrixXd gn = null_space.transpose() * gram * null_space;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> geig(gn, Eigen::EigenvaluesOnly);
    const double lo = geig.eigenvalues().minCoeff();
    sp.gram_condition = lo > 0.0 ? geig.eigenvalues().maxCoeff() / lo
                                 : std::numeric_limits<double>::infinity();
    sp.ill_conditioned = !(sp.gram_condition <= cond_max) || !(lam[1] > 0.0);
    sp.constraint_residual = (constraints * sp.coeffs).cwiseAbs().maxCoeff();
}

/// Build the immersed space and its weak Galerkin operators on one cut triangle.
/// `reversed[i]` flips the orientation of local edge i so that edge traces
/// follow the global edge orientation.
inline LocalIfeSpace build_local_space(const Triangle& tri, const LevelSetInterface& iface,
                                       const IfeOptions& opt, std::array<bool, 3> reversed = {},
                                       int element = -1)
{
    LocalIfeSpace sp;
    sp.element = element;
    sp.k = opt.k;
    sp.a1 = opt.a1;
    sp.a2 = opt.a2;
    sp.jump = opt.jump;
    sp.cut = compute_cut(tri, iface);
    sp.h = diameter(tri);
    sp.poly = PolyBasis(opt.k, centroid(tri), sp.h);
    const int k = opt.k;
    const int m = sp.poly.size();
    const int deg = opt.degree();

    sp.volume = quadrature_on_cut_element(sp.cut, deg, opt.depth, iface);
    for (int i = 0; i < 3; ++i) {
        const Point& a = tri[i];
        const Point& b = tri[(i + 1) % 3];
        sp.edge_rules[i] = quadrature_on_edge(a, b, deg, iface);
        sp.edge_bases[i] = reversed[i] ? EdgeBasis(b, a, k) : EdgeBasis(a, b, k);
        const Point t = (b - a).normalized();
        sp.edge_normals[i] = Point(t.y(), -t.x()); // outward for counterclockwise vertices
    }
    if (signed_area(tri[0], tri[1], tri[2]) < 0)
        for (auto& n : sp.edge_normals)
            n = -n;

    const Eigen::MatrixXd cons =
        build_constraint_system(sp.cut, sp.poly, opt.a1, opt.a2, opt.jump, iface);
    const Eigen::MatrixXd null = constraint_null_space(cons, m);
    construct_ife_basis(sp, null, cons, opt.cond_max);

    // mass and gradient Grams
    sp.mass = Eigen::MatrixXd::Zero(m, m);
    sp.grad_gram = Eigen::MatrixXd::Zero(m - 1, m - 1);
    sp.grad_gram_a = Eigen::MatrixXd::Zero(m - 1, m - 1);
    for (Side s : {Side::inside, Side::outside}) {
        const auto& rule = sp.volume.on(s);
        const double a = sp.coefficient(s);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const Eigen::VectorXd v = sp.values(rule.points[q], s);
            const Eigen::MatrixX2d g = sp.gradients(rule.points[q], s).bottomRows(m - 1);
            sp.mass += rule.weights[q] * v * v.transpose();
            const Eigen::MatrixXd gg = g * g.transpose();
            sp.grad_gram += rule.weights[q] * gg;
            sp.grad_gram_a += rule.weights[q] * a * gg;
        }
    }

    // Q_b of the interior basis and the boundary pairing <psi_j, q_a . n>_e
    const int nd = m + 3 * k;
    const Eigen::MatrixXd& lhs = opt.weighted_gradient ? sp.grad_gram_a : sp.grad_gram;
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(m - 1, nd);
    rhs.block(0, 1, m - 1, m - 1) = lhs;
    for (int i = 0; i < 3; ++i) {
        Eigen::MatrixXd proj = Eigen::MatrixXd::Zero(k, m);
        Eigen::MatrixXd pair = Eigen::MatrixXd::Zero(m - 1, k);
        for (Side s : {Side::inside, Side::outside}) {
            const auto& rule = sp.edge_rules[i].on(s);
            for (std::size_t q = 0; q < rule.size(); ++q) {
                const Point& p = rule.points[q];
                const Eigen::VectorXd psi = sp.edge_bases[i].values(p);
                proj += rule.weights[q] * psi * sp.values(p, s).transpose();
                const Eigen::VectorXd qn =
                    sp.gradients(p, s).bottomRows(m - 1) * sp.edge_normals[i];
                const double a = opt.weighted_gradient ? sp.coefficient(s) : 1.0;
                pair += rule.weights[q] * a * qn * psi.transpose();
            }
        }
        sp.trace_projection[i] = proj;
        rhs.leftCols(m) -= pair * proj;
        rhs.block(0, m + i * k, m - 1, k) += pair;
    }

    sp.weighted_gradient = opt.weighted_gradient;
    Eigen::LLT<Eigen::MatrixXd> llt(lhs);
    if (llt.info() != Eigen::Success)
        throw Error(ErrorKind::singular_gram, "gradient Gram matrix is not positive definite");
    sp.weak_gradient = llt.solve(rhs);
    return sp;
}

/// L2 projection onto V_k(T) of a piecewise function f(point, side).
inline Eigen::VectorXd project_q0(const LocalIfeSpace& sp,
                                  const std::function<double(const Point&, Side)>& f)
{
    Eigen::VectorXd b = Eigen::VectorXd::Zero(sp.dim());
    for (Side s : {Side::inside, Side::outside}) {
        const auto& rule = sp.volume.on(s);
        for (std::size_t q = 0; q < rule.size(); ++q)
            b += rule.weights[q] * f(rule.points[q], s) * sp.values(rule.points[q], s);
    }
    return sp.mass.llt().solve(b);
}

/// L2 projection onto P_{k-1}(e) in the orthonormal Legendre basis.
inline Eigen::VectorXd project_qb(const EdgeBasis& basis, const SidedRule& rule,
                                  const std::function<double(const Point&, Side)>& g)
{
    Eigen::VectorXd c = Eigen::VectorXd::Zero(basis.size());
    for (Side s : {Side::inside, Side::outside}) {
        const auto& r = rule.on(s);
        for (std::size_t q = 0; q < r.size(); ++q)
            c += r.weights[q] * g(r.points[q], s) * basis.values(r.points[q]);
    }
    return c;
}

inline Eigen::VectorXd project_qb(const EdgeBasis& basis, const QuadratureRule& rule,
                                  const std::function<double(const Point&)>& g)
{
    Eigen::VectorXd c = Eigen::VectorXd::Zero(basis.size());
    for (std::size_t q = 0; q < rule.size(); ++q)
        c += rule.weights[q] * g(rule.points[q]) * basis.values(rule.points[q]);
    return c;
}

/// Local stiffness of the weak Galerkin form on a cut element:
/// (A grad_w u, grad_w v)_T + h_T^{-1} <Q_b u0 - u_b, Q_b v0 - v_b>_{dT}.
inline Eigen::MatrixXd interface_stiffness(const LocalIfeSpace& sp)
{
    Eigen::MatrixXd k = sp.weak_gradient.transpose() * sp.grad_gram_a * sp.weak_gradient;
    for (int i = 0; i < 3; ++i) {
        const Eigen::MatrixXd s = sp.stabilizer_block(i);
        k += (1.0 / sp.h) * s.transpose() * s;
    }
    return 0.5 * (k + k.transpose());
}

/// Energy-norm contribution ||grad_w v||_T^2 + h_T^{-1} ||Q_b v0 - v_b||_{dT}^2.
inline double local_energy(const LocalIfeSpace& sp, const Eigen::VectorXd& local)
{
    const Eigen::VectorXd c = sp.weak_gradient * local;
    double e = c.dot(sp.grad_gram * c);
    for (int i = 0; i < 3; ++i)
        e += (sp.stabilizer_block(i) * local).squaredNorm() / sp.h;
    return e;
}

} // namespace iwg
