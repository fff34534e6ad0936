#pragma once

#include <functional>
#include <optional>
#include <ostream>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "iwg/ife_space.hpp"
#include "iwg/lagrange.hpp"
#include "iwg/mesh.hpp"

namespace iwg {

using ScalarField = std::function<double(const Point&, Side)>;
using VectorField = std::function<Point(const Point&, Side)>;

/// Data of -div(A grad u) = f with u = g on the boundary; A piecewise constant.
struct ProblemData {
    double a1 = 1.0;
    double a2 = 1.0;
    ScalarField f;
    ScalarField g; ///< evaluated on the boundary with the side of the boundary point

    double coefficient(Side s) const { return s == Side::inside ? a1 : a2; }
};

struct DiscretizationOptions {
    int k = 1;
    int depth = 6;       ///< arc subdivision depth on cut elements
    int quad_offset = 0; ///< added to every quadrature degree
    JumpGeometry jump = JumpGeometry::arc;

    int stiffness_degree() const { return 2 * k + quad_offset; }
    int load_degree() const { return 2 * k + 2 + quad_offset; }
    int error_degree() const { return 2 * k + 4 + quad_offset; }
};

/// Local dofs of one element written as T * x[globals] + lift.
struct ElementMap {
    std::vector<int> globals;
    Eigen::MatrixXd t;
    Eigen::VectorXd lift;

    Eigen::VectorXd expand(const Eigen::VectorXd& x) const
    {
        Eigen::VectorXd loc = lift;
        for (std::size_t c = 0; c < globals.size(); ++c)
            loc += t.col(static_cast<Eigen::Index>(c)) * x[globals[c]];
        return loc;
    }
};

/// Ownership and numbering of global unknowns.
struct DofMap {
    static constexpr int inactive = -1;
    static constexpr int pinned = -2;

    int k = 1;
    int num_free = 0;
    int num_cg_free = 0;
    int num_wg_interior = 0;
    int num_wg_trace = 0;

    std::vector<int> cg_index;     ///< per CG node: free index, inactive or pinned
    std::vector<double> cg_value;  ///< Dirichlet value of pinned CG nodes
    std::vector<int> interior_offset; ///< per triangle: first interior dof, or -1
    std::vector<int> trace_offset;    ///< per edge: first free trace dof, or -1
    std::vector<Eigen::VectorXd> trace_value; ///< per boundary edge of interface elements: Q_b g
    std::vector<Eigen::MatrixXd> coupling;    ///< per coupling edge: Q_b of the CG edge trace

    /// CG node ids along a global edge (a, b[, midpoint]).
    std::vector<int> edge_nodes(const MeshPartition& m, int e) const
    {
        std::vector<int> n{m.edges[e].vertices[0], m.edges[e].vertices[1]};
        if (k == 2)
            n.push_back(static_cast<int>(m.vertices.size()) + e);
        return n;
    }
};

/// CG node ids of a triangle in LagrangeTriangle local order.
inline std::vector<int> element_nodes(const MeshPartition& m, std::size_t t, int k)
{
    std::vector<int> n{m.triangles[t][0], m.triangles[t][1], m.triangles[t][2]};
    if (k == 2)
        for (int i = 0; i < 3; ++i)
            n.push_back(static_cast<int>(m.vertices.size()) + m.triangle_edges[t][i]);
    return n;
}

inline Point cg_node_point(const MeshPartition& m, int node)
{
    const int nv = static_cast<int>(m.vertices.size());
    if (node < nv)
        return m.vertices[node];
    const auto& e = m.edges[node - nv];
    return 0.5 * (m.vertices[e.vertices[0]] + m.vertices[e.vertices[1]]);
}

/// Q_b of the P_k Lagrange edge trace: k x (k+1) block in the orthonormal
/// Legendre basis of the globally oriented edge.
inline Eigen::MatrixXd coupling_block(const Point& a, const Point& b, int k)
{
    const EdgeBasis basis(a, b, k);
    const auto rule = quadrature_on_edge(a, b, 2 * k);
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(k, k + 1);
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const double s = basis.parameter(rule.points[q]);
        c += rule.weights[q] * basis.values(rule.points[q]) * edge_lagrange(k, s).transpose();
    }
    return c;
}

/// Everything needed to assemble, solve and post-process one configuration.
struct Discretization {
    const MeshPartition* mesh = nullptr;
    std::optional<LevelSetInterface> iface;
    DiscretizationOptions options;
    ProblemData problem;
    std::vector<LocalIfeSpace> spaces;
    std::vector<int> space_of; ///< triangle -> index in spaces, or -1
    DofMap dofs;
    std::vector<ElementMap> maps;

    Side side_of(const Point& p) const { return iface ? iface->side_of(p) : Side::inside; }
    const LocalIfeSpace* space(std::size_t t) const
    {
        return space_of[t] < 0 ? nullptr : &spaces[space_of[t]];
    }
};

inline IfeOptions ife_options(const DiscretizationOptions& o, const ProblemData& p)
{
    IfeOptions io;
    io.k = o.k;
    io.a1 = p.a1;
    io.a2 = p.a2;
    io.depth = o.depth;
    io.quad_degree = o.error_degree();
    io.jump = o.jump;
    return io;
}

/// Build immersed spaces on every interface element.
inline void build_spaces(Discretization& d)
{
    const auto& m = *d.mesh;
    d.space_of.assign(m.num_triangles(), -1);
    d.spaces.clear();
    if (!d.iface)
        return;
    const IfeOptions io = ife_options(d.options, d.problem);
    for (std::size_t t = 0; t < m.num_triangles(); ++t) {
        if (!m.is_interface(t))
            continue;
        std::array<bool, 3> rev{};
        for (int i = 0; i < 3; ++i)
            rev[i] = m.edge_reversed(t, i);
        d.space_of[t] = static_cast<int>(d.spaces.size());
        d.spaces.push_back(build_local_space(m.triangle(t), *d.iface, io, rev, static_cast<int>(t)));
    }
}

inline void build_dof_map(Discretization& d)
{
    const auto& m = *d.mesh;
    const int k = d.options.k;
    DofMap& dm = d.dofs;
    dm = DofMap{};
    dm.k = k;
    const int nv = static_cast<int>(m.vertices.size());
    const int nnodes = nv + (k == 2 ? static_cast<int>(m.edges.size()) : 0);
    dm.cg_index.assign(nnodes, DofMap::inactive);
    dm.cg_value.assign(nnodes, 0.0);

    for (std::size_t t = 0; t < m.num_triangles(); ++t) {
        if (m.is_interface(t))
            continue;
        for (int n : element_nodes(m, t, k))
            dm.cg_index[n] = 0;
    }
    // boundary CG nodes are pinned to g; Dirichlet wins over any other role
    for (std::size_t e = 0; e < m.edges.size(); ++e) {
        if (m.edge_class[e] != EdgeClass::boundary)
            continue;
        for (int n : dm.edge_nodes(m, static_cast<int>(e))) {
            if (dm.cg_index[n] == DofMap::inactive)
                continue;
            const Point p = cg_node_point(m, n);
            dm.cg_index[n] = DofMap::pinned;
            dm.cg_value[n] = d.problem.g(p, d.side_of(p));
        }
    }
    int next = 0;
    for (int n = 0; n < nnodes; ++n)
        if (dm.cg_index[n] == 0)
            dm.cg_index[n] = next++;
    dm.num_cg_free = next;

    dm.interior_offset.assign(m.num_triangles(), -1);
    const int mk = poly_dim(k);
    for (std::size_t t = 0; t < m.num_triangles(); ++t) {
        if (!m.is_interface(t))
            continue;
        dm.interior_offset[t] = next;
        next += mk;
    }
    dm.num_wg_interior = next - dm.num_cg_free;

    dm.trace_offset.assign(m.edges.size(), -1);
    dm.trace_value.assign(m.edges.size(), Eigen::VectorXd());
    dm.coupling.assign(m.edges.size(), Eigen::MatrixXd());
    const int before_traces = next;
    for (std::size_t e = 0; e < m.edges.size(); ++e) {
        const auto& ed = m.edges[e];
        const Point& a = m.vertices[ed.vertices[0]];
        const Point& b = m.vertices[ed.vertices[1]];
        switch (m.edge_class[e]) {
        case EdgeClass::wg_interior:
            dm.trace_offset[e] = next;
            next += k;
            break;
        case EdgeClass::coupling:
            dm.coupling[e] = coupling_block(a, b, k);
            break;
        case EdgeClass::boundary:
            if (m.is_interface(ed.triangles[0])) {
                const EdgeBasis basis(a, b, k);
                const ScalarField& g = d.problem.g;
                if (d.iface)
                    dm.trace_value[e] = project_qb(
                        basis, quadrature_on_edge(a, b, d.options.error_degree(), *d.iface), g);
                else
                    dm.trace_value[e] = project_qb(
                        basis, quadrature_on_edge(a, b, d.options.error_degree()),
                        [&](const Point& p) { return g(p, Side::inside); });
            }
            break;
        case EdgeClass::interior_non_wg:
            break;
        }
    }
    dm.num_wg_trace = next - before_traces;
    dm.num_free = next;
}

/// Local maps realizing V_h: slaved coupling traces are folded into CG node
/// values and Dirichlet data goes to the lift.
inline void build_element_maps(Discretization& d)
{
    const auto& m = *d.mesh;
    const int k = d.options.k;
    const DofMap& dm = d.dofs;
    d.maps.assign(m.num_triangles(), ElementMap{});

    for (std::size_t t = 0; t < m.num_triangles(); ++t) {
        ElementMap& em = d.maps[t];
        std::vector<std::pair<int, Eigen::VectorXd>> cols; // (global, column)
        auto column_for = [&](int g, int n) -> Eigen::VectorXd& {
            for (auto& c : cols)
                if (c.first == g)
                    return c.second;
            cols.emplace_back(g, Eigen::VectorXd::Zero(n));
            return cols.back().second;
        };

        if (!m.is_interface(t)) {
            const auto nodes = element_nodes(m, t, k);
            const int n = static_cast<int>(nodes.size());
            em.lift = Eigen::VectorXd::Zero(n);
            for (int i = 0; i < n; ++i) {
                const int gi = dm.cg_index[nodes[i]];
                if (gi >= 0)
                    column_for(gi, n)[i] = 1.0;
                else
                    em.lift[i] = dm.cg_value[nodes[i]];
            }
        } else {
            const int mk = poly_dim(k);
            const int n = mk + 3 * k;
            em.lift = Eigen::VectorXd::Zero(n);
            for (int i = 0; i < mk; ++i)
                column_for(dm.interior_offset[t] + i, n)[i] = 1.0;
            for (int le = 0; le < 3; ++le) {
                const int e = m.triangle_edges[t][le];
                const int row0 = mk + le * k;
                switch (m.edge_class[e]) {
                case EdgeClass::wg_interior:
                    for (int j = 0; j < k; ++j)
                        column_for(dm.trace_offset[e] + j, n)[row0 + j] = 1.0;
                    break;
                case EdgeClass::boundary:
                    em.lift.segment(row0, k) = dm.trace_value[e];
                    break;
                case EdgeClass::coupling: {
                    const auto nodes = dm.edge_nodes(m, e);
                    for (std::size_t c = 0; c < nodes.size(); ++c) {
                        const Eigen::VectorXd blk = dm.coupling[e].col(static_cast<Eigen::Index>(c));
                        const int gi = dm.cg_index[nodes[c]];
                        if (gi >= 0)
                            column_for(gi, n).segment(row0, k) += blk;
                        else if (gi == DofMap::pinned)
                            em.lift.segment(row0, k) += blk * dm.cg_value[nodes[c]];
                        else
                            throw Error(ErrorKind::inconsistent_constraint,
                                        "coupling edge node without a CG owner");
                    }
                    break;
                }
                case EdgeClass::interior_non_wg:
                    throw Error(ErrorKind::inconsistent_constraint,
                                "interface element adjacent to a non-WG edge");
                }
            }
        }
        em.t.resize(em.lift.size(), static_cast<Eigen::Index>(cols.size()));
        em.globals.clear();
        for (std::size_t c = 0; c < cols.size(); ++c) {
            em.globals.push_back(cols[c].first);
            em.t.col(static_cast<Eigen::Index>(c)) = cols[c].second;
        }
    }
}

/// Local stiffness and load of the P_k Galerkin form on a non-interface element.
inline std::pair<Eigen::MatrixXd, Eigen::VectorXd>
assemble_noninterface(const Triangle& tri, int k, double a, const std::function<double(const Point&)>& f,
                      int stiffness_degree, int load_degree)
{
    const LagrangeTriangle el(tri, k);
    const int n = el.size();
    Eigen::MatrixXd kl = Eigen::MatrixXd::Zero(n, n);
    const auto rs = triangle_rule(tri, std::max(0, stiffness_degree));
    for (std::size_t q = 0; q < rs.size(); ++q) {
        const Eigen::MatrixX2d g = el.gradients(rs.points[q]);
        kl += rs.weights[q] * a * g * g.transpose();
    }
    Eigen::VectorXd fl = Eigen::VectorXd::Zero(n);
    if (f) {
        const auto r = triangle_rule(tri, load_degree);
        for (std::size_t q = 0; q < r.size(); ++q)
            fl += r.weights[q] * f(r.points[q]) * el.values(r.points[q]);
    }
    return {kl, fl};
}

/// Local weak Galerkin block and load (tested against the interior basis only).
inline std::pair<Eigen::MatrixXd, Eigen::VectorXd> assemble_interface(const LocalIfeSpace& sp,
                                                                      const ScalarField& f)
{
    Eigen::MatrixXd kl = interface_stiffness(sp);
    Eigen::VectorXd fl = Eigen::VectorXd::Zero(sp.num_dofs());
    if (f) {
        for (Side s : {Side::inside, Side::outside}) {
            const auto& rule = sp.volume.on(s);
            for (std::size_t q = 0; q < rule.size(); ++q)
                fl.head(sp.dim()) += rule.weights[q] * f(rule.points[q], s) *
                                     sp.values(rule.points[q], s);
        }
    }
    return {kl, fl};
}

/// Reduced symmetric system over the free dofs.
struct GlobalSystem {
    Eigen::SparseMatrix<double> matrix;
    Eigen::VectorXd rhs;  ///< load minus lift contribution
    Eigen::VectorXd lift; ///< K_{free,pinned} * pinned values, folded into rhs
};

/// Congruence transform of one element block into the global triplet list.
inline void apply_constraints(const ElementMap& em, const Eigen::MatrixXd& kl,
                              const Eigen::VectorXd& fl, std::vector<Eigen::Triplet<double>>& trip,
                              Eigen::VectorXd& rhs, Eigen::VectorXd& lift)
{
    const Eigen::MatrixXd kt = em.t.transpose() * kl * em.t;
    const Eigen::VectorXd ft = em.t.transpose() * fl;
    const Eigen::VectorXd lt = em.t.transpose() * (kl * em.lift);
    for (std::size_t i = 0; i < em.globals.size(); ++i) {
        rhs[em.globals[i]] += ft[static_cast<Eigen::Index>(i)] - lt[static_cast<Eigen::Index>(i)];
        lift[em.globals[i]] += lt[static_cast<Eigen::Index>(i)];
        for (std::size_t j = 0; j < em.globals.size(); ++j)
            trip.emplace_back(em.globals[i], em.globals[j],
                              kt(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    }
}

/// Element block in local dofs (Lagrange nodes or WG layout) and its load.
inline std::pair<Eigen::MatrixXd, Eigen::VectorXd> element_block(const Discretization& d,
                                                                 std::size_t t)
{
    const auto& m = *d.mesh;
    if (const auto* sp = d.space(t))
        return assemble_interface(*sp, d.problem.f);
    const Side side = m.element_class[t].side;
    const ScalarField& f = d.problem.f;
    std::function<double(const Point&)> fs;
    if (f)
        fs = [&f, side](const Point& p) { return f(p, side); };
    return assemble_noninterface(m.triangle(t), d.options.k, d.problem.coefficient(side), fs,
                                 d.options.stiffness_degree(), d.options.load_degree());
}

inline GlobalSystem assemble(const Discretization& d)
{
    const int n = d.dofs.num_free;
    GlobalSystem sys;
    sys.rhs = Eigen::VectorXd::Zero(n);
    sys.lift = Eigen::VectorXd::Zero(n);
    std::vector<Eigen::Triplet<double>> trip;
    for (std::size_t t = 0; t < d.mesh->num_triangles(); ++t) {
        const auto [kl, fl] = element_block(d, t);
        apply_constraints(d.maps[t], kl, fl, trip, sys.rhs, sys.lift);
    }
    sys.matrix.resize(n, n);
    sys.matrix.setFromTriplets(trip.begin(), trip.end());
    return sys;
}

/// Build spaces, dof map and element maps for a mesh and problem.
inline Discretization discretize(const MeshPartition& mesh,
                                 const std::optional<LevelSetInterface>& iface,
                                 const ProblemData& problem, const DiscretizationOptions& opt)
{
    if (opt.k != 1 && opt.k != 2)
        throw Error(ErrorKind::invalid_config, "polynomial degree k must be 1 or 2");
    Discretization d;
    d.mesh = &mesh;
    d.iface = iface;
    d.options = opt;
    d.problem = problem;
    build_spaces(d);
    build_dof_map(d);
    build_element_maps(d);
    return d;
}

/// Coordinate-format dump: one `row col value` line per stored entry (0-based).
inline void write_matrix(std::ostream& os, const Eigen::SparseMatrix<double>& a)
{
    os.precision(17);
    os << "% " << a.rows() << ' ' << a.cols() << ' ' << a.nonZeros() << '\n';
    for (int c = 0; c < a.outerSize(); ++c)
        for (Eigen::SparseMatrix<double>::InnerIterator it(a, c); it; ++it)
            os << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
}

} // namespace iwg
