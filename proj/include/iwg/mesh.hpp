#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <vector>

#include "iwg/geometry.hpp"

namespace iwg {

enum class EdgeClass {
    interior_non_wg, ///< both neighbors non-interface
    wg_interior,     ///< both neighbors interface elements
    coupling,        ///< one interface and one non-interface neighbor
    boundary,        ///< on the domain boundary
};

inline const char* to_string(EdgeClass c)
{
    switch (c) {
    case EdgeClass::interior_non_wg: return "InteriorNonWG";
    case EdgeClass::wg_interior: return "WGInterior";
    case EdgeClass::coupling: return "CouplingEdge";
    case EdgeClass::boundary: return "BoundaryEdge";
    }
    return "?";
}

struct MeshEdge {
    std::array<int, 2> vertices{}; ///< ascending; fixes the global edge orientation
    std::array<int, 2> triangles{-1, -1};

    bool on_boundary() const { return triangles[1] < 0; }
};

/// Uniform triangulation of [-1,1]^2 classified against an interface.
struct MeshPartition {
    int level = 1;
    int intervals = 4; ///< squares per side
    std::vector<Point> vertices;
    std::vector<std::array<int, 3>> triangles;      ///< counterclockwise vertex ids
    std::vector<std::array<int, 3>> triangle_edges; ///< local edge i = (v_i, v_{i+1})
    std::vector<MeshEdge> edges;
    std::vector<ElementClass> element_class;
    std::vector<EdgeClass> edge_class;
    std::vector<double> diameters;
    double h = 0.0;

    std::size_t num_triangles() const { return triangles.size(); }

    Triangle triangle(std::size_t t) const
    {
        const auto& v = triangles[t];
        return {vertices[v[0]], vertices[v[1]], vertices[v[2]]};
    }

    bool is_interface(std::size_t t) const { return element_class[t].interface; }

    /// True if local edge i of triangle t runs against the global edge orientation.
    bool edge_reversed(std::size_t t, int i) const
    {
        return triangles[t][i] != edges[triangle_edges[t][i]].vertices[0];
    }

    bool vertex_on_boundary(int v) const
    {
        const Point& p = vertices[v];
        return std::abs(std::abs(p.x()) - 1.0) < 1e-14 || std::abs(std::abs(p.y()) - 1.0) < 1e-14;
    }
};

/// Squares per side at a refinement level: coarse_intervals * 2^(level-1).
inline int intervals_at_level(int level, int coarse_intervals = 4)
{
    return coarse_intervals << (level - 1);
}

/// Build the level-`level` mesh. Without an interface every element is
/// non-interface (Omega_1).
inline MeshPartition build_mesh(int level, const std::optional<LevelSetInterface>& iface,
                                int coarse_intervals = 4)
{
    if (level < 1)
        throw Error(ErrorKind::invalid_config, "mesh level must be >= 1");
    if (coarse_intervals < 1)
        throw Error(ErrorKind::invalid_config, "coarse interval count must be >= 1");
    MeshPartition m;
    m.level = level;
    const int n = intervals_at_level(level, coarse_intervals);
    m.intervals = n;
    const double step = 2.0 / n;
    m.vertices.reserve((n + 1) * (n + 1));
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i)
            m.vertices.emplace_back(-1.0 + i * step, -1.0 + j * step);

    auto vid = [n](int i, int j) { return j * (n + 1) + i; };
    m.triangles.reserve(2 * n * n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const int v00 = vid(i, j), v10 = vid(i + 1, j);
            const int v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
            m.triangles.push_back({v00, v10, v11});
            m.triangles.push_back({v00, v11, v01});
        }
    }

    std::map<std::pair<int, int>, int> lookup;
    m.triangle_edges.resize(m.triangles.size());
    for (std::size_t t = 0; t < m.triangles.size(); ++t) {
        for (int i = 0; i < 3; ++i) {
            const int a = m.triangles[t][i];
            const int b = m.triangles[t][(i + 1) % 3];
            const auto key = std::minmax(a, b);
            auto [it, fresh] = lookup.try_emplace({key.first, key.second},
                                                  static_cast<int>(m.edges.size()));
            if (fresh) {
                MeshEdge e;
                e.vertices = {key.first, key.second};
                e.triangles = {static_cast<int>(t), -1};
                m.edges.push_back(e);
            } else {
                m.edges[it->second].triangles[1] = static_cast<int>(t);
            }
            m.triangle_edges[t][i] = it->second;
        }
    }

    m.diameters.resize(m.triangles.size());
    m.element_class.resize(m.triangles.size());
    for (std::size_t t = 0; t < m.triangles.size(); ++t) {
        const auto tri = m.triangle(t);
        m.diameters[t] = diameter(tri);
        m.h = std::max(m.h, m.diameters[t]);
        m.element_class[t] =
            iface ? classify_element(tri, *iface) : ElementClass::non_interface(Side::inside);
        if (iface && m.element_class[t].interface)
            compute_cut(tri, *iface); // surfaces MultipleCrossings at build time
    }

    m.edge_class.resize(m.edges.size());
    for (std::size_t e = 0; e < m.edges.size(); ++e) {
        const auto& ed = m.edges[e];
        if (ed.on_boundary()) {
            m.edge_class[e] = EdgeClass::boundary;
            continue;
        }
        const bool i0 = m.is_interface(ed.triangles[0]);
        const bool i1 = m.is_interface(ed.triangles[1]);
        if (i0 && i1)
            m.edge_class[e] = EdgeClass::wg_interior;
        else if (i0 || i1)
            m.edge_class[e] = EdgeClass::coupling;
        else
            m.edge_class[e] = EdgeClass::interior_non_wg;
    }
    return m;
}

struct EdgeSets {
    std::vector<int> interface_edges; ///< all edges of interface elements
    std::vector<int> coupling_edges;  ///< interface / non-interface boundary
    std::vector<int> boundary_edges;
};

inline EdgeSets edge_sets(const MeshPartition& m)
{
    EdgeSets s;
    for (std::size_t e = 0; e < m.edges.size(); ++e) {
        const auto& ed = m.edges[e];
        bool touches_interface = false;
        for (int t : ed.triangles)
            touches_interface |= t >= 0 && m.is_interface(t);
        if (touches_interface)
            s.interface_edges.push_back(static_cast<int>(e));
        if (m.edge_class[e] == EdgeClass::coupling)
            s.coupling_edges.push_back(static_cast<int>(e));
        if (m.edge_class[e] == EdgeClass::boundary)
            s.boundary_edges.push_back(static_cast<int>(e));
    }
    return s;
}

/// Plain-text listing: one `V`, `T` or `E` record per line.
inline void write_mesh(std::ostream& os, const MeshPartition& m)
{
    os << "# level " << m.level << " intervals " << m.intervals << " h " << m.h << '\n';
    os.precision(17);
    for (std::size_t v = 0; v < m.vertices.size(); ++v)
        os << "V " << v << ' ' << m.vertices[v].x() << ' ' << m.vertices[v].y() << '\n';
    for (std::size_t t = 0; t < m.triangles.size(); ++t) {
        const auto& tri = m.triangles[t];
        const auto& c = m.element_class[t];
        os << "T " << t << ' ' << tri[0] << ' ' << tri[1] << ' ' << tri[2] << ' '
           << (c.interface ? "Interface" : (c.side == Side::inside ? "NonInterface1"
                                                                    : "NonInterface2"))
           << '\n';
    }
    for (std::size_t e = 0; e < m.edges.size(); ++e) {
        const auto& ed = m.edges[e];
        os << "E " << e << ' ' << ed.vertices[0] << ' ' << ed.vertices[1] << ' '
           << ed.triangles[0] << ' ' << ed.triangles[1] << ' ' << to_string(m.edge_class[e])
           << '\n';
    }
}

} // namespace iwg
