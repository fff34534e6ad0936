#pragma once

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "iwg/analysis.hpp"
#include "iwg/solver.hpp"

namespace iwg {

/// One convergence study: fixed k, a list of coefficient pairs, a level range.
struct RunConfig {
    int k = 1;
    int level_min = 1;
    int level_max = 5;
    std::vector<std::pair<double, double>> coeffs{{1, 1}, {1, 10}, {1, 100}, {1, 1000}};
    int depth = 6;
    int quad_offset = 0;
    int coarse_intervals = 4; ///< squares per side at level 1
    JumpGeometry jump = JumpGeometry::arc;
    SolverConfig solver;
    std::string out_dir = "results";
    bool dump_mesh = false;
    bool dump_matrix = false;

    void validate() const
    {
        if (k != 1 && k != 2)
            throw Error(ErrorKind::invalid_config, "k must be 1 or 2");
        if (level_min < 1 || level_max < level_min)
            throw Error(ErrorKind::invalid_config, "levels must satisfy 1 <= A <= B");
        if (coeffs.empty())
            throw Error(ErrorKind::invalid_config, "at least one coefficient pair is required");
        for (const auto& [a1, a2] : coeffs)
            if (!(a1 > 0.0) || !(a2 > 0.0))
                throw Error(ErrorKind::invalid_config, "coefficients must be positive");
        if (depth < 0 || depth > 16)
            throw Error(ErrorKind::invalid_config, "depth must lie in [0,16]");
        if (quad_offset < 0)
            throw Error(ErrorKind::invalid_config, "quadrature offset must be >= 0");
        if (coarse_intervals < 1)
            throw Error(ErrorKind::invalid_config, "coarse interval count must be >= 1");
        solver.validate();
    }

    DiscretizationOptions discretization() const
    {
        DiscretizationOptions o;
        o.k = k;
        o.depth = depth;
        o.quad_offset = quad_offset;
        o.jump = jump;
        return o;
    }
};

struct LevelResult {
    int level = 0;
    int intervals = 0;
    double h = 0.0;
    ErrorNorms errors;
    int unknowns = 0;
    int interface_elements = 0;
    double max_constraint_residual = 0.0;
    int ill_conditioned = 0;
    SolveStats solve;
    double seconds = 0.0;
};

struct ConvergenceReport {
    int k = 1;
    double a1 = 1.0, a2 = 1.0;
    int depth = 6;
    int quad_offset = 0;
    JumpGeometry jump = JumpGeometry::arc;
    std::vector<LevelResult> levels;

    std::vector<double> column(double ErrorNorms::*field) const
    {
        std::vector<double> v;
        for (const auto& l : levels)
            v.push_back(l.errors.*field);
        return v;
    }
    std::vector<double> energy_orders() const { return convergence_orders(column(&ErrorNorms::energy)); }
    std::vector<double> l2_orders() const { return convergence_orders(column(&ErrorNorms::l2)); }
    std::vector<double> linf_orders() const { return convergence_orders(column(&ErrorNorms::linf)); }
};

/// Optional side outputs of a single solve.
struct LevelDumps {
    std::ostream* mesh = nullptr;
    std::ostream* matrix = nullptr;
};

/// Build, assemble, solve and measure one level of the benchmark.
inline LevelResult run_level(const RunConfig& cfg, double a1, double a2, int level,
                             const LevelDumps& dumps = {})
{
    const auto start = std::chrono::steady_clock::now();
    const ManufacturedSolution ms{a1, a2};
    const auto iface = ManufacturedSolution::interface();
    const MeshPartition mesh = build_mesh(level, iface, cfg.coarse_intervals);
    const Discretization d = discretize(mesh, iface, ms.problem(), cfg.discretization());
    const GlobalSystem sys = assemble(d);
    const SolveResult sol = solve(sys.matrix, sys.rhs, cfg.solver);

    LevelResult r;
    r.level = level;
    r.intervals = mesh.intervals;
    r.h = mesh.h;
    r.errors = compute_errors(d, sol.x, ms.exact());
    r.unknowns = d.dofs.num_free;
    r.interface_elements = static_cast<int>(d.spaces.size());
    for (const auto& sp : d.spaces) {
        r.max_constraint_residual = std::max(r.max_constraint_residual, sp.constraint_residual);
        r.ill_conditioned += sp.ill_conditioned ? 1 : 0;
    }
    r.solve = sol.stats;
    if (dumps.mesh)
        write_mesh(*dumps.mesh, mesh);
    if (dumps.matrix)
        write_matrix(*dumps.matrix, sys.matrix);
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

inline std::string run_tag(int k, double a1, double a2)
{
    std::ostringstream os;
    os << "k" << k << "_A" << a1 << "_" << a2;
    return os.str();
}

inline ConvergenceReport run_pair(const RunConfig& cfg, double a1, double a2)
{
    ConvergenceReport rep;
    rep.k = cfg.k;
    rep.a1 = a1;
    rep.a2 = a2;
    rep.depth = cfg.depth;
    rep.quad_offset = cfg.quad_offset;
    rep.jump = cfg.jump;
    for (int level = cfg.level_min; level <= cfg.level_max; ++level) {
        std::ofstream mesh_os, matrix_os;
        LevelDumps dumps;
        const std::string stem = cfg.out_dir + "/" + run_tag(cfg.k, a1, a2) + "_level" +
                                 std::to_string(level);
        if (cfg.dump_mesh) {
            mesh_os.open(stem + "_mesh.txt");
            dumps.mesh = &mesh_os;
        }
        if (cfg.dump_matrix) {
            matrix_os.open(stem + "_matrix.txt");
            dumps.matrix = &matrix_os;
        }
        rep.levels.push_back(run_level(cfg, a1, a2, level, dumps));
    }
    return rep;
}

namespace detail {

inline std::string sci(double v, int digits = 10)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*e", digits, v);
    return buf;
}

inline std::string fixed4(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

} // namespace detail

/// CSV: level,h,energy_err,energy_order,l2_err,l2_order,linf_err,linf_order
inline void write_csv(std::ostream& os, const ConvergenceReport& rep)
{
    os << "level,h,energy_err,energy_order,l2_err,l2_order,linf_err,linf_order\n";
    const auto eo = rep.energy_orders();
    const auto lo = rep.l2_orders();
    const auto io = rep.linf_orders();
    for (std::size_t i = 0; i < rep.levels.size(); ++i) {
        const auto& l = rep.levels[i];
        auto order = [i](const std::vector<double>& o) {
            return i == 0 ? std::string() : detail::sci(o[i - 1]);
        };
        os << l.level << ',' << detail::sci(l.h) << ',' << detail::sci(l.errors.energy) << ','
           << order(eo) << ',' << detail::sci(l.errors.l2) << ',' << order(lo) << ','
           << detail::sci(l.errors.linf) << ',' << order(io) << '\n';
    }
}

/// Plot data: level and log10 of each error column, whitespace separated.
inline void write_plot_data(std::ostream& os, const ConvergenceReport& rep)
{
    os << "# level log10_h log10_energy log10_l2 log10_linf\n";
    for (const auto& l : rep.levels)
        os << l.level << ' ' << detail::sci(std::log10(l.h), 8) << ' '
           << detail::sci(std::log10(l.errors.energy), 8) << ' '
           << detail::sci(std::log10(l.errors.l2), 8) << ' '
           << detail::sci(std::log10(l.errors.linf), 8) << '\n';
}

/// Human-readable table in the usual n / error / order layout.
inline void print_table(std::ostream& os, const ConvergenceReport& rep)
{
    os << "k=" << rep.k << "  (A1,A2)=(" << rep.a1 << "," << rep.a2 << ")  jump=" << to_string(rep.jump)
       << "  depth=" << rep.depth << "  quad_offset=" << rep.quad_offset << '\n';
    os << std::left << std::setw(4) << "n" << std::setw(14) << "|||Qhu-uh|||" << std::setw(9)
       << "order" << std::setw(14) << "||Q0u-u0||" << std::setw(9) << "order" << std::setw(14)
       << "||u-uh||_inf" << std::setw(9) << "order" << std::setw(9) << "dofs" << "time[s]\n";
    const auto eo = rep.energy_orders();
    const auto lo = rep.l2_orders();
    const auto io = rep.linf_orders();
    for (std::size_t i = 0; i < rep.levels.size(); ++i) {
        const auto& l = rep.levels[i];
        auto order = [i](const std::vector<double>& o) {
            return i == 0 ? std::string("--") : detail::fixed4(o[i - 1]);
        };
        os << std::setw(4) << l.level << std::setw(14) << detail::sci(l.errors.energy, 4)
           << std::setw(9) << order(eo) << std::setw(14) << detail::sci(l.errors.l2, 4)
           << std::setw(9) << order(lo) << std::setw(14) << detail::sci(l.errors.linf, 4)
           << std::setw(9) << order(io) << std::setw(9) << l.unknowns << detail::fixed4(l.seconds)
           << '\n';
    }
    os << std::right;
}

/// Run every coefficient pair, writing CSV and plot files into cfg.out_dir.
inline std::vector<ConvergenceReport> run_study(const RunConfig& cfg, std::ostream& log)
{
    cfg.validate();
    std::filesystem::create_directories(cfg.out_dir);
    std::vector<ConvergenceReport> reports;
    for (const auto& [a1, a2] : cfg.coeffs) {
        ConvergenceReport rep = run_pair(cfg, a1, a2);
        const std::string stem = cfg.out_dir + "/" + run_tag(cfg.k, a1, a2);
        {
            std::ofstream csv(stem + ".csv");
            write_csv(csv, rep);
        }
        {
            std::ofstream plot(stem + "_plot.txt");
            write_plot_data(plot, rep);
        }
        print_table(log, rep);
        for (const auto& l : rep.levels)
            log << "  level " << l.level << ": residual " << detail::sci(l.solve.relative_residual, 2)
                << ", interface elements " << l.interface_elements << ", max jump residual "
                << detail::sci(l.max_constraint_residual, 2) << '\n';
        log << '\n';
        reports.push_back(std::move(rep));
    }
    return reports;
}

} // namespace iwg
