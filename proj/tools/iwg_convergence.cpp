// Convergence studies for the immersed weak Galerkin / continuous Galerkin method.
//
//   iwg_convergence --k 1 --coeffs "1,1;1,10" --levels 1..5 --out results
//   iwg_convergence --config study.cfg --k 2
//
// The config file holds key=value lines named like the long flags; flags win over the file.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "iwg/config.hpp"
#include "iwg/study.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"Convergence study on the circular interface benchmark"};
    app.set_config("--config", "", "key=value file with defaults for the flags below");
    app.allow_config_extras(CLI::config_extras_mode::error);
    // values such as coeffs=1,10;1,100 are single strings, not comma arrays
    app.get_config_formatter_base()->arrayDelimiter('|');

    iwg::RunConfig cfg;
    std::string levels = "1..5";
    std::string coeffs = "1,1;1,10;1,100;1,1000";
    std::string solver = "cholesky";
    std::string jump = "arc";
    std::string preconditioner = "jacobi";

    app.add_option("--k", cfg.k, "polynomial degree (1 or 2)")->capture_default_str();
    app.add_option("--levels", levels, "level range A..B")->capture_default_str();
    app.add_option("--coeffs", coeffs, "coefficient pairs A1,A2[;A1,A2...]")->capture_default_str();
    app.add_option("--depth", cfg.depth, "arc subdivision depth on cut elements")->capture_default_str();
    app.add_option("--quad-offset", cfg.quad_offset, "added to every quadrature degree")
        ->capture_default_str();
    app.add_option("--intervals", cfg.coarse_intervals, "squares per side at level 1")
        ->capture_default_str();
    app.add_option("--jump", jump, "where jump conditions are imposed: arc or chord")
        ->capture_default_str();
    app.add_option("--solver", solver, "cholesky or cg")->capture_default_str();
    app.add_option("--cg-tol", cfg.solver.cg_tol, "CG relative residual target")->capture_default_str();
    app.add_option("--cg-max-iter", cfg.solver.cg_max_iter, "CG iteration budget")->capture_default_str();
    app.add_option("--preconditioner", preconditioner, "CG preconditioner: jacobi or none")
        ->capture_default_str();
    app.add_option("--out", cfg.out_dir, "output directory")->capture_default_str();
    app.add_flag("--dump-mesh", cfg.dump_mesh, "write the mesh of every level");
    app.add_flag("--dump-matrix", cfg.dump_matrix, "write the reduced matrix of every level");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        const auto [lo, hi] = iwg::parse_levels(levels);
        cfg.level_min = lo;
        cfg.level_max = hi;
        cfg.coeffs = iwg::parse_coeffs(coeffs);
        cfg.solver.method = iwg::parse_solver(solver);
        cfg.jump = iwg::parse_jump(jump);
        if (preconditioner == "jacobi")
            cfg.solver.preconditioner = iwg::SolverConfig::Preconditioner::jacobi;
        else if (preconditioner == "none")
            cfg.solver.preconditioner = iwg::SolverConfig::Preconditioner::none;
        else
            throw iwg::Error(iwg::ErrorKind::invalid_config, "preconditioner must be jacobi or none");
        iwg::run_study(cfg, std::cout);
    } catch (const iwg::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
