#pragma once

#include <cmath>
#include <string>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "iwg/errors.hpp"

namespace iwg {

struct SolverConfig {
    enum class Method { direct_cholesky, cg };
    enum class Preconditioner { jacobi, none };

    Method method = Method::direct_cholesky;
    double cg_tol = 1e-12;
    int cg_max_iter = 100000;
    Preconditioner preconditioner = Preconditioner::jacobi;

    void validate() const
    {
        if (!(cg_tol > 0.0 && cg_tol < 1.0))
            throw Error(ErrorKind::invalid_config, "cg_tol must lie in (0,1)");
        if (cg_max_iter < 1)
            throw Error(ErrorKind::invalid_config, "cg_max_iter must be >= 1");
    }
};

struct SolveStats {
    double relative_residual = 0.0;
    int iterations = 0;     ///< CG iterations; 0 for the direct solver
    long factor_nonzeros = 0; ///< fill of the Cholesky factor; 0 for CG
};

struct SolveResult {
    Eigen::VectorXd x;
    SolveStats stats;
};

namespace detail {

inline double relative_residual(const Eigen::SparseMatrix<double>& a, const Eigen::VectorXd& x,
                                const Eigen::VectorXd& b)
{
    const double nb = b.norm();
    const double r = (b - a * x).norm();
    return nb > 0.0 ? r / nb : r;
}

inline SolveResult solve_pcg(const Eigen::SparseMatrix<double>& a, const Eigen::VectorXd& b,
                             const SolverConfig& cfg)
{
    const Eigen::Index n = b.size();
    Eigen::VectorXd dinv = Eigen::VectorXd::Ones(n);
    if (cfg.preconditioner == SolverConfig::Preconditioner::jacobi) {
        const Eigen::VectorXd diag = a.diagonal();
        for (Eigen::Index i = 0; i < n; ++i) {
            if (!(diag[i] > 0.0))
                throw Error(ErrorKind::not_positive_definite, "non-positive diagonal entry");
            dinv[i] = 1.0 / diag[i];
        }
    }
    SolveResult res;
    res.x = Eigen::VectorXd::Zero(n);
    const double nb = b.norm();
    if (nb == 0.0)
        return res;
    Eigen::VectorXd r = b;
    Eigen::VectorXd z = dinv.cwiseProduct(r);
    Eigen::VectorXd p = z;
    double rz = r.dot(z);
    for (int it = 1; it <= cfg.cg_max_iter; ++it) {
        const Eigen::VectorXd ap = a * p;
        const double pap = p.dot(ap);
        if (!(pap > 0.0))
            throw Error(ErrorKind::not_positive_definite, "CG breakdown: p'Ap <= 0");
        const double alpha = rz / pap;
        res.x += alpha * p;
        r -= alpha * ap;
        res.stats.iterations = it;
        if (r.norm() <= cfg.cg_tol * nb)
            break;
        z = dinv.cwiseProduct(r);
        const double rz_new = r.dot(z);
        p = z + (rz_new / rz) * p;
        rz = rz_new;
    }
    res.stats.relative_residual = relative_residual(a, res.x, b);
    if (res.stats.relative_residual > cfg.cg_tol * 10.0)
        throw Error(ErrorKind::no_convergence,
                    "CG did not reach tolerance in " + std::to_string(cfg.cg_max_iter) +
                        " iterations");
    return res;
}

} // namespace detail

/// Solve the reduced SPD system. Every result carries its residual certificate.
inline SolveResult solve(const Eigen::SparseMatrix<double>& a, const Eigen::VectorXd& b,
                         const SolverConfig& cfg = {})
{
    cfg.validate();
    if (cfg.method == SolverConfig::Method::cg)
        return detail::solve_pcg(a, b, cfg);

    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt;
    llt.compute(a);
    if (llt.info() != Eigen::Success)
        throw Error(ErrorKind::not_positive_definite, "Cholesky factorization failed");
    SolveResult res;
    res.x = llt.solve(b);
    res.stats.relative_residual = detail::relative_residual(a, res.x, b);
    res.stats.factor_nonzeros = static_cast<long>(llt.matrixL().nestedExpression().nonZeros());
    return res;
}

} // namespace iwg
