#pragma once

#include "dmslda/types.hpp"

namespace dmslda {

struct SolverConfig {
    int max_iterations = 5000;
    double kkt_tolerance = 1e-6;
    double step_safety = 1.0;  // multiplies the 1/L step, in (0, 1]
};

/// Entrywise sign(x) * max(|x| - tau, 0); the proximal operator of
/// tau * ||.||_{1,1}.
template <typename Derived>
Matrix soft_threshold(const Eigen::MatrixBase<Derived>& m, double tau) {
    return m.unaryExpr([tau](double x) {
        double shrunk = std::abs(x) - tau;
        return shrunk > 0.0 ? (x > 0.0 ? shrunk : -shrunk) : 0.0;
    });
}

/// Upper bound on the largest eigenvalue of a symmetric matrix: power
/// iteration to relative tolerance 1e-4, times a (1 + 1e-3) margin.
double lipschitz_upper_bound(const Matrix& a);

/// 1/2 <W, A W> - <W, C> + lambda ||W||_{1,1}
double objective_value(const QuadraticProblem& p, const DiscriminantMatrix& w);

/// Linf,inf violation of the subgradient optimality conditions at W:
/// max(|g| - lambda, 0) where W is zero, |g + lambda sign(W)| elsewhere,
/// with g = A W - C.
double kkt_residual(const QuadraticProblem& p, const DiscriminantMatrix& w);

/// FISTA with fixed step 1/L from the power-iteration bound. Convergence
/// is declared on the KKT residual. Never throws on non-convergence; the
/// report carries converged = false.
SolveReport fista_solve(const QuadraticProblem& p, const DiscriminantMatrix& init,
                        const SolverConfig& cfg);

}  // namespace dmslda
