#include "dmslda/solver.hpp"

#include <cmath>
#include <random>

namespace dmslda {

void QuadraticProblem::validate() const {
    if (quad.rows() != quad.cols())
        throw ShapeMismatch("QuadraticProblem: A must be square");
    if (linear.rows() != quad.rows())
        throw ShapeMismatch("QuadraticProblem: C rows must match A");
    if (lambda < 0.0) throw Error("QuadraticProblem: lambda must be nonnegative");
    double scale = quad.cwiseAbs().maxCoeff();
    double asym = (quad - quad.transpose()).cwiseAbs().maxCoeff();
    if (scale > 0.0 && asym > 1e-12 * scale)
        throw ShapeMismatch("QuadraticProblem: A is not symmetric");
}

double lipschitz_upper_bound(const Matrix& a) {
    if (!a.allFinite()) throw NonFinite("lipschitz_upper_bound: non-finite entries");
    const Eigen::Index d = a.rows();
    if (d == 0) return 0.0;

    std::mt19937_64 rng(0x5bd1e995u);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    Vector v(d);
    for (Eigen::Index i = 0; i < d; ++i) v[i] = unif(rng);
    v.normalize();

    double estimate = 0.0;
    for (int iter = 0; iter < 5000; ++iter) {
        Vector av = a * v;
        double norm = av.norm();
        if (norm == 0.0) return 0.0;  // v landed in the null space
        double rayleigh = v.dot(av);
        estimate = rayleigh;
        // eigenpair residual relative to the eigenvalue estimate
        if ((av - rayleigh * v).norm() <= 1e-4 * std::abs(rayleigh)) break;
        v = av / norm;
    }
    return std::abs(estimate) * (1.0 + 1e-3);
}

double objective_value(const QuadraticProblem& p, const DiscriminantMatrix& w) {
    require_same_shape(p.linear, w, "objective_value");
    return 0.5 * (w.transpose() * p.quad * w).trace() - (w.transpose() * p.linear).trace() +
           p.lambda * w.cwiseAbs().sum();
}

double kkt_residual(const QuadraticProblem& p, const DiscriminantMatrix& w) {
    require_same_shape(p.linear, w, "kkt_residual");
    Matrix g = p.quad * w - p.linear;
    double worst = 0.0;
    for (Eigen::Index j = 0; j < w.rows(); ++j) {
        for (Eigen::Index k = 0; k < w.cols(); ++k) {
            double viol;
            if (w(j, k) == 0.0)
                viol = std::max(std::abs(g(j, k)) - p.lambda, 0.0);
            else
                viol = std::abs(g(j, k) + p.lambda * (w(j, k) > 0.0 ? 1.0 : -1.0));
            worst = std::max(worst, viol);
        }
    }
    return worst;
}

SolveReport fista_solve(const QuadraticProblem& p, const DiscriminantMatrix& init,
                        const SolverConfig& cfg) {
    p.validate();
    require_same_shape(p.linear, init, "fista_solve");

    double lip = lipschitz_upper_bound(p.quad);
    double step = cfg.step_safety / std::max(lip, 1e-12);

    DiscriminantMatrix w = init;
    DiscriminantMatrix w_prev = init;
    DiscriminantMatrix y = init;
    double momentum = 1.0;

    SolveReport report;
    for (int iter = 1; iter <= cfg.max_iterations; ++iter) {
        Matrix grad_y = p.quad * y - p.linear;
        w = soft_threshold(y - step * grad_y, step * p.lambda);

        double momentum_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
        y = w + ((momentum - 1.0) / momentum_next) * (w - w_prev);
        momentum = momentum_next;
        w_prev = w;

        report.iterations = iter;
        report.kkt_residual = kkt_residual(p, w);
        if (report.kkt_residual <= cfg.kkt_tolerance) {
            report.converged = true;
            break;
        }
        if (!w.allFinite()) throw NonFinite("fista_solve: iterate diverged");
    }
    report.solution = w;
    report.final_objective = objective_value(p, w);
    return report;
}

}  // namespace dmslda
