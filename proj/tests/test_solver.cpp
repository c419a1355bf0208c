#include <doctest.h>

#include <random>

#include "dmslda/solver.hpp"

using namespace dmslda;

namespace {

Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = normal(rng);
    return m;
}

Matrix random_spd(Eigen::Index d, uint64_t seed) {
    Matrix g = random_matrix(d, d + 2, seed);
    return g * g.transpose() / double(d) + 0.1 * Matrix::Identity(d, d);
}

// Cyclic coordinate descent on the same objective, run to a 1e-12
// objective-change tolerance. Kept deliberately naive.
Matrix coordinate_descent(const QuadraticProblem& p, int max_sweeps = 20000) {
    Matrix w = Matrix::Zero(p.linear.rows(), p.linear.cols());
    double prev = 0.0;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        for (Eigen::Index j = 0; j < w.rows(); ++j)
            for (Eigen::Index k = 0; k < w.cols(); ++k) {
                double partial = -p.linear(j, k);
                for (Eigen::Index i = 0; i < w.rows(); ++i)
                    if (i != j) partial += p.quad(j, i) * w(i, k);
                double target = -partial;
                double mag = std::abs(target) - p.lambda;
                w(j, k) = mag > 0 ? (target > 0 ? mag : -mag) / p.quad(j, j) : 0.0;
            }
        double obj = objective_value(p, w);
        if (sweep > 0 && std::abs(prev - obj) < 1e-12) break;
        prev = obj;
    }
    return w;
}

}  // namespace

TEST_CASE("soft threshold") {
    Matrix m(1, 2);
    m << 1.5, -0.3;
    CHECK((soft_threshold(m, 0.0) - m).cwiseAbs().maxCoeff() == 0.0);
    Matrix shrunk = soft_threshold(m, 0.5);
    CHECK(shrunk(0, 0) == doctest::Approx(1.0));
    CHECK(shrunk(0, 1) == 0.0);
    Matrix r = random_matrix(4, 3, 2);
    CHECK(soft_threshold(r, r.cwiseAbs().maxCoeff()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("lipschitz upper bound on the identity") {
    double b = lipschitz_upper_bound(Matrix::Identity(5, 5));
    CHECK(b >= 1.0);
    CHECK(b <= 1.01);
}

TEST_CASE("lipschitz bound on diagonal and AR(1) matrices") {
    Matrix diag = Matrix::Zero(3, 3);
    diag.diagonal() << 1, 2, 5;
    double bound = lipschitz_upper_bound(diag);
    CHECK(bound >= 5.0);
    CHECK(bound <= 5.05);

    const int d = 50;
    Matrix ar1(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) ar1(i, j) = std::pow(0.5, std::abs(i - j));
    Eigen::SelfAdjointEigenSolver<Matrix> eig(ar1);
    double exact = eig.eigenvalues().maxCoeff();
    double b = lipschitz_upper_bound(ar1);
    CHECK(b >= exact);
    CHECK(b <= 1.005 * exact);
}

TEST_CASE("objective value") {
    QuadraticProblem p{random_spd(4, 1), random_matrix(4, 2, 2), 0.3};
    Matrix zero = Matrix::Zero(4, 2);
    CHECK(objective_value(p, zero) == 0.0);

    QuadraticProblem simple{Matrix::Identity(4, 4), Matrix::Zero(4, 2), 0.0};
    Matrix w = random_matrix(4, 2, 3);
    CHECK(objective_value(simple, w) == doctest::Approx(0.5 * w.squaredNorm()));

    double brute = 0.0;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            for (int c = 0; c < 2; ++c) brute += 0.5 * w(a, c) * p.quad(a, b) * w(b, c);
    for (int a = 0; a < 4; ++a)
        for (int c = 0; c < 2; ++c)
            brute += -w(a, c) * p.linear(a, c) + p.lambda * std::abs(w(a, c));
    CHECK(objective_value(p, w) == doctest::Approx(brute).epsilon(1e-12));
}

TEST_CASE("fista basics") {
    SolverConfig cfg;

    SUBCASE("lambda above the max entry yields the zero matrix") {
        QuadraticProblem p{random_spd(5, 4), random_matrix(5, 2, 5), 0.0};
        p.lambda = p.linear.cwiseAbs().maxCoeff() * 1.0001;
        SolveReport report = fista_solve(p, Matrix::Zero(5, 2), cfg);
        CHECK(report.converged);
        CHECK(report.solution.cwiseAbs().maxCoeff() == 0.0);
    }

    SUBCASE("identity quadratic has the soft-threshold closed form") {
        QuadraticProblem p{Matrix::Identity(6, 6), random_matrix(6, 3, 6), 0.5};
        SolverConfig tight = cfg;
        tight.kkt_tolerance = 1e-10;
        SolveReport report = fista_solve(p, Matrix::Zero(6, 3), tight);
        CHECK(report.converged);
        Matrix expected = soft_threshold(p.linear, 0.5);
        CHECK((report.solution - expected).cwiseAbs().maxCoeff() < 1e-8);
    }

    SUBCASE("matches coordinate descent on a random SPD instance") {
        QuadraticProblem p{random_spd(3, 7), random_matrix(3, 1, 8), 0.1};
        SolveReport report = fista_solve(p, Matrix::Zero(3, 1), cfg);
        Matrix cd = coordinate_descent(p);
        CHECK(std::abs(objective_value(p, report.solution) - objective_value(p, cd)) < 1e-8);
    }
}

TEST_CASE("kkt certificate recomputed independently") {
    SolverConfig cfg;
    for (uint64_t seed = 0; seed < 10; ++seed) {
        QuadraticProblem p{random_spd(6, seed), random_matrix(6, 2, seed + 100), 0.2};
        SolveReport report = fista_solve(p, Matrix::Zero(6, 2), cfg);
        REQUIRE(report.converged);
        // independent recomputation from (A, C, lambda, W)
        Matrix g = p.quad * report.solution - p.linear;
        double worst = 0.0;
        for (int j = 0; j < 6; ++j)
            for (int k = 0; k < 2; ++k) {
                double x = report.solution(j, k);
                double v = x == 0.0 ? std::max(std::abs(g(j, k)) - p.lambda, 0.0)
                                    : std::abs(g(j, k) + (x > 0 ? p.lambda : -p.lambda));
                worst = std::max(worst, v);
            }
        CHECK(worst <= cfg.kkt_tolerance);
        CHECK(objective_value(p, report.solution) <=
              objective_value(p, Matrix::Zero(6, 2)) + 1e-10);
    }
}

TEST_CASE("penalty path homogeneity") {
    SolverConfig cfg;
    cfg.kkt_tolerance = 1e-10;
    for (uint64_t seed = 0; seed < 5; ++seed) {
        QuadraticProblem p{random_spd(5, seed + 30), random_matrix(5, 2, seed + 40), 0.15};
        QuadraticProblem scaled = p;
        scaled.linear *= 2.0;
        scaled.lambda *= 2.0;
        Matrix w1 = fista_solve(p, Matrix::Zero(5, 2), cfg).solution;
        Matrix w2 = fista_solve(scaled, Matrix::Zero(5, 2), cfg).solution;
        CHECK((w2 - 2.0 * w1).cwiseAbs().maxCoeff() <
              1e-6 * std::max(1.0, w2.cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("support shrinks as lambda grows") {
    SolverConfig cfg;
    for (uint64_t seed = 0; seed < 5; ++seed) {
        QuadraticProblem p{random_spd(6, seed + 50), random_matrix(6, 2, seed + 60), 0.0};
        p.lambda = 0.05;
        double l11_small = fista_solve(p, Matrix::Zero(6, 2), cfg).solution.cwiseAbs().sum();
        p.lambda = 0.3;
        double l11_large = fista_solve(p, Matrix::Zero(6, 2), cfg).solution.cwiseAbs().sum();
        CHECK(l11_large <= l11_small + 1e-8);
    }
}

TEST_CASE("non-finite input is rejected") {
    Matrix bad = Matrix::Identity(3, 3);
    bad(1, 1) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(lipschitz_upper_bound(bad), NonFinite);
}
