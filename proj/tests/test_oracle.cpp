#include <doctest.h>

#include <random>

#include "dmslda/oracle.hpp"

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
    Matrix g = random_matrix(d, d + 3, seed);
    return g * g.transpose() / double(d) + 0.2 * Matrix::Identity(d, d);
}

}  // namespace

TEST_CASE("identity covariance gives W* = U") {
    Matrix u = random_matrix(6, 2, 1);
    Matrix w = oracle_discriminant(Matrix::Identity(6, 6), u);
    CHECK((w - u).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("multiclass study means give the hand-computed W*") {
    // Sigma = I, mu1 = (-2,-2,-2,0,...), mu2 = (0,0,0,2,2,2,0,...),
    // mu3 = 0; balanced priors, so U columns are mu_k minus the mean of
    // the three.
    const int d = 10;
    Matrix means = Matrix::Zero(3, d);
    means.row(0).segment(0, 3).setConstant(-2.0);
    means.row(1).segment(3, 3).setConstant(2.0);
    Eigen::RowVectorXd overall = means.colwise().mean();
    Matrix u(d, 2);
    u.col(0) = (means.row(0) - overall).transpose();
    u.col(1) = (means.row(1) - overall).transpose();
    Matrix w = oracle_discriminant(Matrix::Identity(d, d), u);
    for (int i = 0; i < 3; ++i) {
        CHECK(w(i, 0) == doctest::Approx(-4.0 / 3.0));
        CHECK(w(3 + i, 0) == doctest::Approx(-2.0 / 3.0));
        CHECK(w(i, 1) == doctest::Approx(2.0 / 3.0));
        CHECK(w(3 + i, 1) == doctest::Approx(4.0 / 3.0));
    }
    CHECK(w.bottomRows(d - 6).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("definition residual on a random SPD instance") {
    Matrix sigma = random_spd(6, 3);
    Matrix u = random_matrix(6, 2, 4);
    Matrix w = oracle_discriminant(sigma, u);
    CHECK((sigma * w - u).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("linear solve agrees with an explicit eigendecomposition route") {
    Matrix sigma = random_spd(8, 5);
    Matrix u = random_matrix(8, 3, 6);
    Matrix w = oracle_discriminant(sigma, u);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(sigma);
    Matrix w_eig = eig.eigenvectors() * eig.eigenvalues().cwiseInverse().asDiagonal() *
                   eig.eigenvectors().transpose() * u;
    CHECK((w - w_eig).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("fisher subspace ranks") {
    SUBCASE("K=2 is rank one, parallel to Sigma^{-1}(mu1-mu2)") {
        Matrix sigma = random_spd(7, 11);
        Matrix means = random_matrix(2, 7, 12);
        Vector priors = Vector::Constant(2, 0.5);
        Matrix basis = fisher_subspace(sigma, means, priors);
        REQUIRE(basis.cols() == 1);
        Vector direction =
            oracle_discriminant(sigma, (means.row(0) - means.row(1)).transpose());
        double cosine = std::abs(basis.col(0).dot(direction.normalized()));
        CHECK(cosine >= 1.0 - 1e-10);
    }
    SUBCASE("the multiclass study means give rank two") {
        const int d = 12;
        Matrix means = Matrix::Zero(3, d);
        means.row(0).segment(0, 3).setConstant(-2.0);
        means.row(1).segment(3, 3).setConstant(2.0);
        Matrix basis = fisher_subspace(random_spd(d, 13), means,
                                       Vector::Constant(3, 1.0 / 3.0));
        CHECK(basis.cols() == 2);
    }
    SUBCASE("identical means give an empty basis") {
        Matrix means = Matrix::Zero(3, 5);
        means.rowwise() += Eigen::RowVectorXd::Constant(5, 1.5);
        Matrix basis = fisher_subspace(random_spd(5, 14), means,
                                       Vector::Constant(3, 1.0 / 3.0));
        CHECK(basis.cols() == 0);
    }
}

TEST_CASE("principal angles") {
    Matrix a = random_matrix(6, 2, 20);
    CHECK(principal_angles(a, a).maxCoeff() < 1e-10);

    Matrix e1(2, 1), e2(2, 1);
    e1 << 1, 0;
    e2 << 0, 1;
    CHECK(principal_angles(e1, e2)[0] == doctest::Approx(M_PI / 2));

    Matrix dependent(4, 2);
    dependent.col(0) = random_matrix(4, 1, 21);
    dependent.col(1) = 2.0 * dependent.col(0);
    CHECK_THROWS_AS(principal_angles(dependent, dependent), RankDeficientInput);
}

TEST_CASE("span(Sigma^{-1}U) equals the Fisher eigen-subspace") {
    for (uint64_t seed = 0; seed < 100; ++seed) {
        int d = 4 + static_cast<int>(seed % 17);
        Matrix sigma = random_spd(d, 1000 + seed);
        Matrix means = random_matrix(3, d, 2000 + seed);
        Vector priors = Vector::Constant(3, 1.0 / 3.0);
        Eigen::RowVectorXd overall = priors.transpose() * means;
        Matrix u(d, 2);
        u.col(0) = (means.row(0) - overall).transpose();
        u.col(1) = (means.row(1) - overall).transpose();
        Matrix w = oracle_discriminant(sigma, u);
        Matrix basis = fisher_subspace(sigma, means, priors);
        REQUIRE(basis.cols() == 2);
        CHECK(principal_angles(w, basis).maxCoeff() <= 1e-8);
    }
}
