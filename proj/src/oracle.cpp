#include "dmslda/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace dmslda {

namespace {

// Dense symmetric square-root inverse; throws if sigma is not SPD.
Matrix inverse_sqrt_spd(const Matrix& sigma) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(sigma);
    if (eig.info() != Eigen::Success || eig.eigenvalues().minCoeff() <= 0.0)
        throw SingularCovariance("covariance is not positive definite");
    return eig.eigenvectors() *
           eig.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
           eig.eigenvectors().transpose();
}

}  // namespace

DiscriminantMatrix oracle_discriminant(const Matrix& sigma, const Matrix& u) {
    if (sigma.rows() != sigma.cols() || sigma.rows() != u.rows())
        throw ShapeMismatch("oracle_discriminant: incompatible shapes");
    Eigen::LLT<Matrix> llt(sigma);
    if (llt.info() != Eigen::Success)
        throw SingularCovariance("oracle_discriminant: Cholesky factorization failed");
    return llt.solve(u);
}

Matrix fisher_subspace(const Matrix& sigma, const Matrix& means, const Vector& priors) {
    const Eigen::Index d = sigma.rows();
    const Eigen::Index k_classes = means.rows();
    if (means.cols() != d || priors.size() != k_classes)
        throw ShapeMismatch("fisher_subspace: incompatible shapes");

    Eigen::RowVectorXd overall = priors.transpose() * means;
    Matrix between = Matrix::Zero(d, d);
    for (Eigen::Index k = 0; k < k_classes; ++k) {
        Eigen::RowVectorXd diff = means.row(k) - overall;
        between.noalias() += priors[k] * diff.transpose() * diff;
    }

    Matrix whiten = inverse_sqrt_spd(sigma);
    Matrix whitened = whiten * between * whiten;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(whitened);
    double lambda_max = eig.eigenvalues().maxCoeff();
    double cutoff = 1e-10 * std::max(lambda_max, 0.0);

    // Eigenvalues ascend; keep the trailing block above the cutoff.
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < d; ++i)
        if (eig.eigenvalues()[i] > cutoff) ++rank;
    if (rank == 0) return Matrix(d, 0);

    Matrix basis = whiten * eig.eigenvectors().rightCols(rank);
    Eigen::HouseholderQR<Matrix> qr(basis);
    Matrix q = qr.householderQ() * Matrix::Identity(d, rank);
    return q;
}

Vector principal_angles(const Matrix& a, const Matrix& b) {
    auto orthonormalize = [](const Matrix& m) {
        Eigen::ColPivHouseholderQR<Matrix> qr(m);
        if (qr.rank() < m.cols())
            throw RankDeficientInput("principal_angles: columns are linearly dependent");
        return Matrix(qr.householderQ() * Matrix::Identity(m.rows(), m.cols()));
    };
    if (a.rows() != b.rows())
        throw ShapeMismatch("principal_angles: ambient dimensions differ");
    Matrix qa = orthonormalize(a);
    Matrix qb = orthonormalize(b);

    // Cosines lose precision for tiny angles (acos floors near
    // sqrt(eps)), so small angles are recovered from the sine route
    // (I - Qa Qa^T) Qb. Cosine values descend, sine values descend;
    // matching indices run in opposite directions.
    Eigen::JacobiSVD<Matrix> cos_svd(qa.transpose() * qb);
    Eigen::JacobiSVD<Matrix> sin_svd(qb - qa * (qa.transpose() * qb));
    const Eigen::Index q = cos_svd.singularValues().size();
    Vector angles(q);
    for (Eigen::Index i = 0; i < q; ++i) {
        double c = std::clamp(cos_svd.singularValues()[i], 0.0, 1.0);
        double s = std::clamp(sin_svd.singularValues()[q - 1 - i], 0.0, 1.0);
        angles[i] = c * c > 0.5 ? std::asin(s) : std::acos(c);
    }
    std::sort(angles.begin(), angles.end(), std::greater<double>());
    return angles;
}

}  // namespace dmslda
