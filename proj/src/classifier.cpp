#include "dmslda/classifier.hpp"

#include <cmath>

namespace dmslda {

namespace {

Vector log_priors_from(const Vector& priors) {
    double total = priors.sum();
    if (std::abs(total - 1.0) > 1e-12)
        throw Error("fit_reduced_lda: priors must sum to 1");
    return priors.array().log();
}

}  // namespace

ReducedLdaModel fit_reduced_lda_projected(const DiscriminantMatrix& w, const Matrix& proj_means,
                                          const Matrix& proj_cov_raw, const Vector& priors) {
    const Eigen::Index q = w.cols();
    if (proj_means.cols() != q || proj_cov_raw.rows() != q || proj_cov_raw.cols() != q)
        throw ShapeMismatch("fit_reduced_lda_projected: incompatible shapes");
    if (w.cwiseAbs().maxCoeff() == 0.0)
        throw ZeroProjection("fit_reduced_lda: W is the zero matrix");

    ReducedLdaModel model;
    model.projection = w;
    model.proj_means = proj_means;
    double ridge = 1e-8 * proj_cov_raw.trace() / static_cast<double>(q);
    model.proj_cov = proj_cov_raw + ridge * Matrix::Identity(q, q);
    model.log_priors = log_priors_from(priors);

    Eigen::LLT<Matrix> llt(model.proj_cov);
    if (llt.info() != Eigen::Success)
        throw SingularProjection("fit_reduced_lda: projected covariance singular after ridge");
    return model;
}

ReducedLdaModel fit_reduced_lda(const DiscriminantMatrix& w, const Matrix& class_means,
                                const Matrix& pooled_cov, const Vector& priors) {
    if (class_means.cols() != w.rows() || pooled_cov.rows() != w.rows())
        throw ShapeMismatch("fit_reduced_lda: incompatible shapes");
    Matrix proj_means = class_means * w;
    Matrix proj_cov = w.transpose() * pooled_cov * w;
    return fit_reduced_lda_projected(w, proj_means, proj_cov, priors);
}

ReducedLdaModel fit_reduced_lda(const DiscriminantMatrix& w, const ClassSummaries& summ) {
    Vector priors(summ.num_classes());
    for (int k = 0; k < summ.num_classes(); ++k)
        priors[k] = static_cast<double>(summ.class_counts[k]) /
                    static_cast<double>(summ.total_count);
    return fit_reduced_lda(w, summ.class_means, summ.pooled_cov, priors);
}

int predict(const ReducedLdaModel& model, const Vector& x) {
    // Single-row batch so the scalar and batch paths share one
    // arithmetic sequence, tie-breaks included.
    return predict_batch(model, x.transpose())[0];
}

IntVector predict_batch(const ReducedLdaModel& model, const Matrix& xs) {
    if (xs.cols() != model.projection.rows())
        throw ShapeMismatch("predict_batch: feature dimension mismatch");
    const Eigen::Index k_classes = model.proj_means.rows();
    Eigen::LLT<Matrix> llt(model.proj_cov);

    // Precompute S^{-1} m_k and the per-class offsets once per batch.
    Matrix solved(model.proj_means.cols(), k_classes);
    Vector offsets(k_classes);
    for (Eigen::Index k = 0; k < k_classes; ++k) {
        Vector m = model.proj_means.row(k).transpose();
        solved.col(k) = llt.solve(m);
        offsets[k] = -0.5 * m.dot(solved.col(k)) + model.log_priors[k];
    }

    Matrix scores = (xs * model.projection) * solved;  // n x K
    scores.rowwise() += offsets.transpose();
    IntVector labels(xs.rows());
    for (Eigen::Index i = 0; i < xs.rows(); ++i) {
        Eigen::Index best;
        scores.row(i).maxCoeff(&best);
        labels[i] = static_cast<int>(best) + 1;
    }
    return labels;
}

}  // namespace dmslda
