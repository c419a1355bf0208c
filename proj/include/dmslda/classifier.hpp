#pragma once

#include "dmslda/types.hpp"

namespace dmslda {

/// LDA model on the projected data W^T x in R^{K-1}.
struct ReducedLdaModel {
    DiscriminantMatrix projection;  // d x (K-1)
    Matrix proj_means;              // K x (K-1), row k-1 = mean_k . W
    Matrix proj_cov;                // (K-1) x (K-1), W^T Sigma W + ridge
    Vector log_priors;              // length K
};

/// Core fit from explicit statistics. A scaled ridge
/// eps = 1e-8 * trace(W^T Sigma W)/(K-1) is always added to the
/// projected covariance.
ReducedLdaModel fit_reduced_lda(const DiscriminantMatrix& w, const Matrix& class_means,
                                const Matrix& pooled_cov, const Vector& priors);

ReducedLdaModel fit_reduced_lda(const DiscriminantMatrix& w, const ClassSummaries& summ);

/// Fit directly from already-projected statistics (the distributed
/// path, where workers ship W^T mu_k and W^T Sigma W only).
ReducedLdaModel fit_reduced_lda_projected(const DiscriminantMatrix& w, const Matrix& proj_means,
                                          const Matrix& proj_cov_raw, const Vector& priors);

/// argmax_k z^T S^{-1} m_k - 1/2 m_k^T S^{-1} m_k + log pi_k with
/// z = W^T x; ties break to the smallest class index. Returns a 1-based
/// label.
int predict(const ReducedLdaModel& model, const Vector& x);

IntVector predict_batch(const ReducedLdaModel& model, const Matrix& xs);

}  // namespace dmslda
