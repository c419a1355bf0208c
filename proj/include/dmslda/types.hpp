#pragma once

#include <Eigen/Dense>

#include "dmslda/errors.hpp"

namespace dmslda {

// One convention everywhere: dense 64-bit matrices, row-major storage,
// 1-based class labels.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using IntVector = Eigen::VectorXi;

/// The discriminant matrix W in R^{d x (K-1)}: the object every solver
/// path estimates.
using DiscriminantMatrix = Matrix;

/// Row-per-sample feature matrix with labels in 1..K.
struct LabeledDataset {
    Matrix features;   // n x d
    IntVector labels;  // length n, values in 1..K
    int num_classes = 0;

    Eigen::Index sample_count() const { return features.rows(); }
    Eigen::Index dim() const { return features.cols(); }

    // Throws MissingClass / DegenerateNormalization / ShapeMismatch on
    // violated invariants. Every class must appear at least twice and
    // n >= K + 1 so the pooled-covariance normalization is positive.
    void validate() const;
};

/// Per-machine sufficient statistics: class means, counts, pooled
/// within-class covariance and the (K-1) mean-difference columns.
struct ClassSummaries {
    Matrix class_means;     // K x d, row k-1 = mean of class k
    IntVector class_counts; // length K
    Matrix pooled_cov;      // d x d
    Matrix mean_diffs;      // d x (K-1), column k-1 = mean_k - overall mean
    long total_count = 0;

    Eigen::Index dim() const { return pooled_cov.rows(); }
    int num_classes() const { return static_cast<int>(class_counts.size()); }
};

/// Column k-1 of the returned matrix is class mean k minus the
/// count-weighted overall mean, for k = 1..K-1.
Matrix recompute_mean_diffs(const ClassSummaries& summ);

/// The unified l1,1-penalized quadratic
///   min_W  1/2 <W, A W> - <W, C> + lambda ||W||_{1,1}
struct QuadraticProblem {
    Matrix quad;    // A, d x d symmetric PSD
    Matrix linear;  // C, d x (K-1)
    double lambda = 0.0;

    void validate() const;
};

struct SolveReport {
    DiscriminantMatrix solution;
    int iterations = 0;
    double final_objective = 0.0;
    double kkt_residual = 0.0;
    bool converged = false;
};

inline void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw ShapeMismatch(std::string(what) + ": shape mismatch");
}

}  // namespace dmslda
