#include "dmslda/summaries.hpp"

#include <cmath>

namespace dmslda {

void LabeledDataset::validate() const {
    if (num_classes < 1) throw ShapeMismatch("LabeledDataset: num_classes must be positive");
    if (labels.size() != features.rows())
        throw ShapeMismatch("LabeledDataset: label count differs from sample count");
    IntVector counts = IntVector::Zero(num_classes);
    for (Eigen::Index i = 0; i < labels.size(); ++i) {
        int y = labels[i];
        if (y < 1 || y > num_classes)
            throw ShapeMismatch("LabeledDataset: label out of range 1..K");
        counts[y - 1] += 1;
    }
    for (int k = 0; k < num_classes; ++k)
        if (counts[k] < 2)
            throw MissingClass("LabeledDataset: class " + std::to_string(k + 1) +
                               " has fewer than 2 samples");
    if (sample_count() <= num_classes)
        throw DegenerateNormalization("LabeledDataset: need n >= K + 1");
}

Matrix recompute_mean_diffs(const ClassSummaries& summ) {
    const int k_classes = summ.num_classes();
    Eigen::RowVectorXd overall = Eigen::RowVectorXd::Zero(summ.class_means.cols());
    for (int k = 0; k < k_classes; ++k)
        overall += summ.class_counts[k] * summ.class_means.row(k);
    overall /= static_cast<double>(summ.total_count);

    Matrix diffs(summ.class_means.cols(), k_classes - 1);
    for (int k = 0; k < k_classes - 1; ++k)
        diffs.col(k) = (summ.class_means.row(k) - overall).transpose();
    return diffs;
}

ClassSummaries compute_class_summaries(const LabeledDataset& data) {
    data.validate();
    const int k_classes = data.num_classes;
    const Eigen::Index n = data.sample_count();
    const Eigen::Index d = data.dim();

    ClassSummaries summ;
    summ.class_counts = IntVector::Zero(k_classes);
    summ.class_means = Matrix::Zero(k_classes, d);
    summ.total_count = static_cast<long>(n);

    for (Eigen::Index i = 0; i < n; ++i) {
        int k = data.labels[i] - 1;
        summ.class_counts[k] += 1;
        summ.class_means.row(k) += data.features.row(i);
    }
    for (int k = 0; k < k_classes; ++k)
        summ.class_means.row(k) /= static_cast<double>(summ.class_counts[k]);

    summ.pooled_cov = Matrix::Zero(d, d);
    for (Eigen::Index i = 0; i < n; ++i) {
        int k = data.labels[i] - 1;
        Eigen::RowVectorXd r = data.features.row(i) - summ.class_means.row(k);
        summ.pooled_cov.noalias() += r.transpose() * r;
    }
    summ.pooled_cov /= static_cast<double>(n - k_classes);

    summ.mean_diffs = recompute_mean_diffs(summ);
    return summ;
}

ClassSummaries average_summaries(const std::vector<ClassSummaries>& parts) {
    if (parts.empty()) throw ShapeMismatch("average_summaries: no parts");
    const Eigen::Index d = parts.front().dim();
    const int k_classes = parts.front().num_classes();
    for (const auto& p : parts)
        if (p.dim() != d || p.num_classes() != k_classes)
            throw ShapeMismatch("average_summaries: inconsistent d or K across parts");

    const double m = static_cast<double>(parts.size());
    ClassSummaries out;
    out.pooled_cov = Matrix::Zero(d, d);
    out.mean_diffs = Matrix::Zero(d, k_classes - 1);
    out.class_means = Matrix::Zero(k_classes, d);
    out.class_counts = IntVector::Zero(k_classes);
    out.total_count = 0;

    for (const auto& p : parts) {
        out.pooled_cov += p.pooled_cov;
        out.mean_diffs += p.mean_diffs;
        for (int k = 0; k < k_classes; ++k)
            out.class_means.row(k) += p.class_counts[k] * p.class_means.row(k);
        out.class_counts += p.class_counts;
        out.total_count += p.total_count;
    }
    out.pooled_cov /= m;
    out.mean_diffs /= m;
    for (int k = 0; k < k_classes; ++k)
        out.class_means.row(k) /= static_cast<double>(out.class_counts[k]);
    return out;
}

double local_loss(const ClassSummaries& summ, const DiscriminantMatrix& w) {
    if (w.rows() != summ.dim() || w.cols() != summ.num_classes() - 1)
        throw ShapeMismatch("local_loss: W shape does not match summaries");
    return 0.5 * (w.transpose() * summ.pooled_cov * w).trace() -
           (w.transpose() * summ.mean_diffs).trace();
}

Matrix local_gradient(const ClassSummaries& summ, const DiscriminantMatrix& w) {
    if (w.rows() != summ.dim() || w.cols() != summ.num_classes() - 1)
        throw ShapeMismatch("local_gradient: W shape does not match summaries");
    return summ.pooled_cov * w - summ.mean_diffs;
}

}  // namespace dmslda
