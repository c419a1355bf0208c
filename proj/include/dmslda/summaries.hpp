#pragma once

#include <vector>

#include "dmslda/types.hpp"

namespace dmslda {

/// Sample statistics of one shard: class means, pooled within-class
/// covariance with 1/(n-K) normalization, and the K-1 mean-difference
/// columns.
ClassSummaries compute_class_summaries(const LabeledDataset& data);

/// Aggregate per-machine summaries: pooled_cov and mean_diffs are
/// unweighted entrywise means over machines, class_means are
/// count-weighted, counts are summed.
ClassSummaries average_summaries(const std::vector<ClassSummaries>& parts);

/// L_m(W) = 1/2 <W, Sigma_m W> - <W, U_m>
double local_loss(const ClassSummaries& summ, const DiscriminantMatrix& w);

/// grad L_m(W) = Sigma_m W - U_m
Matrix local_gradient(const ClassSummaries& summ, const DiscriminantMatrix& w);

}  // namespace dmslda
