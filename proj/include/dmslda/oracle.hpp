#pragma once

#include "dmslda/types.hpp"

namespace dmslda {

/// Population discriminant W* solving Sigma W = U by an SPD
/// factorization (no explicit inverse).
DiscriminantMatrix oracle_discriminant(const Matrix& sigma, const Matrix& u);

/// Orthonormal basis of the Fisher discriminant subspace via the
/// whitened between-class covariance: eigenvectors of
/// Sigma^{-1/2} B Sigma^{-1/2} above 1e-10 * lambda_max, mapped back
/// through Sigma^{-1/2} and re-orthonormalized. Width q = rank(B).
Matrix fisher_subspace(const Matrix& sigma, const Matrix& means, const Vector& priors);

/// Principal angles between the column spans of a and b, descending,
/// clamped to [0, pi/2].
Vector principal_angles(const Matrix& a, const Matrix& b);

}  // namespace dmslda
