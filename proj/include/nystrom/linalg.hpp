#pragma once

#include <optional>

#include "nystrom/matrix.hpp"

namespace nystrom {

// Condensed or truncated singular value decomposition M = left * diag(s) * right^T.
//
// Singular values are nonincreasing. Each right singular vector is sign-normalised
// so that its largest-magnitude entry is positive, which makes factorisations of
// the same input comparable across runs.
struct SvdFactorization {
  DenseMatrix left;
  Vector singular_values;
  DenseMatrix right;
  // Numeric rank of the source (singular values above the default tolerance).
  Index rank = 0;

  Index size() const noexcept { return singular_values.size(); }
};

enum class NormKind { frobenius, spectral };

// Default relative tolerance for rank decisions: max(rows, cols) * eps.
double default_rank_tol(const DenseMatrix& m);

// Without k: the condensed SVD truncated to the numeric rank (zero matrix gives
// empty factors). With k: the leading k triplets, k <= min(rows, cols).
SvdFactorization svd(const DenseMatrix& m, std::optional<Index> k = std::nullopt);

// Singular values only, nonincreasing.
Vector singular_values(const DenseMatrix& m);

DenseMatrix best_rank_k(const DenseMatrix& m, Index k);

// Moore-Penrose inverse; singular values <= rel_tol * sigma_max are dropped.
// A negative rel_tol selects default_rank_tol.
DenseMatrix pinv(const DenseMatrix& m, double rel_tol = -1.0);

double norm(const DenseMatrix& m, NormKind kind);

Index numeric_rank(const DenseMatrix& m, double rel_tol = -1.0);

// Orthonormal basis of range(c), sized to the numeric rank of c.
DenseMatrix orthonormal_basis(const DenseMatrix& c);

// P_C A = Q (Q^T A) for an orthonormal basis Q of range(C).
DenseMatrix project_onto_columns(const DenseMatrix& a, const DenseMatrix& c);

// P_{C,k} A = Q * best_rank_k(Q^T A, k). Requires k <= cols(C).
DenseMatrix project_onto_columns_rank_k(const DenseMatrix& a, const DenseMatrix& c, Index k);

// mu_k = (n / k) * max_j |row j of V_{A,k}|^2. Requires k <= rank(A).
double coherence(const DenseMatrix& a, Index k);

// l_j = |row j of V_{A,k}|^2; sums to k.
Vector leverage_scores(const DenseMatrix& a, Index k);

// C^+ for C = [W; A21] with W nonsingular, via the partitioned-inverse identity
// C^+ = W^{-1} (I + S^T S)^{-1} [I, S^T], S = A21 W^{-1}. The result is
// c x (c + rows(A21)) with columns ordered [W rows, A21 rows]. Throws
// SingularityError when W is numerically singular.
DenseMatrix partitioned_pinv(const DenseMatrix& w, const DenseMatrix& a21);

// Blockwise product; block <= 0 selects default_block_cols().
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b, Index block = 0);

}  // namespace nystrom
