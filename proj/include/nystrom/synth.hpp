#pragma once

#include "nystrom/kernel_builder.hpp"
#include "nystrom/matrix.hpp"
#include "nystrom/samplers.hpp"

namespace nystrom::synth {

// k diagonal blocks, each of order m/k with unit diagonal and alpha elsewhere.
struct AdversarialSpec {
  Index m = 0;
  Index k = 1;
  double alpha = 0.0;
};

void validate(const AdversarialSpec& spec);

SymmetricMatrix build_block_adversarial(const AdversarialSpec& spec);

// |A - A_k|_F = (1 - alpha) sqrt(m - k) for the block construction.
double adversarial_residual_norm(const AdversarialSpec& spec);

// Exact squared Frobenius error of the modified Nystrom approximation of one
// p x p block (unit diagonal, alpha off-diagonal) from c of its columns, as a
// rational function of (p, c, alpha). Requires 1 <= c < p, alpha in (0, 1).
double single_block_modified_error(Index p, Index c, double alpha);

// (m - c) / (m - k) * (1 + 2k / c) * |A - A_k|_F^2 with the block
// construction's residual substituted. Requires k <= c <= m.
double lower_bound_value(Index m, Index k, Index c, double alpha);

struct LowRankSpec {
  Index m = 0;
  Index r = 0;
  // Rank of the leading c x c principal block.
  Index leading_block_rank = 0;
  Index c = 0;
};

// A = G G^T with G m x r Gaussian; rows of G inside the leading block are
// zeroed until that block's rank equals leading_block_rank. rank(A) = r.
SymmetricMatrix gen_low_rank_spsd(const LowRankSpec& spec, Rng& rng);

// Q diag(lambda) Q^T with Q Haar-distributed orthogonal, k dominant
// eigenvalues in [5, 10] and an exponentially decaying tail. The top-k
// subspace is spread over all coordinates, so its coherence is small.
SymmetricMatrix gen_low_coherence_spsd(Index m, Index k, Rng& rng);

// Random sparse SPD matrix: each strictly-lower entry is nonzero with
// probability `density` (uniform in [-1, 1]); the diagonal is made strictly
// dominant, so the matrix is positive definite.
SparseSymmetric gen_sparse_spsd(Index m, double density, Rng& rng);

// m points in [0,1]^d around `clusters` random centres (Gaussian spread),
// min-max normalised.
Dataset gen_clustered_points(Index m, Index d, Index clusters, double spread, Rng& rng);

}  // namespace nystrom::synth
