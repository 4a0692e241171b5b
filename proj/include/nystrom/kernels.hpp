#pragma once

// Data-parallel inner loops. Every kernel in `nystrom::kernels` is
// OpenMP-parallel over disjoint blocks; `nystrom::kernels::reference` holds a
// plain serial implementation of the same contract that the tests and the
// benchmark compare against.

#include <cstdint>
#include <functional>
#include <span>

#include "nystrom/matrix.hpp"

namespace nystrom {

// Column-block width used by the blockwise products. NYSTROM_BLOCK_COLS in
// the environment overrides the default of 256.
Index default_block_cols();

namespace kernels {

// a * b computed tile by tile (block x block output tiles). Peak extra memory
// is one tile per thread.
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b, Index block);

// a^T * b, same tiling over the output.
DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b, Index block);

// Gram matrix of the RBF kernel exp(-|x_i - x_j|^2 / (2 sigma^2)) over the
// rows of `points`. Diagonal is exactly 1; result is symmetric bit-for-bit.
DenseMatrix rbf_gram(const DenseMatrix& points, double sigma);

// CSR (full pattern) times dense.
DenseMatrix spmm(Index rows, std::span<const std::int64_t> row_ptr,
                 std::span<const Index> col_idx, std::span<const double> values,
                 const DenseMatrix& x);

// Supplies rows [r0, r1) of A as a dense block.
using RowBlockFn = std::function<DenseMatrix(Index r0, Index r1)>;

// sum over row blocks of |A[rows,:] - c[rows,:] * g|_F^2, where g is c x m.
// A is never materialised beyond one row block per thread.
double residual_frobenius_sq(Index m, const RowBlockFn& rows_of_a, const DenseMatrix& c,
                             const DenseMatrix& g, Index block);

// Squared column norms of (A - Q Q^T A) computed one column block at a time.
// q must have orthonormal columns (q may have zero columns).
Vector residual_column_sq_norms(const DenseMatrix& a, const DenseMatrix& q, Index block);

namespace reference {

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix rbf_gram(const DenseMatrix& points, double sigma);
DenseMatrix spmm(Index rows, std::span<const std::int64_t> row_ptr,
                 std::span<const Index> col_idx, std::span<const double> values,
                 const DenseMatrix& x);
double residual_frobenius_sq(const DenseMatrix& a, const DenseMatrix& c, const DenseMatrix& g);
Vector residual_column_sq_norms(const DenseMatrix& a, const DenseMatrix& q);

}  // namespace reference
}  // namespace kernels
}  // namespace nystrom
