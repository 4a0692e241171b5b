#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "nystrom/error.hpp"

namespace nystrom {

using Index = Eigen::Index;
using DenseMatrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Throws DataError when any entry is NaN or infinite.
void require_finite(const DenseMatrix& m, const char* what = "matrix");

// Symmetric matrix whose lower triangle is the source of truth. The upper
// triangle is always a mirror written at construction, so a(i,j) == a(j,i)
// holds bit-for-bit. Storage is a full column-major buffer so that products
// can go straight to the GEMM kernels.
class SymmetricMatrix {
 public:
  SymmetricMatrix() = default;
  explicit SymmetricMatrix(Index order);

  // Reads the lower triangle of `m` (which must be square) and mirrors it.
  static SymmetricMatrix from_lower(const DenseMatrix& m);

  // Builds from an arbitrary square matrix by averaging it with its transpose.
  static SymmetricMatrix symmetrized(const DenseMatrix& m);

  template <typename Fn>
  static SymmetricMatrix generate(Index order, Fn&& lower_entry) {
    SymmetricMatrix s(order);
    for (Index j = 0; j < order; ++j) {
      for (Index i = j; i < order; ++i) {
        const double v = lower_entry(i, j);
        s.full_(i, j) = v;
        s.full_(j, i) = v;
      }
    }
    return s;
  }

  Index order() const noexcept { return full_.rows(); }
  double operator()(Index i, Index j) const { return full_(i, j); }
  const DenseMatrix& dense() const noexcept { return full_; }

  // A[:, idx]
  DenseMatrix columns(std::span<const Index> idx) const;
  // A[idx, idx]
  DenseMatrix principal(std::span<const Index> idx) const;
  DenseMatrix multiply(const DenseMatrix& x) const;
  double frobenius_norm() const { return full_.norm(); }

 private:
  DenseMatrix full_;
};

struct Triplet {
  Index row = 0;
  Index col = 0;
  double value = 0.0;
};

// Sparse symmetric matrix. Only entries with row >= col are supplied and
// reported; a full-pattern CSR copy is kept internally for products.
class SparseSymmetric {
 public:
  SparseSymmetric() = default;
  SparseSymmetric(Index order, std::vector<Triplet> lower);

  Index order() const noexcept { return order_; }
  // Stored (lower-triangle) entries, sorted by (col, row).
  const std::vector<Triplet>& lower_entries() const noexcept { return lower_; }
  // Logical nonzeros of the full m x m matrix.
  std::size_t nnz() const noexcept { return values_.size(); }

  double operator()(Index i, Index j) const;
  DenseMatrix columns(std::span<const Index> idx) const;
  DenseMatrix principal(std::span<const Index> idx) const;
  // Rows [r0, r1) of the full matrix, densified.
  DenseMatrix row_block(Index r0, Index r1) const;
  DenseMatrix multiply(const DenseMatrix& x) const;
  DenseMatrix to_dense() const;
  double frobenius_norm() const;

  std::span<const std::int64_t> row_ptr() const noexcept { return row_ptr_; }
  std::span<const Index> col_idx() const noexcept { return col_idx_; }
  std::span<const double> values() const noexcept { return values_; }

 private:
  Index order_ = 0;
  std::vector<Triplet> lower_;
  std::vector<std::int64_t> row_ptr_;
  std::vector<Index> col_idx_;
  std::vector<double> values_;
};

// Ordered distinct column indices that define C, with optional per-stage
// bookkeeping from multi-stage samplers.
struct ColumnSet {
  std::vector<Index> indices;
  std::vector<std::size_t> stage_sizes;
  // The residual reached zero before the full budget was drawn.
  bool early_exit = false;
  // Leverage sampling ran out of positive scores and padded uniformly.
  bool padded = false;
  // A stage budget was reduced to the columns available.
  bool clamped = false;

  std::size_t size() const noexcept { return indices.size(); }
};

// Throws ParameterError unless indices are distinct, in [0, m), non-empty,
// and stage_sizes (when present) sum to the index count.
void validate(const ColumnSet& cols, Index m);

}  // namespace nystrom
