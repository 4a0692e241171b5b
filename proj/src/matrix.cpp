#include "nystrom/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_set>

#include "nystrom/kernels.hpp"

namespace nystrom {

void require_finite(const DenseMatrix& m, const char* what) {
  if (!m.allFinite()) throw DataError(std::string(what) + " contains NaN or infinite entries");
}

SymmetricMatrix::SymmetricMatrix(Index order) : full_(DenseMatrix::Zero(order, order)) {}

SymmetricMatrix SymmetricMatrix::from_lower(const DenseMatrix& m) {
  if (m.rows() != m.cols()) {
    throw ParameterError("symmetric matrix needs a square source, got " +
                         std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
  require_finite(m, "symmetric matrix");
  SymmetricMatrix s;
  s.full_ = m.triangularView<Eigen::Lower>();
  s.full_.triangularView<Eigen::StrictlyUpper>() = m.triangularView<Eigen::StrictlyLower>().transpose();
  return s;
}

SymmetricMatrix SymmetricMatrix::symmetrized(const DenseMatrix& m) {
  if (m.rows() != m.cols()) throw ParameterError("symmetrized: source not square");
  const DenseMatrix avg = 0.5 * (m + m.transpose());
  return from_lower(avg);
}

DenseMatrix SymmetricMatrix::columns(std::span<const Index> idx) const {
  DenseMatrix out(order(), static_cast<Index>(idx.size()));
  for (std::size_t j = 0; j < idx.size(); ++j) out.col(static_cast<Index>(j)) = full_.col(idx[j]);
  return out;
}

DenseMatrix SymmetricMatrix::principal(std::span<const Index> idx) const {
  const auto n = static_cast<Index>(idx.size());
  DenseMatrix out(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) out(i, j) = full_(idx[i], idx[j]);
  return out;
}

DenseMatrix SymmetricMatrix::multiply(const DenseMatrix& x) const {
  return kernels::matmul(full_, x, default_block_cols());
}

// ---------------------------------------------------------------------------

SparseSymmetric::SparseSymmetric(Index order, std::vector<Triplet> lower)
    : order_(order), lower_(std::move(lower)) {
  if (order < 1) throw ParameterError("sparse matrix order must be >= 1");
  for (const auto& t : lower_) {
    if (t.row < 0 || t.row >= order || t.col < 0 || t.col >= order) {
      throw ParameterError("sparse entry (" + std::to_string(t.row) + "," +
                           std::to_string(t.col) + ") out of range");
    }
    if (t.row < t.col) throw ParameterError("sparse symmetric storage needs row >= col");
    if (!std::isfinite(t.value)) throw DataError("sparse entry is not finite");
    if (t.value == 0.0) throw ParameterError("sparse storage must not hold explicit zeros");
  }
  std::sort(lower_.begin(), lower_.end(), [](const Triplet& a, const Triplet& b) {
    return a.col != b.col ? a.col < b.col : a.row < b.row;
  });
  for (std::size_t i = 1; i < lower_.size(); ++i) {
    if (lower_[i].row == lower_[i - 1].row && lower_[i].col == lower_[i - 1].col) {
      throw ParameterError("duplicate sparse entry (" + std::to_string(lower_[i].row) + "," +
                           std::to_string(lower_[i].col) + ")");
    }
  }

  // Full-pattern CSR: each off-diagonal entry contributes to both rows.
  std::vector<std::int64_t> counts(static_cast<std::size_t>(order) + 1, 0);
  for (const auto& t : lower_) {
    ++counts[static_cast<std::size_t>(t.row) + 1];
    if (t.row != t.col) ++counts[static_cast<std::size_t>(t.col) + 1];
  }
  for (std::size_t i = 1; i < counts.size(); ++i) counts[i] += counts[i - 1];
  row_ptr_ = counts;
  col_idx_.resize(static_cast<std::size_t>(row_ptr_.back()));
  values_.resize(col_idx_.size());
  std::vector<std::int64_t> fill(row_ptr_.begin(), row_ptr_.end() - 1);
  auto push = [&](Index r, Index c, double v) {
    const auto p = static_cast<std::size_t>(fill[static_cast<std::size_t>(r)]++);
    col_idx_[p] = c;
    values_[p] = v;
  };
  // Walking lower_ in (col, row) order yields sorted columns per CSR row.
  for (const auto& t : lower_) {
    if (t.row != t.col) push(t.col, t.row, t.value);
  }
  for (const auto& t : lower_) push(t.row, t.col, t.value);
  for (Index r = 0; r < order_; ++r) {
    const auto b = static_cast<std::size_t>(row_ptr_[r]);
    const auto e = static_cast<std::size_t>(row_ptr_[r + 1]);
    std::vector<std::pair<Index, double>> row;
    row.reserve(e - b);
    for (auto p = b; p < e; ++p) row.emplace_back(col_idx_[p], values_[p]);
    std::sort(row.begin(), row.end());
    for (auto p = b; p < e; ++p) {
      col_idx_[p] = row[p - b].first;
      values_[p] = row[p - b].second;
    }
  }
}

double SparseSymmetric::operator()(Index i, Index j) const {
  const auto b = col_idx_.begin() + row_ptr_[i];
  const auto e = col_idx_.begin() + row_ptr_[i + 1];
  const auto it = std::lower_bound(b, e, j);
  if (it == e || *it != j) return 0.0;
  return values_[static_cast<std::size_t>(it - col_idx_.begin())];
}

DenseMatrix SparseSymmetric::columns(std::span<const Index> idx) const {
  // Column j of a symmetric matrix equals row j.
  DenseMatrix out = DenseMatrix::Zero(order_, static_cast<Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const Index r = idx[k];
    for (auto p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) {
      out(col_idx_[static_cast<std::size_t>(p)], static_cast<Index>(k)) =
          values_[static_cast<std::size_t>(p)];
    }
  }
  return out;
}

DenseMatrix SparseSymmetric::principal(std::span<const Index> idx) const {
  const auto n = static_cast<Index>(idx.size());
  DenseMatrix out(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) out(i, j) = (*this)(idx[i], idx[j]);
  return out;
}

DenseMatrix SparseSymmetric::row_block(Index r0, Index r1) const {
  DenseMatrix out = DenseMatrix::Zero(r1 - r0, order_);
  for (Index r = r0; r < r1; ++r) {
    for (auto p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) {
      out(r - r0, col_idx_[static_cast<std::size_t>(p)]) = values_[static_cast<std::size_t>(p)];
    }
  }
  return out;
}

DenseMatrix SparseSymmetric::multiply(const DenseMatrix& x) const {
  if (x.rows() != order_) throw ParameterError("sparse multiply: dimension mismatch");
  return kernels::spmm(order_, row_ptr_, col_idx_, values_, x);
}

DenseMatrix SparseSymmetric::to_dense() const { return row_block(0, order_); }

double SparseSymmetric::frobenius_norm() const {
  double s = 0.0;
  for (double v : values_) s += v * v;
  return std::sqrt(s);
}

// ---------------------------------------------------------------------------

void validate(const ColumnSet& cols, Index m) {
  if (cols.indices.empty()) throw ParameterError("column set is empty");
  std::unordered_set<Index> seen;
  for (Index i : cols.indices) {
    if (i < 0 || i >= m) {
      throw ParameterError("column index " + std::to_string(i) + " outside [0, " +
                           std::to_string(m) + ")");
    }
    if (!seen.insert(i).second) throw ParameterError("duplicate column index " + std::to_string(i));
  }
  if (!cols.stage_sizes.empty()) {
    std::size_t total = 0;
    for (auto s : cols.stage_sizes) total += s;
    if (total != cols.indices.size()) throw ParameterError("stage sizes do not sum to column count");
  }
}

}  // namespace nystrom
