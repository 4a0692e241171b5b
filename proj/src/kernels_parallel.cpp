#include "nystrom/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include <omp.h>

namespace nystrom {

Index default_block_cols() {
  if (const char* env = std::getenv("NYSTROM_BLOCK_COLS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<Index>(v);
    } catch (const std::exception&) {
    }
  }
  return 256;
}

namespace kernels {
namespace {

Index clamp_block(Index block) { return block > 0 ? block : default_block_cols(); }

Index num_blocks(Index n, Index block) { return n == 0 ? 0 : (n + block - 1) / block; }

}  // namespace

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b, Index block) {
  if (a.cols() != b.rows()) {
    throw ParameterError("matmul: inner dimensions " + std::to_string(a.cols()) + " and " +
                         std::to_string(b.rows()) + " differ");
  }
  block = clamp_block(block);
  DenseMatrix out(a.rows(), b.cols());
  const Index row_blocks = num_blocks(a.rows(), block);
  const Index col_blocks = num_blocks(b.cols(), block);
  const Index tiles = row_blocks * col_blocks;

#pragma omp parallel for schedule(dynamic)
  for (Index t = 0; t < tiles; ++t) {
    const Index r0 = (t % row_blocks) * block;
    const Index c0 = (t / row_blocks) * block;
    const Index nr = std::min(block, a.rows() - r0);
    const Index nc = std::min(block, b.cols() - c0);
    out.block(r0, c0, nr, nc).noalias() = a.middleRows(r0, nr) * b.middleCols(c0, nc);
  }
  return out;
}

DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b, Index block) {
  if (a.rows() != b.rows()) {
    throw ParameterError("matmul_tn: row counts " + std::to_string(a.rows()) + " and " +
                         std::to_string(b.rows()) + " differ");
  }
  block = clamp_block(block);
  DenseMatrix out(a.cols(), b.cols());
  const Index row_blocks = num_blocks(a.cols(), block);
  const Index col_blocks = num_blocks(b.cols(), block);
  const Index tiles = row_blocks * col_blocks;

#pragma omp parallel for schedule(dynamic)
  for (Index t = 0; t < tiles; ++t) {
    const Index r0 = (t % row_blocks) * block;
    const Index c0 = (t / row_blocks) * block;
    const Index nr = std::min(block, a.cols() - r0);
    const Index nc = std::min(block, b.cols() - c0);
    out.block(r0, c0, nr, nc).noalias() =
        a.middleCols(r0, nr).transpose() * b.middleCols(c0, nc);
  }
  return out;
}

DenseMatrix rbf_gram(const DenseMatrix& points, double sigma) {
  const Index m = points.rows();
  const double scale = -1.0 / (2.0 * sigma * sigma);
  // Row-major copy so each instance is contiguous.
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> x = points;
  DenseMatrix k(m, m);

#pragma omp parallel for schedule(dynamic, 16)
  for (Index j = 0; j < m; ++j) {
    k(j, j) = 1.0;
    for (Index i = j + 1; i < m; ++i) {
      const double d2 = (x.row(i) - x.row(j)).squaredNorm();
      k(i, j) = std::exp(scale * d2);
    }
  }
  // Mirror after all lower entries exist; column j of the upper part is row j
  // of the lower part.
#pragma omp parallel for schedule(static)
  for (Index j = 0; j < m; ++j) {
    for (Index i = 0; i < j; ++i) k(i, j) = k(j, i);
  }
  return k;
}

DenseMatrix spmm(Index rows, std::span<const std::int64_t> row_ptr,
                 std::span<const Index> col_idx, std::span<const double> values,
                 const DenseMatrix& x) {
  DenseMatrix out = DenseMatrix::Zero(rows, x.cols());
  // Row-major output buffer keeps each CSR row's updates contiguous.
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> acc =
      Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>::Zero(rows,
                                                                                  x.cols());
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> xr = x;

#pragma omp parallel for schedule(dynamic, 64)
  for (Index i = 0; i < rows; ++i) {
    for (std::int64_t p = row_ptr[i]; p < row_ptr[i + 1]; ++p) {
      acc.row(i).noalias() += values[p] * xr.row(col_idx[p]);
    }
  }
  out = acc;
  return out;
}

double residual_frobenius_sq(Index m, const RowBlockFn& rows_of_a, const DenseMatrix& c,
                             const DenseMatrix& g, Index block) {
  block = clamp_block(block);
  const Index blocks = num_blocks(m, block);
  double total = 0.0;

#pragma omp parallel for schedule(dynamic) reduction(+ : total)
  for (Index b = 0; b < blocks; ++b) {
    const Index r0 = b * block;
    const Index r1 = std::min(m, r0 + block);
    DenseMatrix r = rows_of_a(r0, r1);
    r.noalias() -= c.middleRows(r0, r1 - r0) * g;
    total += r.squaredNorm();
  }
  return total;
}

Vector residual_column_sq_norms(const DenseMatrix& a, const DenseMatrix& q, Index block) {
  block = clamp_block(block);
  const Index n = a.cols();
  const Index blocks = num_blocks(n, block);
  Vector out(n);

#pragma omp parallel for schedule(dynamic)
  for (Index b = 0; b < blocks; ++b) {
    const Index c0 = b * block;
    const Index nc = std::min(block, n - c0);
    DenseMatrix r = a.middleCols(c0, nc);
    if (q.cols() > 0) {
      const DenseMatrix coeff = q.transpose() * r;
      r.noalias() -= q * coeff;
    }
    out.segment(c0, nc) = r.colwise().squaredNorm().transpose();
  }
  return out;
}

}  // namespace kernels
}  // namespace nystrom
