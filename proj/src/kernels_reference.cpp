// Serial reference implementations. Straight loops, no blocking, no Eigen
// products: these are the oracles the parallel kernels are tested against.

#include <cmath>

#include "nystrom/kernels.hpp"

namespace nystrom::kernels::reference {

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) throw ParameterError("matmul: inner dimensions differ");
  DenseMatrix out = DenseMatrix::Zero(a.rows(), b.cols());
  for (Index j = 0; j < b.cols(); ++j) {
    for (Index p = 0; p < a.cols(); ++p) {
      const double bpj = b(p, j);
      for (Index i = 0; i < a.rows(); ++i) out(i, j) += a(i, p) * bpj;
    }
  }
  return out;
}

DenseMatrix rbf_gram(const DenseMatrix& points, double sigma) {
  const Index m = points.rows();
  DenseMatrix k(m, m);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < m; ++j) {
      double d2 = 0.0;
      for (Index t = 0; t < points.cols(); ++t) {
        const double d = points(i, t) - points(j, t);
        d2 += d * d;
      }
      k(i, j) = std::exp(-d2 / (2.0 * sigma * sigma));
    }
  }
  return k;
}

DenseMatrix spmm(Index rows, std::span<const std::int64_t> row_ptr,
                 std::span<const Index> col_idx, std::span<const double> values,
                 const DenseMatrix& x) {
  DenseMatrix out = DenseMatrix::Zero(rows, x.cols());
  for (Index i = 0; i < rows; ++i) {
    for (std::int64_t p = row_ptr[i]; p < row_ptr[i + 1]; ++p) {
      for (Index j = 0; j < x.cols(); ++j) out(i, j) += values[p] * x(col_idx[p], j);
    }
  }
  return out;
}

double residual_frobenius_sq(const DenseMatrix& a, const DenseMatrix& c, const DenseMatrix& g) {
  const DenseMatrix approx = matmul(c, g);
  double total = 0.0;
  for (Index j = 0; j < a.cols(); ++j) {
    for (Index i = 0; i < a.rows(); ++i) {
      const double d = a(i, j) - approx(i, j);
      total += d * d;
    }
  }
  return total;
}

Vector residual_column_sq_norms(const DenseMatrix& a, const DenseMatrix& q) {
  const DenseMatrix coeff = matmul(q.transpose(), a);
  const DenseMatrix proj = matmul(q, coeff);
  Vector out(a.cols());
  for (Index j = 0; j < a.cols(); ++j) {
    double s = 0.0;
    for (Index i = 0; i < a.rows(); ++i) {
      const double d = a(i, j) - proj(i, j);
      s += d * d;
    }
    out(j) = s;
  }
  return out;
}

}  // namespace nystrom::kernels::reference
