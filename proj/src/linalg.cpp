#include "nystrom/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/SVD>

#include "nystrom/kernels.hpp"

namespace nystrom {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double resolve_tol(const DenseMatrix& m, double rel_tol) {
  return rel_tol < 0.0 ? default_rank_tol(m) : rel_tol;
}

Index rank_from_values(const Vector& s, double rel_tol) {
  if (s.size() == 0 || s(0) <= 0.0) return 0;
  const double cutoff = rel_tol * s(0);
  Index r = 0;
  while (r < s.size() && s(r) > cutoff) ++r;
  return r;
}

Eigen::BDCSVD<DenseMatrix> thin_svd(const DenseMatrix& m) {
  require_finite(m, "svd input");
  Eigen::BDCSVD<DenseMatrix> dec(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (dec.info() != Eigen::Success) throw NumericalError("SVD did not converge");
  return dec;
}

void normalize_signs(SvdFactorization& f) {
  for (Index j = 0; j < f.right.cols(); ++j) {
    Index arg = 0;
    f.right.col(j).cwiseAbs().maxCoeff(&arg);
    if (f.right(arg, j) < 0.0) {
      f.right.col(j) *= -1.0;
      f.left.col(j) *= -1.0;
    }
  }
}

}  // namespace

double default_rank_tol(const DenseMatrix& m) {
  return static_cast<double>(std::max(m.rows(), m.cols())) * kEps;
}

SvdFactorization svd(const DenseMatrix& m, std::optional<Index> k) {
  const Index min_dim = std::min(m.rows(), m.cols());
  if (k && (*k < 0 || *k > min_dim)) {
    throw ParameterError("svd: k = " + std::to_string(*k) + " exceeds min dimension " +
                         std::to_string(min_dim));
  }
  const auto dec = thin_svd(m);
  const Vector& s = dec.singularValues();
  SvdFactorization f;
  f.rank = rank_from_values(s, default_rank_tol(m));
  const Index keep = k ? *k : f.rank;
  f.left = dec.matrixU().leftCols(keep);
  f.singular_values = s.head(keep);
  f.right = dec.matrixV().leftCols(keep);
  normalize_signs(f);
  return f;
}

Vector singular_values(const DenseMatrix& m) {
  require_finite(m, "svd input");
  Eigen::BDCSVD<DenseMatrix> dec(m);
  if (dec.info() != Eigen::Success) throw NumericalError("SVD did not converge");
  return dec.singularValues();
}

DenseMatrix best_rank_k(const DenseMatrix& m, Index k) {
  if (k < 1) throw ParameterError("best_rank_k: k must be >= 1");
  const auto f = svd(m, k);
  return f.left * f.singular_values.asDiagonal() * f.right.transpose();
}

DenseMatrix pinv(const DenseMatrix& m, double rel_tol) {
  if (m.size() == 0) return DenseMatrix(m.cols(), m.rows());
  const auto dec = thin_svd(m);
  const Vector& s = dec.singularValues();
  const Index r = rank_from_values(s, resolve_tol(m, rel_tol));
  if (r == 0) return DenseMatrix::Zero(m.cols(), m.rows());
  const Vector inv = s.head(r).cwiseInverse();
  return dec.matrixV().leftCols(r) * inv.asDiagonal() * dec.matrixU().leftCols(r).transpose();
}

double norm(const DenseMatrix& m, NormKind kind) {
  require_finite(m, "norm input");
  if (kind == NormKind::frobenius) return m.norm();
  if (m.size() == 0) return 0.0;
  return singular_values(m)(0);
}

Index numeric_rank(const DenseMatrix& m, double rel_tol) {
  if (m.size() == 0) return 0;
  return rank_from_values(singular_values(m), resolve_tol(m, rel_tol));
}

DenseMatrix orthonormal_basis(const DenseMatrix& c) {
  require_finite(c, "column basis input");
  if (c.cols() == 0) return DenseMatrix(c.rows(), 0);
  Eigen::ColPivHouseholderQR<DenseMatrix> qr(c);
  const Index r = qr.rank();
  DenseMatrix q = DenseMatrix::Identity(c.rows(), r);
  q.applyOnTheLeft(qr.householderQ());
  return q;
}

DenseMatrix project_onto_columns(const DenseMatrix& a, const DenseMatrix& c) {
  if (a.rows() != c.rows()) throw ParameterError("project_onto_columns: row counts differ");
  const DenseMatrix q = orthonormal_basis(c);
  const Index block = default_block_cols();
  return kernels::matmul(q, kernels::matmul_tn(q, a, block), block);
}

DenseMatrix project_onto_columns_rank_k(const DenseMatrix& a, const DenseMatrix& c, Index k) {
  if (a.rows() != c.rows()) throw ParameterError("project_onto_columns_rank_k: row counts differ");
  if (k < 1 || k > c.cols()) {
    throw ParameterError("project_onto_columns_rank_k: k = " + std::to_string(k) +
                         " outside [1, " + std::to_string(c.cols()) + "]");
  }
  const DenseMatrix q = orthonormal_basis(c);
  const Index block = default_block_cols();
  const DenseMatrix x = kernels::matmul_tn(q, a, block);
  if (k >= std::min(x.rows(), x.cols())) return kernels::matmul(q, x, block);
  return kernels::matmul(q, best_rank_k(x, k), block);
}

Vector leverage_scores(const DenseMatrix& a, Index k) {
  if (k < 1) throw ParameterError("leverage_scores: k must be >= 1");
  const auto f = svd(a);
  if (k > f.rank) {
    throw ParameterError("leverage_scores: k = " + std::to_string(k) + " exceeds rank " +
                         std::to_string(f.rank));
  }
  return f.right.leftCols(k).rowwise().squaredNorm();
}

double coherence(const DenseMatrix& a, Index k) {
  const Vector l = leverage_scores(a, k);
  return static_cast<double>(a.cols()) / static_cast<double>(k) * l.maxCoeff();
}

DenseMatrix partitioned_pinv(const DenseMatrix& w, const DenseMatrix& a21) {
  const Index c = w.rows();
  if (w.cols() != c) throw ParameterError("partitioned_pinv: W must be square");
  if (a21.rows() > 0 && a21.cols() != c) {
    throw ParameterError("partitioned_pinv: A21 column count must match W");
  }
  if (numeric_rank(w) != c) throw SingularityError("partitioned_pinv: W is singular");

  const Eigen::PartialPivLU<DenseMatrix> lu(w);
  const DenseMatrix w_inv = lu.inverse();
  const Index rest = a21.rows();
  DenseMatrix out(c, c + rest);
  if (rest == 0) {
    out = w_inv;
    return out;
  }
  const DenseMatrix s = a21 * w_inv;
  const DenseMatrix gram = DenseMatrix::Identity(c, c) + s.transpose() * s;
  const DenseMatrix left = w_inv * gram.llt().solve(DenseMatrix::Identity(c, c));
  out.leftCols(c) = left;
  out.rightCols(rest) = left * s.transpose();
  return out;
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b, Index block) {
  return kernels::matmul(a, b, block > 0 ? block : default_block_cols());
}

}  // namespace nystrom
