#pragma once

// Reference computations used by the tests. Each one takes a different route
// from the library code it checks: explicit loops, JacobiSVD instead of the
// bidiagonal divide-and-conquer SVD, complete orthogonal decompositions
// instead of the partitioned inverse.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using Index = Eigen::Index;

inline Mat gaussian(Index r, Index c, std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Mat g(r, c);
  for (Index j = 0; j < c; ++j)
    for (Index i = 0; i < r; ++i) g(i, j) = n(rng);
  return g;
}

inline Mat random_spsd(Index m, std::mt19937_64& rng) {
  const Mat g = gaussian(m, m, rng);
  Mat a = g * g.transpose() / static_cast<double>(m);
  return 0.5 * (a + a.transpose());
}

inline Mat loop_matmul(const Mat& a, const Mat& b) {
  Mat out = Mat::Zero(a.rows(), b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < b.cols(); ++j) {
      long double s = 0.0L;
      for (Index p = 0; p < a.cols(); ++p) s += static_cast<long double>(a(i, p)) * b(p, j);
      out(i, j) = static_cast<double>(s);
    }
  return out;
}

inline Mat rbf(const Mat& x, double sigma) {
  Mat k(x.rows(), x.rows());
  for (Index i = 0; i < x.rows(); ++i)
    for (Index j = 0; j < x.rows(); ++j) {
      const double d2 = (x.row(i) - x.row(j)).squaredNorm();
      k(i, j) = std::exp(-d2 / (2.0 * sigma * sigma));
    }
  return k;
}

inline Mat jacobi_pinv(const Mat& m) {
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vec s = svd.singularValues();
  const double tol = std::max(m.rows(), m.cols()) * std::numeric_limits<double>::epsilon() * (s.size() ? s(0) : 0.0);
  Vec inv = Vec::Zero(s.size());
  for (Index i = 0; i < s.size(); ++i)
    if (s(i) > tol) inv(i) = 1.0 / s(i);
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

inline Mat gather(const Mat& a, const std::vector<Index>& idx) {
  Mat c(a.rows(), static_cast<Index>(idx.size()));
  for (std::size_t j = 0; j < idx.size(); ++j) c.col(static_cast<Index>(j)) = a.col(idx[j]);
  return c;
}

// C^+ A (C^+)^T via a complete orthogonal decomposition of C.
inline Mat modified_u(const Mat& a, const std::vector<Index>& idx) {
  const Mat c = gather(a, idx);
  const Mat cp = Eigen::CompleteOrthogonalDecomposition<Mat>(c).pseudoInverse();
  return cp * a * cp.transpose();
}

inline Mat standard_u(const Mat& a, const std::vector<Index>& idx) {
  Mat w(static_cast<Index>(idx.size()), static_cast<Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t j = 0; j < idx.size(); ++j) w(static_cast<Index>(i), static_cast<Index>(j)) = a(idx[i], idx[j]);
  return jacobi_pinv(w);
}

inline double modified_sq_error(const Mat& a, const std::vector<Index>& idx) {
  const Mat c = gather(a, idx);
  return (a - c * modified_u(a, idx) * c.transpose()).squaredNorm();
}

inline double standard_sq_error(const Mat& a, const std::vector<Index>& idx) {
  const Mat c = gather(a, idx);
  return (a - c * standard_u(a, idx) * c.transpose()).squaredNorm();
}

// |A - A_k|_F from Jacobi singular values.
inline double best_rank_k_error(const Mat& a, Index k) {
  const Vec s = Eigen::JacobiSVD<Mat>(a).singularValues();
  return std::sqrt(s.tail(s.size() - k).squaredNorm());
}

inline Index rank(const Mat& a, double rel = 1e-10) {
  const Vec s = Eigen::JacobiSVD<Mat>(a).singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  return static_cast<Index>((s.array() > rel * s(0)).count());
}

inline double rel_diff(const Mat& x, const Mat& y) {
  return (x - y).norm() / std::max(y.norm(), 1e-300);
}

}  // namespace oracle
