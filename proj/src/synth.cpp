#include "nystrom/synth.hpp"

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/QR>

#include "nystrom/linalg.hpp"

namespace nystrom::synth {

void validate(const AdversarialSpec& spec) {
  if (spec.m < 1 || spec.k < 1) throw ParameterError("adversarial spec: m and k must be >= 1");
  if (spec.m % spec.k != 0) {
    throw ParameterError("adversarial spec: k = " + std::to_string(spec.k) + " does not divide m = " +
                         std::to_string(spec.m));
  }
  if (!(spec.alpha >= 0.0 && spec.alpha < 1.0)) throw ParameterError("adversarial spec: alpha must lie in [0, 1)");
}

SymmetricMatrix build_block_adversarial(const AdversarialSpec& spec) {
  validate(spec);
  const Index p = spec.m / spec.k;
  return SymmetricMatrix::generate(spec.m, [&](Index i, Index j) {
    if (i == j) return 1.0;
    return i / p == j / p ? spec.alpha : 0.0;
  });
}

double adversarial_residual_norm(const AdversarialSpec& spec) {
  validate(spec);
  return (1.0 - spec.alpha) * std::sqrt(static_cast<double>(spec.m - spec.k));
}

double single_block_modified_error(Index p, Index c, double alpha) {
  if (c < 1 || c >= p) throw ParameterError("single_block_modified_error: need 1 <= c < p");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ParameterError("single_block_modified_error: alpha must lie in (0, 1)");
  const double m = static_cast<double>(p);
  const double cc = static_cast<double>(c);
  const double a = alpha;

  // Numerator polynomial in alpha, coefficients grouped by power.
  const double n4 = cc * cc * m * m - 4 * cc * cc * m + 4 * cc * cc + 2 * cc * m * m - 4 * cc * m + cc + m - 1;
  const double n3 = 4 * cc * cc * m - 8 * cc * cc + 2 * cc * m + 2 * cc - 2 * m + 2;
  const double n2 = 4 * cc * cc + 2 * cc * m - 7 * cc + m;
  const double n1 = 4 * cc - 2;
  const double n0 = 1;
  const double num = (((n4 * a + n3) * a + n2) * a + n1) * a + n0;

  const double d2 = cc * m - 2 * cc + 1;
  const double d1 = 2 * cc - 2;
  const double den = (d2 * a + d1) * a + 1;

  return (m - cc) * (a - 1) * (a - 1) * num / (den * den);
}

double lower_bound_value(Index m, Index k, Index c, double alpha) {
  if (k < 1 || c < k || c > m) throw ParameterError("lower_bound_value: need 1 <= k <= c <= m");
  if (!(alpha >= 0.0 && alpha < 1.0)) throw ParameterError("lower_bound_value: alpha must lie in [0, 1)");
  if (c == m) return 0.0;
  const double md = static_cast<double>(m);
  const double kd = static_cast<double>(k);
  const double cd = static_cast<double>(c);
  const double residual_sq = (1.0 - alpha) * (1.0 - alpha) * (md - kd);
  return (md - cd) / (md - kd) * (1.0 + 2.0 * kd / cd) * residual_sq;
}

SymmetricMatrix gen_low_rank_spsd(const LowRankSpec& spec, Rng& rng) {
  const auto [m, r, lbr, c] = spec;
  if (m < 1 || r < 1 || r > m) throw ParameterError("gen_low_rank_spsd: need 1 <= r <= m");
  if (c < 1 || c > m) throw ParameterError("gen_low_rank_spsd: need 1 <= c <= m");
  if (lbr < 0 || lbr > std::min(r, c)) throw ParameterError("gen_low_rank_spsd: leading block rank exceeds min(r, c)");
  const Index zeroed = lbr < std::min(r, c) ? c - lbr : 0;
  if (m - zeroed < r) throw ParameterError("gen_low_rank_spsd: too few nonzero rows left for rank r");

  std::normal_distribution<double> normal(0.0, 1.0);
  DenseMatrix g(m, r);
  for (Index j = 0; j < r; ++j)
    for (Index i = 0; i < m; ++i) g(i, j) = normal(rng);
  // Zero the trailing rows of the leading block.
  for (Index i = c - zeroed; i < c; ++i) g.row(i).setZero();
  return SymmetricMatrix::from_lower(matmul(g, g.transpose()));
}

SymmetricMatrix gen_low_coherence_spsd(Index m, Index k, Rng& rng) {
  if (k < 1 || k >= m) throw ParameterError("gen_low_coherence_spsd: need 1 <= k < m");
  std::normal_distribution<double> normal(0.0, 1.0);
  DenseMatrix g(m, m);
  for (Index j = 0; j < m; ++j)
    for (Index i = 0; i < m; ++i) g(i, j) = normal(rng);
  Eigen::HouseholderQR<DenseMatrix> qr(g);
  DenseMatrix q = qr.householderQ();
  // Sign fix on R's diagonal makes Q Haar distributed.
  const DenseMatrix& r = qr.matrixQR();
  for (Index j = 0; j < m; ++j)
    if (r(j, j) < 0.0) q.col(j) *= -1.0;

  Vector lambda(m);
  for (Index i = 0; i < k; ++i) {
    lambda(i) = k == 1 ? 10.0 : 10.0 - 5.0 * static_cast<double>(i) / static_cast<double>(k - 1);
  }
  for (Index i = k; i < m; ++i) lambda(i) = 0.5 * std::exp(-static_cast<double>(i - k) / 100.0);
  const DenseMatrix scaled = q * lambda.asDiagonal();
  return SymmetricMatrix::symmetrized(matmul(scaled, q.transpose()));
}

SparseSymmetric gen_sparse_spsd(Index m, double density, Rng& rng) {
  if (m < 1) throw ParameterError("gen_sparse_spsd: m must be >= 1");
  if (!(density >= 0.0 && density <= 1.0)) throw ParameterError("gen_sparse_spsd: density must lie in [0, 1]");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> value(-1.0, 1.0);
  std::vector<Triplet> lower;
  Vector row_abs = Vector::Zero(m);
  // Geometric skips keep generation linear in nnz rather than m^2.
  const double log_q = density < 1.0 ? std::log1p(-density) : 0.0;
  for (Index i = 1; i < m; ++i) {
    Index j = -1;
    while (density > 0.0) {
      j += density < 1.0 ? 1 + static_cast<Index>(std::floor(std::log(1.0 - unit(rng)) / log_q)) : 1;
      if (j >= i) break;
      double v = value(rng);
      if (v == 0.0) v = 0.5;
      lower.push_back({i, j, v});
      row_abs(i) += std::abs(v);
      row_abs(j) += std::abs(v);
    }
  }
  for (Index i = 0; i < m; ++i) lower.push_back({i, i, row_abs(i) + 1.0});
  return SparseSymmetric(m, std::move(lower));
}

Dataset gen_clustered_points(Index m, Index d, Index clusters, double spread, Rng& rng) {
  if (m < 2 || d < 1 || clusters < 1) throw ParameterError("gen_clustered_points: bad shape");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<Index> label(0, clusters - 1);
  std::normal_distribution<double> normal(0.0, spread);
  DenseMatrix centres(clusters, d);
  for (Index i = 0; i < clusters; ++i)
    for (Index j = 0; j < d; ++j) centres(i, j) = unit(rng);
  Dataset data;
  data.values.resize(m, d);
  for (Index i = 0; i < m; ++i) {
    const Index l = label(rng);
    for (Index j = 0; j < d; ++j) data.values(i, j) = centres(l, j) + normal(rng);
  }
  normalize(data, Normalization::minmax);
  return data;
}

}  // namespace nystrom::synth
