#include <doctest.h>

#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "../oracles.hpp"
#include "nystrom/linalg.hpp"
#include "nystrom/synth.hpp"

using namespace nystrom;
using namespace nystrom::synth;

namespace {

DenseMatrix block(Index p, double alpha) {
  DenseMatrix b = DenseMatrix::Constant(p, p, alpha);
  b.diagonal().setOnes();
  return b;
}

std::vector<Index> first(Index c) {
  std::vector<Index> v(static_cast<std::size_t>(c));
  std::iota(v.begin(), v.end(), Index{0});
  return v;
}

}  // namespace

TEST_CASE("block adversarial construction") {
  const DenseMatrix a = build_block_adversarial({4, 2, 0.5}).dense();
  DenseMatrix expect = DenseMatrix::Zero(4, 4);
  expect.topLeftCorner(2, 2) = block(2, 0.5);
  expect.bottomRightCorner(2, 2) = block(2, 0.5);
  CHECK(a == expect);

  CHECK(build_block_adversarial({6, 3, 0.0}).dense() == DenseMatrix::Identity(6, 6));

  const DenseMatrix b = build_block_adversarial({30, 3, 0.7}).dense();
  const Vector ev = Eigen::SelfAdjointEigenSolver<DenseMatrix>(b, Eigen::EigenvaluesOnly).eigenvalues();
  CHECK(ev.minCoeff() == doctest::Approx(0.3).epsilon(1e-10));
  CHECK(ev.maxCoeff() == doctest::Approx(1 + 9 * 0.7).epsilon(1e-10));

  CHECK_THROWS_AS(build_block_adversarial({10, 3, 0.5}), ParameterError);
  CHECK_THROWS_AS(build_block_adversarial({10, 2, 1.5}), ParameterError);
  CHECK_THROWS_AS(build_block_adversarial({10, 0, 0.5}), ParameterError);
}

TEST_CASE("adversarial residual norm") {
  CHECK(adversarial_residual_norm({100, 4, 0.5}) == doctest::Approx(0.5 * std::sqrt(96.0)).epsilon(1e-14));
  CHECK(adversarial_residual_norm({100, 4, 0.5}) == doctest::Approx(4.898979).epsilon(1e-6));
  CHECK(adversarial_residual_norm({20, 4, 0.0}) == doctest::Approx(std::sqrt(16.0)));
  for (AdversarialSpec s : {AdversarialSpec{60, 3, 0.7}, AdversarialSpec{40, 8, 0.9}, AdversarialSpec{12, 2, 0.2}}) {
    const double svd = oracle::best_rank_k_error(build_block_adversarial(s).dense(), s.k);
    CHECK(std::abs(adversarial_residual_norm(s) - svd) <= 1e-8);
  }
}

TEST_CASE("single block closed form") {
  CHECK(single_block_modified_error(2, 1, 0.5) == doctest::Approx(0.54).epsilon(1e-12));
  CHECK(std::abs(oracle::modified_sq_error(block(2, 0.5), {0}) - 0.54) <= 1e-10);

  for (Index p : {3, 5, 8, 13})
    for (Index c = 1; c < p; c += 2)
      for (double alpha : {0.1, 0.5, 0.9}) {
        const double closed = single_block_modified_error(p, c, alpha);
        const double brute = oracle::modified_sq_error(block(p, alpha), first(c));
        CHECK(std::abs(closed - brute) <= 1e-6 * std::max(1.0, brute));
      }

  // Near alpha = 0 each unsampled diagonal entry contributes about 1.
  CHECK(std::abs(single_block_modified_error(2, 1, 1e-6) - 1.0) <= 1e-4);

  // Which columns are taken does not matter inside a block.
  const DenseMatrix b = block(7, 0.6);
  const double a1 = oracle::modified_sq_error(b, {0, 1, 2});
  const double a2 = oracle::modified_sq_error(b, {6, 3, 1});
  CHECK(std::abs(a1 - a2) <= 1e-10);

  CHECK_THROWS_AS(single_block_modified_error(3, 3, 0.5), ParameterError);
  CHECK_THROWS_AS(single_block_modified_error(3, 1, 0.0), ParameterError);
}

TEST_CASE("lower bound value") {
  CHECK(lower_bound_value(4, 2, 2, 0.5) == doctest::Approx(1.5));
  CHECK(lower_bound_value(50, 5, 50, 0.3) == 0.0);
  const double r = adversarial_residual_norm({100, 4, 0.99});
  CHECK(lower_bound_value(100, 4, 20, 0.99) == doctest::Approx(80.0 / 96.0 * 1.4 * r * r).epsilon(1e-12));
  CHECK_THROWS_AS(lower_bound_value(10, 5, 4, 0.5), ParameterError);
}

TEST_CASE("low-rank generator") {
  for (Index lbr : {0, 3, 5}) {
    Rng rng(static_cast<std::uint64_t>(lbr));
    const SymmetricMatrix a = gen_low_rank_spsd({50, 5, lbr, 8}, rng);
    CHECK(oracle::rank(a.dense()) == 5);
    CHECK(oracle::rank(a.dense().topLeftCorner(8, 8)) == lbr);
    CHECK(a.dense() == a.dense().transpose());
  }
  Rng rng(1);
  CHECK_THROWS_AS(gen_low_rank_spsd({10, 11, 2, 3}, rng), ParameterError);
  CHECK_THROWS_AS(gen_low_rank_spsd({10, 3, 4, 3}, rng), ParameterError);
  CHECK_THROWS_AS(gen_low_rank_spsd({10, 5, 0, 8}, rng), ParameterError);
}

TEST_CASE("low-coherence generator") {
  Rng rng(3);
  const SymmetricMatrix a = gen_low_coherence_spsd(300, 10, rng);
  const Vector ev = Eigen::SelfAdjointEigenSolver<DenseMatrix>(a.dense(), Eigen::EigenvaluesOnly).eigenvalues();
  CHECK(ev.minCoeff() >= -1e-10);
  CHECK(ev(290) >= 5.0 - 1e-8);
  CHECK(ev(289) < 5.0);
  CHECK(coherence(a.dense(), 10) < 3.0);
}

TEST_CASE("sparse generator") {
  Rng rng(4);
  const SparseSymmetric s = gen_sparse_spsd(500, 0.01, rng);
  const double density = static_cast<double>(s.nnz()) / (500.0 * 500.0);
  CHECK(density == doctest::Approx(0.01 + 1.0 / 500).epsilon(0.1));
  const DenseMatrix d = s.to_dense();
  CHECK(d == d.transpose());
  const Vector ev = Eigen::SelfAdjointEigenSolver<DenseMatrix>(d, Eigen::EigenvaluesOnly).eigenvalues();
  CHECK(ev.minCoeff() > 0.0);

  Rng a(9), b(9);
  CHECK(gen_sparse_spsd(100, 0.05, a).to_dense() == gen_sparse_spsd(100, 0.05, b).to_dense());
  CHECK_THROWS_AS(gen_sparse_spsd(10, 1.5, rng), ParameterError);
}

TEST_CASE("clustered points") {
  Rng rng(5);
  const Dataset d = gen_clustered_points(200, 4, 5, 0.05, rng);
  CHECK(d.instances() == 200);
  CHECK(d.attributes() == 4);
  CHECK(d.values.minCoeff() >= 0.0);
  CHECK(d.values.maxCoeff() <= 1.0);
  CHECK_THROWS_AS(gen_clustered_points(1, 4, 5, 0.05, rng), ParameterError);
}
