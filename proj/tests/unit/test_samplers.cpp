#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "../oracles.hpp"
#include "nystrom/linalg.hpp"
#include "nystrom/samplers.hpp"
#include "nystrom/synth.hpp"

using namespace nystrom;

namespace {

SymmetricMatrix spsd(Index m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return SymmetricMatrix::symmetrized(oracle::random_spsd(m, rng));
}

bool distinct_in_range(const ColumnSet& cs, Index m) {
  std::set<Index> seen(cs.indices.begin(), cs.indices.end());
  return seen.size() == cs.indices.size() && (seen.empty() || (*seen.begin() >= 0 && *seen.rbegin() < m));
}

SymmetricMatrix diag(std::initializer_list<double> d) {
  DenseMatrix m = DenseMatrix::Zero(static_cast<Index>(d.size()), static_cast<Index>(d.size()));
  Index i = 0;
  for (double v : d) m(i, i) = v, ++i;
  return SymmetricMatrix::from_lower(m);
}

}  // namespace

TEST_CASE("uniform sampling") {
  Rng rng(1);
  const ColumnSet all = uniform_sample(5, 5, rng);
  std::vector<Index> sorted = all.indices;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == std::vector<Index>{0, 1, 2, 3, 4});

  Rng a(42), b(42);
  CHECK(uniform_sample(100, 10, a).indices == uniform_sample(100, 10, b).indices);
  CHECK_THROWS_AS(uniform_sample(4, 5, rng), ParameterError);
  CHECK_THROWS_AS(uniform_sample(4, 0, rng), ParameterError);

  std::array<int, 4> counts{};
  for (std::uint64_t s = 0; s < 40000; ++s) {
    Rng r(s);
    ++counts[static_cast<std::size_t>(uniform_sample(4, 1, r).indices[0])];
  }
  for (int c : counts) CHECK(std::abs(c / 40000.0 - 0.25) <= 0.01);
}

TEST_CASE("adaptive probabilities") {
  DenseMatrix b = DenseMatrix::Zero(1, 4);
  b << 1, 2, 0, std::sqrt(5.0);
  const auto p = adaptive_probabilities(b);
  CHECK(p.p(0) == doctest::Approx(0.1));
  CHECK(p.p(1) == doctest::Approx(0.4));
  CHECK(p.p(2) == 0.0);
  CHECK(p.p(3) == doctest::Approx(0.5));
  CHECK(std::abs(p.p.sum() - 1.0) <= 1e-12);
  CHECK((adaptive_probabilities(3.0 * b).p - p.p).norm() <= 1e-15);

  DenseMatrix one = DenseMatrix::Zero(3, 3);
  one(1, 2) = 7;
  CHECK(adaptive_probabilities(one).p(2) == 1.0);
  CHECK(adaptive_probabilities(DenseMatrix::Zero(2, 2)).exact);
}

TEST_CASE("adaptive sampling never draws zero-residual columns") {
  const SymmetricMatrix eye = diag({1, 1, 1});
  ColumnSet existing;
  existing.indices = {0};
  for (std::uint64_t s = 0; s < 200; ++s) {
    Rng rng(s);
    const ColumnSet out = adaptive_sample(eye, existing, 1, rng);
    REQUIRE(out.size() == 2);
    CHECK(out.indices[0] == 0);
    CHECK(out.indices[1] != 0);
    CHECK(out.stage_sizes == std::vector<std::size_t>{1, 1});
  }

  const SymmetricMatrix d = diag({1, 2, 0, 0});
  for (std::uint64_t s = 0; s < 50; ++s) {
    Rng rng(s);
    CHECK(adaptive_sample(d, existing, 1, rng).indices[1] == 1);
  }
  Rng rng(0);
  try {
    adaptive_sample(d, existing, 2, rng);
    FAIL("expected ExhaustionError");
  } catch (const ExhaustionError& e) {
    CHECK(e.requested() == 2);
    CHECK(e.drawable() == 1);
  }

  ColumnSet spanning;
  spanning.indices = {0, 1};
  const ColumnSet exact = adaptive_sample(d, spanning, 1, rng);
  CHECK(exact.early_exit);
  CHECK(exact.size() == 2);
}

TEST_CASE("adaptive draws follow residual norms") {
  // Residual squared norms 1 and 3 on the two fresh columns.
  const SymmetricMatrix d = diag({5, 1, std::sqrt(3.0)});
  ColumnSet existing;
  existing.indices = {0};
  int picked2 = 0;
  const int n = 20000;
  for (int s = 0; s < n; ++s) {
    Rng rng(static_cast<std::uint64_t>(s));
    picked2 += adaptive_sample(d, existing, 1, rng).indices[1] == 2;
  }
  CHECK(std::abs(picked2 / static_cast<double>(n) - 0.75) <= 0.015);
}

TEST_CASE("leverage sampling") {
  Vector scores(3);
  scores << 1, 1, 0;
  for (std::uint64_t s = 0; s < 50; ++s) {
    Rng rng(s);
    auto idx = leverage_sample_from_scores(scores, 2, rng).indices;
    std::sort(idx.begin(), idx.end());
    CHECK(idx == std::vector<Index>{0, 1});
  }
  Rng rng(3);
  const ColumnSet padded = leverage_sample_from_scores(scores, 3, rng);
  CHECK(padded.padded);
  CHECK(distinct_in_range(padded, 3));

  const SymmetricMatrix a = spsd(30, 1);
  const ColumnSet all = leverage_sample(a, 5, 30, rng);
  CHECK(all.size() == 30);
  CHECK(distinct_in_range(all, 30));

  // Uniform scores give the uniform law: chi-square over single draws.
  const Vector flat = Vector::Constant(5, 0.2);
  std::array<int, 5> counts{};
  const int n = 25000;
  for (int s = 0; s < n; ++s) {
    Rng r(static_cast<std::uint64_t>(s));
    ++counts[static_cast<std::size_t>(leverage_sample_from_scores(flat, 1, r).indices[0])];
  }
  double chi2 = 0.0;
  for (int c : counts) chi2 += (c - n / 5.0) * (c - n / 5.0) / (n / 5.0);
  CHECK(chi2 < 18.47);  // 99.9% quantile, 4 degrees of freedom
}

TEST_CASE("theorem budget") {
  const StageBudget b = theorem_budget(10, 0.5, 1.0);
  CHECK(b.c1 == 271);
  CHECK(b.c2 == 200);
  CHECK(b.c3 == 1884);

  // 8.7 ln(sqrt 5) = 7.0011..., so the ceiling is 8 and c3 = 2 (8 + 10).
  const StageBudget one = theorem_budget(1, 1.0, 1.0);
  CHECK(8.7 * std::log(std::sqrt(5.0)) > 7.0);
  CHECK(one.c1 == 8);
  CHECK(one.c2 == 10);
  CHECK(one.c3 == 36);

  for (double eps : {0.3, 0.5, 0.9, 1.0}) {
    const StageBudget s = theorem_budget(7, eps, 2.0);
    CHECK(s.c3 == static_cast<Index>(std::ceil(2.0 / eps * static_cast<double>(s.c1 + s.c2))));
  }
  CHECK_THROWS_AS(theorem_budget(0, 1.0, 1.0), ParameterError);
  CHECK_THROWS_AS(theorem_budget(3, 0.0, 1.0), ParameterError);
  CHECK_THROWS_AS(theorem_budget(3, 1.5, 1.0), ParameterError);
}

TEST_CASE("budget split") {
  const StageBudget b = split_budget(100, {0.25, 0.25, 0.5});
  CHECK(b.c1 == 25);
  CHECK(b.c2 == 25);
  CHECK(b.c3 == 50);
  const StageBudget odd = split_budget(10, {0.25, 0.25, 0.5});
  CHECK(odd.total() == 10);
  CHECK(odd.c1 == 3);
}

TEST_CASE("uniform+adaptive2 bookkeeping and residual monotonicity") {
  const SymmetricMatrix a = spsd(120, 2);
  SamplerConfig cfg;
  cfg.k = 5;
  cfg.budget = 40;
  for (std::uint64_t s = 0; s < 5; ++s) {
    Rng rng(s);
    const ColumnSet cs = uniform_adaptive2(a, cfg, rng);
    CHECK(cs.size() == 40);
    CHECK(distinct_in_range(cs, 120));
    REQUIRE(cs.stage_sizes.size() == 3);
    CHECK(cs.stage_sizes[0] + cs.stage_sizes[1] + cs.stage_sizes[2] == cs.size());
    CHECK(cs.stage_sizes == std::vector<std::size_t>{10, 10, 20});

    double prev = std::numeric_limits<double>::infinity();
    std::size_t used = 0;
    for (std::size_t st : cs.stage_sizes) {
      used += st;
      const std::vector<Index> prefix(cs.indices.begin(), cs.indices.begin() + static_cast<std::ptrdiff_t>(used));
      const double r = (a.dense() - project_onto_columns(a.dense(), oracle::gather(a.dense(), prefix))).norm();
      CHECK(r <= prev + 1e-10);
      prev = r;
    }
  }
  Rng x(9), y(9);
  CHECK(uniform_adaptive2(a, cfg, x).indices == uniform_adaptive2(a, cfg, y).indices);
}

TEST_CASE("uniform+adaptive2 exits early on exactly low-rank input") {
  Rng gen(3);
  const SymmetricMatrix a = synth::gen_low_rank_spsd({80, 3, 3, 3}, gen);
  SamplerConfig cfg;
  cfg.k = 3;
  cfg.budget = 40;
  Rng rng(0);
  const ColumnSet cs = uniform_adaptive2(a, cfg, rng);
  CHECK(cs.early_exit);
  CHECK(cs.size() < 40);
  CHECK(cs.stage_sizes.size() == 3);
}

TEST_CASE("uniform+adaptive2 clamps oversized stages") {
  const SymmetricMatrix a = spsd(30, 4);
  SamplerConfig cfg;
  cfg.k = 2;  // theorem budget far exceeds m = 30
  Rng rng(0);
  const ColumnSet cs = uniform_adaptive2(a, cfg, rng);
  CHECK(cs.clamped);
  CHECK(cs.size() <= 30);
  CHECK(distinct_in_range(cs, 30));
}

TEST_CASE("adaptive full stage sizes") {
  const SymmetricMatrix a = spsd(60, 5);
  Rng r1(0), r2(0), r3(0);
  CHECK(adaptive_full(a, 9, r1).stage_sizes == std::vector<std::size_t>{3, 3, 3});
  const ColumnSet ten = adaptive_full(a, 10, r2);
  CHECK(ten.stage_sizes == std::vector<std::size_t>{3, 3, 4});
  CHECK(adaptive_full(a, 10, r3).indices == ten.indices);
  CHECK_THROWS_AS(adaptive_full(a, 2, r1), ParameterError);
}

TEST_CASE("every sampler returns distinct in-range columns of the requested size") {
  const SymmetricMatrix a = spsd(70, 6);
  for (auto method : {SamplerMethod::uniform, SamplerMethod::adaptive, SamplerMethod::leverage,
                      SamplerMethod::uniform_adaptive2, SamplerMethod::adaptive_full}) {
    SamplerConfig cfg;
    cfg.method = method;
    cfg.k = 5;
    cfg.budget = 21;
    for (std::uint64_t s = 0; s < 5; ++s) {
      Rng rng(s);
      const ColumnSet cs = sample_columns(a, cfg, rng);
      CHECK(cs.size() == 21);
      CHECK(distinct_in_range(cs, 70));
    }
  }
  SamplerConfig nobudget;
  nobudget.method = SamplerMethod::uniform;
  Rng rng(0);
  CHECK_THROWS_AS(sample_columns(a, nobudget, rng), ParameterError);
}

TEST_CASE("sampler config text round trip") {
  SamplerConfig cfg;
  cfg.method = SamplerMethod::leverage;
  cfg.k = 20;
  cfg.epsilon = 0.3;
  cfg.mu = 0.5;
  cfg.budget = 150;
  cfg.split = {0.2, 0.3, 0.5};
  cfg.delta = 0.1;
  cfg.theta = 0.7;
  cfg.seed = 123456789012345ULL;
  const SamplerConfig back = parse_sampler_config(to_config_text(cfg));
  CHECK(back.method == cfg.method);
  CHECK(back.k == cfg.k);
  CHECK(back.epsilon == cfg.epsilon);
  CHECK(back.mu == cfg.mu);
  CHECK(back.budget == cfg.budget);
  CHECK(back.split == cfg.split);
  CHECK(back.delta == cfg.delta);
  CHECK(back.theta == cfg.theta);
  CHECK(back.seed == cfg.seed);

  const SamplerConfig parsed = parse_sampler_config("# comment\nmethod = uniform\n\nk=3\n");
  CHECK(parsed.method == SamplerMethod::uniform);
  CHECK(parsed.k == 3);
  CHECK(!parsed.budget);
  CHECK_THROWS_AS(parse_sampler_config("colour = blue\n"), FormatError);
  CHECK_THROWS_AS(parse_sampler_config("k = ten\n"), FormatError);
  CHECK_THROWS_AS(parse_sampler_config("epsilon = 2\n"), ParameterError);
  CHECK_THROWS_AS(parse_sampler_config("split = 0.5, 0.5, 0.5\n"), ParameterError);
}
