#include "nystrom/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <json.hpp>

#include "nystrom/error.hpp"
#include "nystrom/experiment.hpp"
#include "nystrom/kernel_builder.hpp"
#include "nystrom/kernels.hpp"
#include "nystrom/linalg.hpp"
#include "nystrom/nystrom.hpp"
#include "nystrom/samplers.hpp"
#include "nystrom/synth.hpp"

namespace nystrom::verify {
namespace {

std::string num(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

double rel(const DenseMatrix& x, const DenseMatrix& y) {
  const double scale = std::max(y.norm(), 1e-300);
  return (x - y).norm() / scale;
}

DenseMatrix random_spsd(Index m, Rng& rng) {
  std::normal_distribution<double> normal;
  DenseMatrix g(m, m);
  for (Index j = 0; j < m; ++j)
    for (Index i = 0; i < m; ++i) g(i, j) = normal(rng);
  return g * g.transpose() / static_cast<double>(m);
}

DenseMatrix random_dense(Index r, Index c, Rng& rng) {
  std::normal_distribution<double> normal;
  DenseMatrix g(r, c);
  for (Index j = 0; j < c; ++j)
    for (Index i = 0; i < r; ++i) g(i, j) = normal(rng);
  return g;
}

DenseMatrix gather_columns(const DenseMatrix& a, const std::vector<Index>& idx) {
  DenseMatrix c(a.rows(), static_cast<Index>(idx.size()));
  for (std::size_t j = 0; j < idx.size(); ++j) c.col(static_cast<Index>(j)) = a.col(idx[j]);
  return c;
}

// Modified error computed independently of the engine.
double brute_modified_sq_error(const DenseMatrix& a, const std::vector<Index>& idx) {
  const DenseMatrix c = gather_columns(a, idx);
  const DenseMatrix cp = Eigen::CompleteOrthogonalDecomposition<DenseMatrix>(c).pseudoInverse();
  const DenseMatrix approx = c * (cp * a * cp.transpose()) * c.transpose();
  return (a - approx).squaredNorm();
}

class Runner {
 public:
  explicit Runner(SuiteReport& r) : report_(r) {}

  void check(const std::string& name, const std::function<std::pair<bool, std::string>()>& body) {
    CheckResult result{name, false, {}};
    try {
      auto [ok, detail] = body();
      result.passed = ok;
      result.detail = std::move(detail);
    } catch (const std::exception& e) {
      result.detail = std::string("exception: ") + e.what();
    }
    report_.checks.push_back(std::move(result));
  }

 private:
  SuiteReport& report_;
};

void core_suite(Runner& run, const VerifyOptions& opt) {
  run.check("pinv_penrose_conditions", [&] {
    Rng rng(opt.seed);
    const DenseMatrix x = random_dense(30, 8, rng) * random_dense(8, 20, rng);
    const DenseMatrix p = pinv(x);
    const double e1 = rel(x * p * x, x), e2 = rel(p * x * p, p);
    const double e3 = rel((x * p).transpose(), x * p), e4 = rel((p * x).transpose(), p * x);
    const double worst = std::max({e1, e2, e3, e4});
    return std::pair{worst <= 1e-10, "max relative violation " + num(worst)};
  });
  run.check("pinv_rank_one_example", [&] {
    DenseMatrix x(2, 2);
    x << 1, 1, 1, 1;
    const double d = (pinv(x) - DenseMatrix::Constant(2, 2, 0.25)).cwiseAbs().maxCoeff();
    return std::pair{d <= 1e-12, "max entry error " + num(d)};
  });
  run.check("svd_reconstruction", [&] {
    Rng rng(opt.seed + 1);
    const DenseMatrix x = random_dense(25, 15, rng);
    const auto f = svd(x);
    const double e = rel(f.left * f.singular_values.asDiagonal() * f.right.transpose(), x);
    return std::pair{e <= 1e-12, "relative error " + num(e)};
  });
  run.check("partitioned_pinv_matches_pinv", [&] {
    Rng rng(opt.seed + 2);
    const DenseMatrix a = random_spsd(40, rng);
    const DenseMatrix w = a.topLeftCorner(6, 6), a21 = a.bottomLeftCorner(34, 6);
    const double e = rel(partitioned_pinv(w, a21), pinv(a.leftCols(6)));
    return std::pair{e <= 1e-8, "relative difference " + num(e)};
  });
  run.check("kernels_match_reference", [&] {
    Rng rng(opt.seed + 3);
    const DenseMatrix x = random_dense(70, 50, rng), y = random_dense(50, 33, rng);
    const double e1 = rel(kernels::matmul(x, y, 16), kernels::reference::matmul(x, y));
    const DenseMatrix pts = random_dense(60, 4, rng);
    const double e2 = rel(kernels::rbf_gram(pts, 0.7), kernels::reference::rbf_gram(pts, 0.7));
    const double worst = std::max(e1, e2);
    return std::pair{worst <= 1e-12, "max relative difference " + num(worst)};
  });
  run.check("sparse_dense_agreement", [&] {
    std::vector<Triplet> t;
    for (Index i = 0; i < 50; ++i) {
      t.push_back({i, i, 2.0 + static_cast<double>(i % 3)});
      if (i >= 3) t.push_back({i, i - 3, 0.5});
    }
    const SparseSymmetric s(50, t);
    Rng rng(opt.seed + 4);
    const DenseMatrix x = random_dense(50, 7, rng);
    const double e = rel(s.multiply(x), s.to_dense() * x);
    return std::pair{e <= 1e-14, "relative difference " + num(e)};
  });
  run.check("theorem_budget_example", [&] {
    const auto b = theorem_budget(10, 0.5, 1.0);
    const bool ok = b.c1 == 271 && b.c2 == 200 && b.c3 == 1884;
    return std::pair{ok, std::to_string(b.c1) + "/" + std::to_string(b.c2) + "/" + std::to_string(b.c3)};
  });
  run.check("samplers_distinct_in_range", [&] {
    Rng gen(opt.seed + 5);
    const SymmetricMatrix a = SymmetricMatrix::symmetrized(random_spsd(80, gen));
    bool ok = true;
    std::string detail = "all samplers ok";
    for (const auto method : {SamplerMethod::uniform, SamplerMethod::adaptive, SamplerMethod::leverage,
                              SamplerMethod::uniform_adaptive2, SamplerMethod::adaptive_full}) {
      SamplerConfig cfg;
      cfg.method = method;
      cfg.k = 5;
      cfg.budget = 20;
      Rng rng(opt.seed);
      const ColumnSet cs = sample_columns(a, cfg, rng);
      std::vector<Index> idx = cs.indices;
      std::sort(idx.begin(), idx.end());
      const bool distinct = std::adjacent_find(idx.begin(), idx.end()) == idx.end();
      const bool in_range = idx.empty() || (idx.front() >= 0 && idx.back() < 80);
      if (!distinct || !in_range || (!cs.early_exit && cs.size() != 20)) {
        ok = false;
        detail = std::string(to_string(method)) + " returned a bad column set";
      }
    }
    return std::pair{ok, detail};
  });
  run.check("adaptive_probabilities_normalised", [&] {
    Rng rng(opt.seed + 6);
    DenseMatrix r = random_dense(20, 12, rng);
    r.col(3).setZero();
    const auto p = adaptive_probabilities(r);
    const double s = p.p.sum();
    const bool ok = std::abs(s - 1.0) <= 1e-12 && p.p(3) == 0.0 && (p.p.array() >= 0.0).all();
    return std::pair{ok, "sum " + num(s)};
  });
  run.check("modified_dominates_standard", [&] {
    Rng gen(opt.seed + 7);
    const SymmetricMatrix a = SymmetricMatrix::symmetrized(random_spsd(100, gen));
    int violations = 0;
    for (std::uint64_t s = 0; s < 10; ++s) {
      Rng rng(opt.seed + s);
      const ColumnSet cs = uniform_sample(100, 12, rng);
      const double st = residual_norm(std::cref(a), approximate(std::cref(a), cs, IntersectionMethod::standard),
                                      NormKind::frobenius);
      const double md = residual_norm(
          std::cref(a), approximate(std::cref(a), cs, IntersectionMethod::modified_naive), NormKind::frobenius);
      if (md > st + 1e-10 * std::max(1.0, st)) ++violations;
    }
    return std::pair{violations == 0, std::to_string(violations) + " violations in 10 draws"};
  });
  run.check("residual_norm_matches_dense", [&] {
    Rng gen(opt.seed + 8);
    const SymmetricMatrix a = SymmetricMatrix::symmetrized(random_spsd(90, gen));
    Rng rng(opt.seed);
    const auto approx = approximate(std::cref(a), uniform_sample(90, 10, rng), IntersectionMethod::modified_naive);
    const double fast = residual_norm(std::cref(a), approx, NormKind::frobenius);
    const double dense = (a.dense() - approx.reconstruct()).norm();
    const double e = std::abs(fast - dense) / dense;
    return std::pair{e <= 1e-10, "relative difference " + num(e)};
  });
}

void exactness_suite(Runner& run, const VerifyOptions& opt) {
  const Index m = 80, r = 10, c = 15;
  run.check("rank_preserving_w_reconstructs", [&] {
    double worst = 0.0;
    for (std::uint64_t t = 0; t < 20; ++t) {
      Rng rng(opt.seed + t);
      const SymmetricMatrix a = synth::gen_low_rank_spsd({m, r, r, c}, rng);
      ColumnSet cs;
      for (Index i = 0; i < c; ++i) cs.indices.push_back(i);
      const double an = a.frobenius_norm();
      for (const auto method : {IntersectionMethod::standard, IntersectionMethod::modified_naive}) {
        worst = std::max(worst, residual_norm(std::cref(a), approximate(std::cref(a), cs, method),
                                              NormKind::frobenius) / an);
      }
    }
    return std::pair{worst <= 1e-8, "worst relative residual " + num(worst)};
  });
  run.check("rank_deficient_w_leaves_residual", [&] {
    double best = std::numeric_limits<double>::infinity();
    for (std::uint64_t t = 0; t < 20; ++t) {
      Rng rng(opt.seed + 100 + t);
      const SymmetricMatrix a = synth::gen_low_rank_spsd({m, r, r - 1, c}, rng);
      ColumnSet cs;
      for (Index i = 0; i < c; ++i) cs.indices.push_back(i);
      best = std::min(best, residual_norm(std::cref(a),
                                          approximate(std::cref(a), cs, IntersectionMethod::modified_naive),
                                          NormKind::frobenius));
    }
    return std::pair{best > 1e-6, "smallest residual " + num(best)};
  });
  run.check("uniform_adaptive2_early_exit_on_exact_rank", [&] {
    Rng gen(opt.seed + 200);
    const SymmetricMatrix a = synth::gen_low_rank_spsd({60, 4, 4, 4}, gen);
    SamplerConfig cfg;
    cfg.k = 4;
    cfg.budget = 40;
    Rng rng(opt.seed);
    const ColumnSet cs = uniform_adaptive2(a, cfg, rng);
    return std::pair{cs.early_exit && cs.size() < 40, "selected " + std::to_string(cs.size()) + " columns"};
  });
}

void fast_path_suite(Runner& run, const VerifyOptions& opt) {
  IntersectionOptions io;
  io.fault_negate_t3 = opt.fault_negate_t3;
  run.check("fast_matches_naive_dense", [&] {
    double worst = 0.0;
    for (std::uint64_t t = 0; t < 10; ++t) {
      Rng gen(opt.seed + t);
      const SymmetricMatrix a = SymmetricMatrix::symmetrized(random_spsd(120, gen));
      const ColumnSet cs = uniform_sample(120, 15, gen);
      const DenseMatrix naive = approximate(std::cref(a), cs, IntersectionMethod::modified_naive).u.dense();
      const auto fast = approximate(std::cref(a), cs, IntersectionMethod::modified_fast, io);
      if (fast.fallback) return std::pair{false, std::string("fast path fell back to naive")};
      worst = std::max(worst, rel(fast.u.dense(), naive));
    }
    return std::pair{worst <= 1e-8, "worst relative difference " + num(worst)};
  });
  run.check("fast_matches_naive_sparse", [&] {
    Rng gen(opt.seed + 50);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const Index m = 300;
    std::vector<Triplet> t;
    for (Index i = 0; i < m; ++i) {
      t.push_back({i, i, static_cast<double>(m) * 0.05 + 1.0});
      for (Index j = 0; j < i; ++j)
        if (unit(gen) < 0.02) t.push_back({i, j, unit(gen) - 0.5});
    }
    const SparseSymmetric a(m, t);
    const ColumnSet cs = uniform_sample(m, 20, gen);
    const DenseMatrix naive = approximate(std::cref(a), cs, IntersectionMethod::modified_naive).u.dense();
    const auto fast = approximate(std::cref(a), cs, IntersectionMethod::modified_fast, io);
    const double e = rel(fast.u.dense(), naive);
    return std::pair{!fast.fallback && e <= 1e-8, "relative difference " + num(e)};
  });
  run.check("fast_two_by_two_example", [&] {
    SymmetricMatrix a(2);
    DenseMatrix d(2, 2);
    d << 1, 2, 2, 8;
    a = SymmetricMatrix::from_lower(d);
    ColumnSet cs;
    cs.indices = {0};
    const double u = approximate(std::cref(a), cs, IntersectionMethod::modified_fast, io).u(0, 0);
    return std::pair{std::abs(u - 1.64) <= 1e-12, "U = " + num(u)};
  });
  run.check("singular_w_falls_back", [&] {
    Rng gen(opt.seed + 60);
    const SymmetricMatrix a = synth::gen_low_rank_spsd({50, 3, 3, 3}, gen);
    ColumnSet cs;
    cs.indices = {0, 1, 2, 3, 4, 5};
    const auto approx = approximate(std::cref(a), cs, IntersectionMethod::modified_fast, io);
    return std::pair{approx.fallback, approx.fallback ? "fallback flagged" : "no fallback"};
  });
}

void adversarial_suite(Runner& run, const VerifyOptions& opt) {
  run.check("residual_identity", [&] {
    double worst = 0.0;
    for (const auto& s : {synth::AdversarialSpec{60, 3, 0.7}, synth::AdversarialSpec{100, 4, 0.5},
                          synth::AdversarialSpec{40, 8, 0.9}}) {
      const Vector sv = singular_values(synth::build_block_adversarial(s).dense());
      const double svd_res = std::sqrt(sv.tail(sv.size() - s.k).squaredNorm());
      worst = std::max(worst, std::abs(svd_res - synth::adversarial_residual_norm(s)));
    }
    return std::pair{worst <= 1e-8, "max abs difference " + num(worst)};
  });
  run.check("single_block_spot_value", [&] {
    const double closed = synth::single_block_modified_error(2, 1, 0.5);
    const DenseMatrix b = synth::build_block_adversarial({2, 1, 0.5}).dense();
    const double brute = brute_modified_sq_error(b, {0});
    const double worst = std::max(std::abs(closed - 0.54), std::abs(brute - 0.54));
    return std::pair{worst <= 1e-10, "closed " + num(closed) + ", brute force " + num(brute)};
  });
  run.check("single_block_grid", [&] {
    double worst = 0.0;
    for (const Index p : {3, 6, 11, 17})
      for (const Index c : {1, 2, 5})
        for (const double alpha : {0.1, 0.5, 0.9}) {
          if (c >= p) continue;
          const DenseMatrix b = synth::build_block_adversarial({p, 1, alpha}).dense();
          std::vector<Index> idx(static_cast<std::size_t>(c));
          for (Index i = 0; i < c; ++i) idx[static_cast<std::size_t>(i)] = i;
          const double brute = brute_modified_sq_error(b, idx);
          const double closed = synth::single_block_modified_error(p, c, alpha);
          worst = std::max(worst, std::abs(closed - brute) / brute);
        }
    return std::pair{worst <= 1e-6, "worst relative difference " + num(worst)};
  });
  run.check("lower_bound_holds", [&] {
    const synth::AdversarialSpec s{100, 4, 0.99};
    const SymmetricMatrix a = synth::build_block_adversarial(s);
    const double lb = synth::lower_bound_value(100, 4, 20, 0.99);
    double best = std::numeric_limits<double>::infinity();
    for (std::uint64_t t = 0; t < 40; ++t) {
      Rng rng(opt.seed + t);
      const auto approx = approximate(std::cref(a), uniform_sample(100, 20, rng), IntersectionMethod::modified_naive);
      const double r = residual_norm(std::cref(a), approx, NormKind::frobenius);
      best = std::min(best, r * r);
    }
    return std::pair{best >= 0.97 * lb, "min error " + num(best) + " vs bound " + num(lb)};
  });
}

void statistical_suite(Runner& run, const VerifyOptions& opt) {
  run.check("uniform_stage_error_event", [&] {
    const Index m = 1000, k = 10;
    const double delta = 0.25, theta = 0.5;
    Rng gen(opt.seed);
    const SymmetricMatrix a = synth::gen_low_coherence_spsd(m, k, gen);
    const DenseMatrix d = a.dense();
    const double mu = coherence(d, k);
    const auto c = static_cast<Index>(std::ceil(mu * static_cast<double>(k) * std::log(k / delta) /
                                                (theta * std::log(theta) - theta + 1.0)));
    if (c > m) return std::pair{false, "required c " + std::to_string(c) + " exceeds m"};
    const Eigen::SelfAdjointEigenSolver<DenseMatrix> es(d, Eigen::EigenvaluesOnly);
    const Vector ev = es.eigenvalues().cwiseAbs();
    std::vector<double> sq(ev.data(), ev.data() + ev.size());
    std::sort(sq.begin(), sq.end());
    double tail = 0.0;
    for (Index i = 0; i < m - k; ++i) tail += sq[static_cast<std::size_t>(i)] * sq[static_cast<std::size_t>(i)];
    const double bound = (1.0 + 1.0 / (delta * theta)) * tail;
    const DenseMatrix a2 = d * d;
    const double a_sq = d.squaredNorm();
    const int trials = 30;
    int hits = 0;
    for (int t = 0; t < trials; ++t) {
      Rng rng(opt.seed + 1000 + static_cast<std::uint64_t>(t));
      const ColumnSet cs = uniform_sample(m, c, rng);
      const DenseMatrix q = orthonormal_basis(gather_columns(d, cs.indices));
      // Top-k squared singular values of Q^T A are the top eigenvalues of Q^T A^2 Q.
      const DenseMatrix g = q.transpose() * a2 * q;
      const Vector top = Eigen::SelfAdjointEigenSolver<DenseMatrix>(g, Eigen::EigenvaluesOnly).eigenvalues();
      const double captured = top.tail(k).sum();
      if (a_sq - captured <= bound) ++hits;
    }
    return std::pair{hits * 10 >= trials * 4, std::to_string(hits) + "/" + std::to_string(trials) +
                                                  " trials inside the bound (c = " + std::to_string(c) + ")"};
  });
  run.check("uniform_adaptive2_monotone_residual", [&] {
    Rng gen(opt.seed + 1);
    const SymmetricMatrix a = SymmetricMatrix::symmetrized(random_spsd(150, gen));
    SamplerConfig cfg;
    cfg.k = 5;
    cfg.budget = 40;
    Rng rng(opt.seed);
    const ColumnSet cs = uniform_adaptive2(a, cfg, rng);
    const DenseMatrix d = a.dense();
    double prev = std::numeric_limits<double>::infinity();
    std::size_t used = 0;
    bool ok = true;
    std::string detail;
    for (const Index s : cs.stage_sizes) {
      used += static_cast<std::size_t>(s);
      const std::vector<Index> prefix(cs.indices.begin(), cs.indices.begin() + static_cast<std::ptrdiff_t>(used));
      const double r = (d - project_onto_columns(d, gather_columns(d, prefix))).norm();
      if (r > prev + 1e-10) ok = false;
      detail += num(r) + " ";
      prev = r;
    }
    return std::pair{ok, "stage residuals " + detail};
  });
  run.check("uniform_adaptive2_beats_uniform_paired", [&] {
    // Clustered RBF kernel: structured enough that where columns land matters.
    Rng gen(opt.seed + 2);
    const SymmetricMatrix a = rbf_kernel(synth::gen_clustered_points(200, 5, 6, 0.08, gen), 0.2);
    int wins = 0;
    const int pairs = 50;
    for (int t = 0; t < pairs; ++t) {
      const std::uint64_t seed = opt.seed + static_cast<std::uint64_t>(t);
      SamplerConfig cfg;
      cfg.k = 10;
      cfg.budget = 40;
      Rng r1(seed), r2(seed);
      const auto ua = approximate(std::cref(a), uniform_adaptive2(a, cfg, r1), IntersectionMethod::modified_naive);
      const auto un = approximate(std::cref(a), uniform_sample(200, 40, r2), IntersectionMethod::modified_naive);
      if (residual_norm(std::cref(a), ua, NormKind::frobenius) <=
          residual_norm(std::cref(a), un, NormKind::frobenius))
        ++wins;
    }
    return std::pair{wins * 10 >= pairs * 7, std::to_string(wins) + "/" + std::to_string(pairs) + " paired wins"};
  });
}

}  // namespace

Suite parse_suite(std::string_view s) {
  if (s == "core") return Suite::core;
  if (s == "exactness") return Suite::exactness;
  if (s == "fast-path" || s == "fast_path") return Suite::fast_path;
  if (s == "adversarial") return Suite::adversarial;
  if (s == "statistical") return Suite::statistical;
  throw ParameterError("unknown verify suite '" + std::string(s) + "'");
}

std::string_view to_string(Suite s) {
  switch (s) {
    case Suite::core: return "core";
    case Suite::exactness: return "exactness";
    case Suite::fast_path: return "fast-path";
    case Suite::adversarial: return "adversarial";
    case Suite::statistical: return "statistical";
  }
  return "?";
}

bool SuiteReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

SuiteReport run_suite(Suite suite, const VerifyOptions& options) {
  SuiteReport report;
  report.suite = suite;
  report.seed = options.seed;
  Runner run(report);
  switch (suite) {
    case Suite::core: core_suite(run, options); break;
    case Suite::exactness: exactness_suite(run, options); break;
    case Suite::fast_path: fast_path_suite(run, options); break;
    case Suite::adversarial: adversarial_suite(run, options); break;
    case Suite::statistical: statistical_suite(run, options); break;
  }
  return report;
}

std::string to_json(const SuiteReport& report) {
  nlohmann::ordered_json checks = nlohmann::ordered_json::array();
  for (const auto& c : report.checks) checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  const nlohmann::ordered_json doc = {{"suite", std::string(to_string(report.suite))},
                              {"seed", report.seed},
                              {"passed", report.passed()},
                              {"checks", checks}};
  return doc.dump(2) + "\n";
}

}  // namespace nystrom::verify
