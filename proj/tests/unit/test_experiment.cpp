#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>

#include "../oracles.hpp"
#include "nystrom/experiment.hpp"
#include "nystrom/synth.hpp"
#include "nystrom/verify.hpp"

using namespace nystrom;

namespace {

SymmetricMatrix spsd(Index m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return SymmetricMatrix::symmetrized(oracle::random_spsd(m, rng));
}

ExperimentSpec small_spec() {
  ExperimentSpec s;
  s.input = "test";
  s.k = 3;
  s.c_values = {8, 12};
  s.methods = {parse_method_spec("uniform"), parse_method_spec("uniform:standard"),
               parse_method_spec("uniform_adaptive2")};
  s.repeats = 4;
  s.base_seed = 11;
  s.zero_timings = true;
  return s;
}

}  // namespace

TEST_CASE("method spec parsing") {
  const MethodSpec a = parse_method_spec("uniform");
  CHECK(a.sampler == SamplerMethod::uniform);
  CHECK(a.intersection == IntersectionMethod::modified_fast);
  const MethodSpec b = parse_method_spec("leverage:standard");
  CHECK(b.sampler == SamplerMethod::leverage);
  CHECK(b.intersection == IntersectionMethod::standard);
  CHECK(parse_method_spec(b.label()) == b);
  CHECK_THROWS_AS(parse_method_spec("random"), ParameterError);
  CHECK_THROWS_AS(parse_method_spec("uniform:cur"), ParameterError);
}

TEST_CASE("experiment validation") {
  ExperimentSpec s = small_spec();
  CHECK_NOTHROW(validate(s, 40));
  ExperimentSpec bad = s;
  bad.c_values = {12, 8};
  CHECK_THROWS_AS(validate(bad, 40), ParameterError);
  bad = s;
  bad.c_values = {8, 40};
  CHECK_THROWS_AS(validate(bad, 40), ParameterError);
  bad = s;
  bad.repeats = 0;
  CHECK_THROWS_AS(validate(bad, 40), ParameterError);
  bad = s;
  bad.k = 0;
  CHECK_THROWS_AS(validate(bad, 40), ParameterError);
  bad = s;
  bad.methods.clear();
  CHECK_THROWS_AS(validate(bad, 40), ParameterError);
  bad = s;
  bad.dense_cap = 30;
  CHECK_THROWS_AS(validate(bad, 40), ParameterError);
  bad.allow_large = true;
  CHECK_NOTHROW(validate(bad, 40));
}

TEST_CASE("sweep records and aggregates") {
  const SymmetricMatrix a = spsd(40, 1);
  const ExperimentSpec spec = small_spec();
  const ResultTable t = run_sweep(a, spec);
  REQUIRE(t.records.size() == 2 * 3 * 4);
  CHECK(t.aggregates.size() == 6);
  CHECK(t.dominance_violations == 0);
  CHECK(t.dominance_checks >= 2 * 4);

  // Records come out c-major, then method, then trial.
  CHECK(t.records[0].c == 8);
  CHECK(t.records[0].method == "uniform:modified_fast");
  CHECK(t.records[4].method == "uniform:standard");
  CHECK(t.records[12].c == 12);
  for (std::size_t i = 0; i < 4; ++i) CHECK(t.records[i].seed == 11 + i);

  // Same draw for both uniform intersections: modified wins trial by trial.
  for (std::size_t i = 0; i < 4; ++i) CHECK(t.records[i].error_ratio <= t.records[4 + i].error_ratio + 1e-10);

  const auto again = aggregate(t.records);
  REQUIRE(again.size() == t.aggregates.size());
  for (std::size_t j = 0; j < again.size(); ++j) {
    const CellAggregate& g = t.aggregates[j];
    double mn = 1e300, sum = 0;
    for (const auto& r : t.records)
      if (r.method == g.method && r.c == g.c) mn = std::min(mn, r.error_ratio), sum += r.error_ratio;
    CHECK(g.min_ratio == mn);
    CHECK(g.mean_ratio == doctest::Approx(sum / 4));
    CHECK(g.trials == 4);
    CHECK(again[j].stdev_ratio == doctest::Approx(g.stdev_ratio));
  }
}

TEST_CASE("single repeat gives one record per cell") {
  ExperimentSpec s = small_spec();
  s.repeats = 1;
  s.c_values = {10};
  s.methods = {parse_method_spec("uniform")};
  const ResultTable t = run_sweep(spsd(30, 2), s);
  CHECK(t.records.size() == 1);
  CHECK(t.aggregates[0].stdev_ratio == 0.0);
  CHECK(t.aggregates[0].min_ratio == t.records[0].error_ratio);
}

TEST_CASE("sweep is deterministic with zeroed timings") {
  const SymmetricMatrix a = spsd(50, 3);
  const ExperimentSpec s = small_spec();
  const std::string x = report::to_csv(run_sweep(a, s).records);
  const std::string y = report::to_csv(run_sweep(a, s).records);
  CHECK(x == y);
  CHECK(x.find(",0,0,") != std::string::npos);
}

TEST_CASE("report formats") {
  CHECK(report::to_csv({}) == std::string(report::kCsvHeader) + "\n");
  CHECK(report::parse_csv(report::to_csv({})).empty());

  const ResultTable t = run_sweep(spsd(40, 4), small_spec());
  const auto back = report::parse_csv(report::to_csv(t.records));
  REQUIRE(back.size() == t.records.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].method == t.records[i].method);
    CHECK(back[i].error_ratio == t.records[i].error_ratio);
    CHECK(back[i].seed == t.records[i].seed);
  }

  const ResultTable j = report::parse_json(report::to_json(t));
  CHECK(j.records.size() == t.records.size());
  CHECK(j.aggregates.size() == t.aggregates.size());
  CHECK(j.spec.k == 3);
  CHECK(j.dominance_checks == t.dominance_checks);
  CHECK(report::to_csv(j.records) == report::to_csv(t.records));

  const std::string svg = report::to_svg(t);
  CHECK(svg.rfind("<?xml", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);

  CHECK_THROWS_AS(report::parse_csv("method,c\nx,1\n"), FormatError);
  CHECK_THROWS_AS(report::parse_format("xml"), ParameterError);
  CHECK_THROWS_AS(report::write_text("/nonexistent/dir/out.csv", "x"), IoError);
}

TEST_CASE("timing comparison") {
  Rng rng(1);
  const SparseSymmetric s = synth::gen_sparse_spsd(400, 0.02, rng);
  const TimingReport r = run_timing_comparison(std::cref(s), 20, 2, 5);
  CHECK(r.entries.size() == 3);
  CHECK(r.sparse);
  CHECK(r.fast_naive_rel_diff <= 1e-8);
  CHECK(!r.fallback);
  for (const auto& e : r.entries) CHECK(e.seconds.size() == 2);
  CHECK(report::timing_to_json(r).find("speedup") != std::string::npos);
}

TEST_CASE("verification suites") {
  for (auto suite : {verify::Suite::core, verify::Suite::exactness, verify::Suite::fast_path,
                     verify::Suite::adversarial}) {
    const verify::SuiteReport r = verify::run_suite(suite, {});
    CHECK_MESSAGE(r.passed(), verify::to_string(suite));
  }
  verify::VerifyOptions faulty;
  faulty.fault_negate_t3 = true;
  const verify::SuiteReport bad = verify::run_suite(verify::Suite::fast_path, faulty);
  CHECK(!bad.passed());
  CHECK(verify::parse_suite("fast-path") == verify::Suite::fast_path);
}
