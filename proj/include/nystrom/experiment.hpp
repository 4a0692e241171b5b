#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "nystrom/nystrom.hpp"
#include "nystrom/samplers.hpp"

namespace nystrom {

// A column sampler paired with an intersection-matrix computation, written
// "sampler:intersection" (intersection defaults to modified_fast).
struct MethodSpec {
  SamplerMethod sampler = SamplerMethod::uniform_adaptive2;
  IntersectionMethod intersection = IntersectionMethod::modified_fast;

  std::string label() const;
  bool operator==(const MethodSpec&) const = default;
};

MethodSpec parse_method_spec(std::string_view s);

struct ExperimentSpec {
  // Free-form description of the input, echoed into reports.
  std::string input;
  Index k = 10;
  std::vector<Index> c_values;
  std::vector<MethodSpec> methods;
  Index repeats = 20;
  std::uint64_t base_seed = 0;
  NormKind norm = NormKind::frobenius;
  double mu = 1.0;
  std::array<double, 3> split{0.25, 0.25, 0.5};
  // Write 0 for every timing so reruns are byte-identical.
  bool zero_timings = false;
  // Dense inputs above this order are refused unless allow_large is set.
  Index dense_cap = 20000;
  bool allow_large = false;
};

// Throws ParameterError unless c_values ascend, each c < m, repeats >= 1,
// k >= 1 and at least one method is given.
void validate(const ExperimentSpec& spec, Index m);

struct CellAggregate {
  std::string method;
  Index c = 0;
  std::size_t trials = 0;
  double min_ratio = 0.0;
  double mean_ratio = 0.0;
  double stdev_ratio = 0.0;
  double mean_sampling_s = 0.0;
  double mean_intersection_s = 0.0;
  std::size_t fallbacks = 0;
};

struct ResultTable {
  ExperimentSpec spec;
  std::vector<TrialRecord> records;
  std::vector<CellAggregate> aggregates;
  // Modified <= standard on the same C, checked for every trial.
  std::size_t dominance_checks = 0;
  std::size_t dominance_violations = 0;
};

// Aggregates per (method, c) in order of first appearance.
std::vector<CellAggregate> aggregate(const std::vector<TrialRecord>& records);

// For every c and sampler, `repeats` draws with seeds base_seed + trial; every
// intersection method listed for that sampler reuses the same columns.
ResultTable run_sweep(const SymmetricMatrix& a, const ExperimentSpec& spec);

struct TimingEntry {
  IntersectionMethod method;
  std::vector<double> seconds;
  double mean_s = 0.0;
  double median_s = 0.0;
};

struct TimingReport {
  Index m = 0;
  Index c = 0;
  bool sparse = false;
  std::size_t nnz = 0;
  std::uint64_t seed = 0;
  std::vector<TimingEntry> entries;
  // |U_fast - U_naive|_F / |U_naive|_F.
  double fast_naive_rel_diff = 0.0;
  bool fallback = false;
  // naive mean / fast mean.
  double speedup = 0.0;
};

// Times standard, modified_naive and modified_fast on one uniformly sampled C.
// Runs are sequential.
TimingReport run_timing_comparison(SymmetricInput a, Index c, Index repeats, std::uint64_t seed);

namespace report {

inline constexpr const char* kCsvHeader =
    "method,c,trial,seed,error_ratio,degenerate,sampling_s,intersection_s,fallback";

std::string to_csv(const std::vector<TrialRecord>& records);
std::vector<TrialRecord> parse_csv(std::string_view text);

std::string to_json(const ResultTable& table);
ResultTable parse_json(std::string_view text);

// Two line charts: min error ratio vs c, mean total time vs c.
std::string to_svg(const ResultTable& table);

std::string timing_to_json(const TimingReport& report);

enum class Format { csv, json, svg };
Format parse_format(std::string_view s);

// Writes the table in `format` to `path`.
void emit(const ResultTable& table, Format format, const std::filesystem::path& path);

void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace report
}  // namespace nystrom
