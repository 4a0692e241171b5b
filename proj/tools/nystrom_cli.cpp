#include <charconv>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include "nystrom/error.hpp"
#include "nystrom/experiment.hpp"
#include "nystrom/kernel_builder.hpp"
#include "nystrom/matrix_io.hpp"
#include "nystrom/nystrom.hpp"
#include "nystrom/samplers.hpp"
#include "nystrom/synth.hpp"
#include "nystrom/verify.hpp"

namespace fs = std::filesystem;
using namespace nystrom;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitVerify = 3;

struct Options {
  std::string input;
  std::string format;
  std::optional<double> sigma;
  std::string normalize = "minmax";
  Index k = 10;
  std::vector<Index> c;
  double epsilon = 1.0;
  double mu = 1.0;
  std::vector<std::string> method;
  Index repeats = 20;
  std::uint64_t seed = 0;
  std::string out;
  std::optional<double> sparsify;
  bool force_naive = false;
  bool zero_timings = false;
  bool csv_header = false;
  bool allow_large = false;
  // synth adversarial
  Index m = 0;
  double alpha = 0.0;
  std::string suite;
  bool fault_negate_t3 = false;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string::npos) return out;
    start = pos + 1;
  }
}

template <typename T>
T parse_number(const std::string& s, const char* what) {
  T v{};
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    throw ParameterError(std::string("bad ") + what + " '" + s + "'");
  }
  return v;
}

// --input forms: a matrix file, a dataset (when --sigma is given), or
// synth:adversarial:m:k:alpha / synth:sparse:m:density.
io::AnyMatrix load_input(const Options& o) {
  if (o.input.empty()) throw ParameterError("--input is required");
  if (o.input.rfind("synth:", 0) == 0) {
    const auto parts = split(o.input, ':');
    if (parts.size() == 5 && parts[1] == "adversarial") {
      return synth::build_block_adversarial({parse_number<Index>(parts[2], "m"), parse_number<Index>(parts[3], "k"),
                                             parse_number<double>(parts[4], "alpha")});
    }
    if (parts.size() == 4 && parts[1] == "sparse") {
      Rng rng(o.seed);
      return synth::gen_sparse_spsd(parse_number<Index>(parts[2], "m"), parse_number<double>(parts[3], "density"),
                                    rng);
    }
    throw ParameterError("unrecognised synthetic input '" + o.input + "'");
  }
  if (o.sigma) {
    const DatasetFormat fmt = o.format.empty() ? DatasetFormat::csv : parse_dataset_format(o.format);
    CsvOptions csv;
    csv.header = o.csv_header;
    const Dataset data = load_dataset(o.input, fmt, parse_normalization(o.normalize), csv);
    return rbf_kernel(data, *o.sigma);
  }
  return io::load_symmetric(o.input);
}

SymmetricMatrix densify(io::AnyMatrix m) {
  if (auto* d = std::get_if<SymmetricMatrix>(&m)) return std::move(*d);
  return SymmetricMatrix::from_lower(std::get<SparseSymmetric>(m).to_dense());
}

SymmetricInput as_input(const io::AnyMatrix& m) {
  if (const auto* d = std::get_if<SymmetricMatrix>(&m)) return std::cref(*d);
  return std::cref(std::get<SparseSymmetric>(m));
}

IntersectionMethod maybe_naive(IntersectionMethod m, bool force_naive) {
  return force_naive && m == IntersectionMethod::modified_fast ? IntersectionMethod::modified_naive : m;
}

int cmd_kernel_build(const Options& o) {
  if (!o.sigma) throw ParameterError("kernel build needs --sigma");
  if (o.out.empty()) throw ParameterError("kernel build needs --out");
  const DatasetFormat fmt = o.format.empty() ? DatasetFormat::csv : parse_dataset_format(o.format);
  CsvOptions csv;
  csv.header = o.csv_header;
  const Dataset data = load_dataset(o.input, fmt, parse_normalization(o.normalize), csv);
  SymmetricMatrix k = rbf_kernel(data, *o.sigma);
  nlohmann::ordered_json summary = {{"instances", data.instances()}, {"attributes", data.attributes()},
                            {"sigma", *o.sigma}, {"normalization", std::string(to_string(data.normalization))}};
  if (o.sparsify) {
    SparsifyResult s = sparsify(k, *o.sparsify);
    summary["nnz"] = s.matrix.nnz();
    summary["diagonal_forced"] = s.diagonal_forced;
    io::save(o.out, std::move(s.matrix));
  } else {
    io::save(o.out, std::move(k));
  }
  std::cout << summary.dump(2) << '\n';
  return kExitOk;
}

int cmd_approx_run(const Options& o) {
  const io::AnyMatrix a = load_input(o);
  const MethodSpec ms = parse_method_spec(o.method.empty() ? "uniform_adaptive2" : o.method.front());
  if (o.c.size() > 1) throw ParameterError("approx run takes a single --c");

  SamplerConfig cfg;
  cfg.method = ms.sampler;
  cfg.k = o.k;
  cfg.epsilon = o.epsilon;
  cfg.mu = o.mu;
  cfg.seed = o.seed;
  if (!o.c.empty()) cfg.budget = o.c.front();
  validate(cfg);

  // Samplers need dense access; sparse inputs are densified for sampling only.
  const SymmetricMatrix* dense = std::get_if<SymmetricMatrix>(&a);
  std::optional<SymmetricMatrix> tmp;
  if (!dense) dense = &tmp.emplace(SymmetricMatrix::from_lower(std::get<SparseSymmetric>(a).to_dense()));

  Rng rng(o.seed);
  const ColumnSet cols = sample_columns(*dense, cfg, rng);
  NystromApproximation approx = approximate(as_input(a), cols, maybe_naive(ms.intersection, o.force_naive));
  approx.seed = o.seed;
  const ErrorRatio ratio = error_ratio(as_input(a), approx, o.k, NormKind::frobenius);

  nlohmann::ordered_json summary = {{"method", MethodSpec{ms.sampler, approx.method}.label()},
                            {"m", approx.order()},
                            {"c", cols.size()},
                            {"stage_sizes", cols.stage_sizes},
                            {"early_exit", cols.early_exit},
                            {"seed", o.seed},
                            {"error_ratio", ratio.value},
                            {"degenerate", ratio.degenerate},
                            {"fallback", approx.fallback}};
  if (!o.out.empty()) {
    write_approximation(fs::path(o.out), approx);
    summary["out"] = o.out;
  }
  std::cout << summary.dump(2) << '\n';
  return kExitOk;
}

int cmd_bench_sweep(const Options& o) {
  if (o.c.empty()) throw ParameterError("bench sweep needs --c");
  const SymmetricMatrix a = densify(load_input(o));
  ExperimentSpec spec;
  spec.input = o.input;
  spec.k = o.k;
  spec.c_values = o.c;
  spec.repeats = o.repeats;
  spec.base_seed = o.seed;
  spec.mu = o.mu;
  spec.zero_timings = o.zero_timings;
  spec.allow_large = o.allow_large;
  const std::vector<std::string> methods =
      o.method.empty() ? std::vector<std::string>{"uniform", "uniform_adaptive2"} : o.method;
  for (const auto& m : methods) {
    MethodSpec ms = parse_method_spec(m);
    ms.intersection = maybe_naive(ms.intersection, o.force_naive);
    spec.methods.push_back(ms);
  }
  const ResultTable table = run_sweep(a, spec);

  report::Format fmt = report::Format::csv;
  if (!o.format.empty()) {
    fmt = report::parse_format(o.format);
  } else if (!o.out.empty()) {
    const auto ext = fs::path(o.out).extension().string();
    if (ext == ".json") fmt = report::Format::json;
    if (ext == ".svg") fmt = report::Format::svg;
  }
  if (o.out.empty()) {
    std::cout << (fmt == report::Format::json  ? report::to_json(table)
                  : fmt == report::Format::svg ? report::to_svg(table)
                                               : report::to_csv(table.records));
  } else {
    report::emit(table, fmt, o.out);
  }
  if (table.dominance_violations > 0) {
    spdlog::error("{} dominance violations in {} checks", table.dominance_violations, table.dominance_checks);
    return kExitVerify;
  }
  return kExitOk;
}

int cmd_bench_timing(const Options& o) {
  const io::AnyMatrix a = load_input(o);
  if (o.c.size() != 1) throw ParameterError("bench timing needs exactly one --c");
  const TimingReport r = run_timing_comparison(as_input(a), o.c.front(), o.repeats, o.seed);
  const std::string text = report::timing_to_json(r);
  if (o.out.empty()) {
    std::cout << text;
  } else {
    report::write_text(o.out, text);
  }
  return kExitOk;
}

int cmd_verify(const Options& o) {
  const verify::Suite suite = verify::parse_suite(o.suite);
  verify::VerifyOptions vo;
  vo.seed = o.seed;
  vo.fault_negate_t3 = o.fault_negate_t3;
  const verify::SuiteReport r = verify::run_suite(suite, vo);
  for (const auto& c : r.checks) {
    std::cerr << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
  }
  const std::string json = verify::to_json(r);
  if (o.out.empty()) {
    std::cout << json;
  } else {
    report::write_text(o.out, json);
  }
  return r.passed() ? kExitOk : kExitVerify;
}

int cmd_synth_adversarial(const Options& o) {
  if (o.out.empty()) throw ParameterError("synth adversarial needs --out");
  const SymmetricMatrix a = synth::build_block_adversarial({o.m, o.k, o.alpha});
  io::save(o.out, a);
  const synth::AdversarialSpec spec{o.m, o.k, o.alpha};
  nlohmann::ordered_json summary = {{"m", o.m}, {"k", o.k}, {"alpha", o.alpha},
                            {"residual_norm", synth::adversarial_residual_norm(spec)}};
  std::cout << summary.dump(2) << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_pattern("[%l] %v");
  CLI::App app{"Nystrom approximation of SPSD matrices"};
  app.require_subcommand(1);
  Options o;

  auto add_input = [&](CLI::App* cmd) {
    cmd->add_option("--input", o.input, "matrix file, dataset, or synth:... spec")->required();
    cmd->add_option("--sigma", o.sigma, "RBF width; treats --input as a dataset");
    cmd->add_option("--normalize", o.normalize, "none|zscore|minmax")->capture_default_str();
    cmd->add_flag("--header", o.csv_header, "dataset CSV has a header row");
  };
  auto add_c = [&](CLI::App* cmd) {
    cmd->add_option("--c", o.c, "column budget(s), comma separated")->delimiter(',');
  };

  auto* kernel = app.add_subcommand("kernel", "kernel matrices")->require_subcommand(1);
  auto* kernel_build = kernel->add_subcommand("build", "build an RBF kernel from a dataset");
  kernel_build->add_option("--input", o.input, "dataset path")->required();
  kernel_build->add_option("--format", o.format, "csv|libsvm");
  kernel_build->add_option("--sigma", o.sigma, "RBF width")->required();
  kernel_build->add_option("--normalize", o.normalize, "none|zscore|minmax")->capture_default_str();
  kernel_build->add_option("--sparsify", o.sparsify, "keep this fraction of entries");
  kernel_build->add_option("--out", o.out, "output (.nysd, .csv, .mtx)")->required();
  kernel_build->add_flag("--header", o.csv_header, "dataset CSV has a header row");

  auto* approx = app.add_subcommand("approx", "single approximations")->require_subcommand(1);
  auto* approx_run = approx->add_subcommand("run", "sample columns and build one approximation");
  add_input(approx_run);
  approx_run->add_option("--format", o.format, "dataset format when --sigma is given");
  add_c(approx_run);
  approx_run->add_option("--k", o.k)->capture_default_str();
  approx_run->add_option("--epsilon", o.epsilon)->capture_default_str();
  approx_run->add_option("--mu", o.mu)->capture_default_str();
  approx_run->add_option("--method", o.method, "sampler[:intersection]");
  approx_run->add_option("--seed", o.seed)->capture_default_str();
  approx_run->add_option("--out", o.out, "approximation file");
  approx_run->add_flag("--force-naive", o.force_naive, "never use the fast intersection path");

  auto* bench = app.add_subcommand("bench", "experiments")->require_subcommand(1);
  auto* sweep = bench->add_subcommand("sweep", "error ratios over c, methods and trials");
  add_input(sweep);
  add_c(sweep);
  sweep->add_option("--k", o.k)->capture_default_str();
  sweep->add_option("--mu", o.mu)->capture_default_str();
  sweep->add_option("--method", o.method, "sampler[:intersection], comma separated")->delimiter(',');
  sweep->add_option("--repeats", o.repeats)->capture_default_str();
  sweep->add_option("--seed", o.seed)->capture_default_str();
  sweep->add_option("--format", o.format, "csv|json|svg");
  sweep->add_option("--out", o.out);
  sweep->add_flag("--force-naive", o.force_naive);
  sweep->add_flag("--zero-timings", o.zero_timings, "write 0 for all timings");
  sweep->add_flag("--allow-large", o.allow_large, "lift the dense size cap");

  auto* timing = bench->add_subcommand("timing", "standard vs modified naive vs modified fast");
  add_input(timing);
  add_c(timing);
  timing->add_option("--repeats", o.repeats)->capture_default_str();
  timing->add_option("--seed", o.seed)->capture_default_str();
  timing->add_option("--out", o.out);

  auto* ver = app.add_subcommand("verify", "run a property suite");
  ver->add_option("suite", o.suite, "core|exactness|fast-path|adversarial|statistical")->required();
  ver->add_option("--seed", o.seed)->capture_default_str();
  ver->add_option("--out", o.out, "JSON report path");
  ver->add_flag("--fault-negate-t3", o.fault_negate_t3, "mutation check for the fast path");

  auto* syn = app.add_subcommand("synth", "synthetic matrices")->require_subcommand(1);
  auto* adv = syn->add_subcommand("adversarial", "block-diagonal adversarial matrix");
  adv->add_option("--m", o.m)->required();
  adv->add_option("--k", o.k)->required();
  adv->add_option("--alpha", o.alpha)->required();
  adv->add_option("--out", o.out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (kernel_build->parsed()) return cmd_kernel_build(o);
    if (approx_run->parsed()) return cmd_approx_run(o);
    if (sweep->parsed()) return cmd_bench_sweep(o);
    if (timing->parsed()) return cmd_bench_timing(o);
    if (ver->parsed()) return cmd_verify(o);
    if (adv->parsed()) return cmd_synth_adversarial(o);
  } catch (const ParameterError& e) {
    spdlog::error("{}", e.what());
    return kExitUsage;
  } catch (const Error& e) {
    spdlog::error("{}", e.what());
    return kExitData;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitData;
  }
  return kExitUsage;
}
