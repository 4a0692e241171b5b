#include "nystrom/samplers.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include <spdlog/spdlog.h>

#include "nystrom/kernels.hpp"
#include "nystrom/linalg.hpp"

namespace nystrom {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
// Residual mass below (kZeroRel * |A|_F)^2 counts as zero.
constexpr double kZeroRel = 1e3 * kEps;

// Draw one index with probability proportional to weights (all >= 0, sum > 0).
Index draw_weighted(const Vector& weights, Rng& rng) {
  const double total = weights.sum();
  std::uniform_real_distribution<double> u(0.0, total);
  const double target = u(rng);
  double acc = 0.0;
  Index last_positive = -1;
  for (Index j = 0; j < weights.size(); ++j) {
    if (weights(j) <= 0.0) continue;
    last_positive = j;
    acc += weights(j);
    if (target < acc) return j;
  }
  return last_positive;
}

ColumnSet with_stage(const ColumnSet& existing, std::vector<Index> fresh) {
  ColumnSet out = existing;
  if (out.stage_sizes.empty() && !out.indices.empty()) out.stage_sizes.push_back(out.indices.size());
  out.stage_sizes.push_back(fresh.size());
  out.indices.insert(out.indices.end(), fresh.begin(), fresh.end());
  return out;
}

Vector residual_sq_norms(const SymmetricMatrix& a, const std::vector<Index>& selected) {
  const DenseMatrix q = selected.empty() ? DenseMatrix(a.order(), 0)
                                         : orthonormal_basis(a.columns(selected));
  return kernels::residual_column_sq_norms(a.dense(), q, default_block_cols());
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double to_double(std::string_view v, std::string_view key) {
  double out = 0.0;
  v = trim(v);
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) {
    throw FormatError("config key '" + std::string(key) + "': bad number '" + std::string(v) + "'");
  }
  return out;
}

std::uint64_t to_u64(std::string_view v, std::string_view key) {
  std::uint64_t out = 0;
  v = trim(v);
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) {
    throw FormatError("config key '" + std::string(key) + "': bad integer '" + std::string(v) + "'");
  }
  return out;
}

}  // namespace

SamplerMethod parse_sampler_method(std::string_view s) {
  if (s == "uniform") return SamplerMethod::uniform;
  if (s == "adaptive") return SamplerMethod::adaptive;
  if (s == "leverage") return SamplerMethod::leverage;
  if (s == "uniform_adaptive2") return SamplerMethod::uniform_adaptive2;
  if (s == "adaptive_full") return SamplerMethod::adaptive_full;
  throw ParameterError("unknown sampler '" + std::string(s) + "'");
}

std::string_view to_string(SamplerMethod m) {
  switch (m) {
    case SamplerMethod::uniform: return "uniform";
    case SamplerMethod::adaptive: return "adaptive";
    case SamplerMethod::leverage: return "leverage";
    case SamplerMethod::uniform_adaptive2: return "uniform_adaptive2";
    case SamplerMethod::adaptive_full: return "adaptive_full";
  }
  return "uniform";
}

void validate(const SamplerConfig& config) {
  if (config.k < 1) throw ParameterError("sampler config: k must be >= 1");
  if (!(config.epsilon > 0.0 && config.epsilon <= 1.0)) {
    throw ParameterError("sampler config: epsilon must lie in (0, 1]");
  }
  if (!(config.mu > 0.0)) throw ParameterError("sampler config: mu must be positive");
  if (config.budget && *config.budget < 1) throw ParameterError("sampler config: budget must be >= 1");
  const double split_sum = config.split[0] + config.split[1] + config.split[2];
  if (std::abs(split_sum - 1.0) > 1e-9 ||
      std::any_of(config.split.begin(), config.split.end(), [](double f) { return f < 0.0; })) {
    throw ParameterError("sampler config: split fractions must be nonnegative and sum to 1");
  }
  if (!(config.delta > 0.0 && config.delta < 0.5)) throw ParameterError("sampler config: delta must lie in (0, 0.5)");
  if (!(config.theta > 0.0 && config.theta < 1.0)) throw ParameterError("sampler config: theta must lie in (0, 1)");
}

std::string to_config_text(const SamplerConfig& c) {
  std::ostringstream out;
  out.precision(17);
  out << "method = " << to_string(c.method) << '\n';
  out << "k = " << c.k << '\n';
  out << "epsilon = " << c.epsilon << '\n';
  out << "mu = " << c.mu << '\n';
  if (c.budget) out << "budget = " << *c.budget << '\n';
  out << "split = " << c.split[0] << ", " << c.split[1] << ", " << c.split[2] << '\n';
  out << "delta = " << c.delta << '\n';
  out << "theta = " << c.theta << '\n';
  out << "seed = " << c.seed << '\n';
  return out.str();
}

SamplerConfig parse_sampler_config(std::string_view text) {
  SamplerConfig c;
  std::size_t lineno = 0;
  while (!text.empty()) {
    ++lineno;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw FormatError("config line without '='", lineno);
    const auto key = trim(line.substr(0, eq));
    auto value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    if (key == "method") {
      c.method = parse_sampler_method(value);
    } else if (key == "k") {
      c.k = static_cast<Index>(to_u64(value, key));
    } else if (key == "epsilon") {
      c.epsilon = to_double(value, key);
    } else if (key == "mu") {
      c.mu = to_double(value, key);
    } else if (key == "budget") {
      c.budget = static_cast<Index>(to_u64(value, key));
    } else if (key == "split") {
      std::array<double, 3> f{};
      std::size_t n = 0;
      std::size_t start = 0;
      while (true) {
        const auto comma = value.find(',', start);
        if (n == 3) throw FormatError("config key 'split' needs exactly three fractions", lineno);
        f[n++] = to_double(value.substr(start, comma - start), key);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
      }
      if (n != 3) throw FormatError("config key 'split' needs exactly three fractions", lineno);
      c.split = f;
    } else if (key == "delta") {
      c.delta = to_double(value, key);
    } else if (key == "theta") {
      c.theta = to_double(value, key);
    } else if (key == "seed") {
      c.seed = to_u64(value, key);
    } else {
      throw FormatError("unknown config key '" + std::string(key) + "'", lineno);
    }
  }
  validate(c);
  return c;
}

ColumnSet uniform_sample(Index m, Index c, Rng& rng) {
  if (c < 1 || c > m) {
    throw ParameterError("uniform_sample: c = " + std::to_string(c) + " outside [1, " + std::to_string(m) + "]");
  }
  // Partial Fisher-Yates: the first c slots end up a uniform c-subset.
  std::vector<Index> perm(static_cast<std::size_t>(m));
  std::iota(perm.begin(), perm.end(), Index{0});
  for (Index i = 0; i < c; ++i) {
    std::uniform_int_distribution<Index> pick(i, m - 1);
    std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(pick(rng))]);
  }
  ColumnSet out;
  out.indices.assign(perm.begin(), perm.begin() + c);
  out.stage_sizes = {static_cast<std::size_t>(c)};
  return out;
}

AdaptiveProbabilities adaptive_probabilities_from_sq_norms(const Vector& sq_norms) {
  AdaptiveProbabilities out;
  const double total = sq_norms.sum();
  if (!(total > 0.0)) {
    out.exact = true;
    return out;
  }
  out.p = sq_norms / total;
  return out;
}

AdaptiveProbabilities adaptive_probabilities(const DenseMatrix& residual) {
  return adaptive_probabilities_from_sq_norms(residual.colwise().squaredNorm().transpose());
}

ColumnSet adaptive_sample(const SymmetricMatrix& a, const ColumnSet& existing, Index c_new, Rng& rng) {
  const Index m = a.order();
  if (c_new < 0) throw ParameterError("adaptive_sample: c_new must be >= 0");
  if (!existing.indices.empty()) validate(existing, m);
  if (c_new == 0) return with_stage(existing, {});

  Vector sq = residual_sq_norms(a, existing.indices);
  // Selected columns lie in range(C); their residual is roundoff.
  for (Index j : existing.indices) sq(j) = 0.0;
  const double a_norm = a.frobenius_norm();
  const double floor = (kZeroRel * a_norm) * (kZeroRel * a_norm);
  for (Index j = 0; j < m; ++j)
    if (sq(j) <= floor) sq(j) = 0.0;

  if (sq.sum() <= floor) {
    ColumnSet out = existing;
    out.early_exit = true;
    return out;
  }
  const auto drawable = static_cast<Index>((sq.array() > 0.0).count());
  if (drawable < c_new) {
    throw ExhaustionError(static_cast<std::size_t>(c_new), static_cast<std::size_t>(drawable));
  }

  // Rejecting repeats and redrawing from p is the same law as drawing from p
  // restricted to the unselected columns, which is what happens here.
  spdlog::debug("adaptive_sample: {} draws without replacement (duplicates rejected)", c_new);
  std::vector<Index> fresh;
  fresh.reserve(static_cast<std::size_t>(c_new));
  for (Index t = 0; t < c_new; ++t) {
    const Index j = draw_weighted(sq, rng);
    fresh.push_back(j);
    sq(j) = 0.0;
  }
  return with_stage(existing, std::move(fresh));
}

ColumnSet leverage_sample_from_scores(const Vector& scores, Index c, Rng& rng) {
  const Index m = scores.size();
  if (c < 1 || c > m) throw ParameterError("leverage_sample: c outside [1, m]");
  Vector w = scores;
  for (Index j = 0; j < m; ++j)
    if (!(w(j) > 1e-14)) w(j) = 0.0;

  ColumnSet out;
  std::vector<char> taken(static_cast<std::size_t>(m), 0);
  for (Index t = 0; t < c; ++t) {
    Index j = -1;
    if (w.sum() > 0.0) {
      j = draw_weighted(w, rng);
    } else {
      out.padded = true;
      std::vector<Index> rest;
      for (Index i = 0; i < m; ++i)
        if (!taken[static_cast<std::size_t>(i)]) rest.push_back(i);
      std::uniform_int_distribution<std::size_t> pick(0, rest.size() - 1);
      j = rest[pick(rng)];
    }
    out.indices.push_back(j);
    taken[static_cast<std::size_t>(j)] = 1;
    w(j) = 0.0;
  }
  if (out.padded) spdlog::warn("leverage_sample: positive scores exhausted; padded with uniform draws");
  out.stage_sizes = {static_cast<std::size_t>(c)};
  return out;
}

ColumnSet leverage_sample(const SymmetricMatrix& a, Index k, Index c, Rng& rng) {
  if (c < 1 || c > a.order()) throw ParameterError("leverage_sample: c outside [1, m]");
  return leverage_sample_from_scores(leverage_scores(a.dense(), k), c, rng);
}

StageBudget theorem_budget(Index k, double epsilon, double mu) {
  if (k < 1) throw ParameterError("theorem_budget: k must be >= 1");
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw ParameterError("theorem_budget: epsilon must lie in (0, 1]");
  if (!(mu > 0.0)) throw ParameterError("theorem_budget: mu must be positive");
  const double kd = static_cast<double>(k);
  StageBudget b;
  b.c1 = static_cast<Index>(std::ceil(8.7 * mu * kd * std::log(std::sqrt(5.0) * kd)));
  b.c2 = static_cast<Index>(std::ceil(10.0 * kd / epsilon));
  b.c3 = static_cast<Index>(std::ceil(2.0 / epsilon * static_cast<double>(b.c1 + b.c2)));
  return b;
}

StageBudget split_budget(Index total, const std::array<double, 3>& split) {
  if (total < 1) throw ParameterError("split_budget: total must be >= 1");
  StageBudget b;
  const double t = static_cast<double>(total);
  b.c1 = std::min(total, static_cast<Index>(std::ceil(split[0] * t)));
  b.c2 = std::min(total - b.c1, static_cast<Index>(std::ceil(split[1] * t)));
  b.c3 = total - b.c1 - b.c2;
  return b;
}

ColumnSet uniform_adaptive2(const SymmetricMatrix& a, const SamplerConfig& config, Rng& rng) {
  validate(config);
  const Index m = a.order();
  StageBudget b = config.budget ? split_budget(*config.budget, config.split)
                                : theorem_budget(config.k, config.epsilon, config.mu);
  bool clamped = false;
  auto clamp = [&](Index& stage, Index available, const char* name) {
    if (stage > available) {
      spdlog::warn("uniform_adaptive2: stage {} wants {} columns, only {} available; clamped", name, stage,
                   available);
      stage = available;
      clamped = true;
    }
  };
  clamp(b.c1, m, "1");
  if (b.c1 < 1) throw ParameterError("uniform_adaptive2: uniform stage is empty");
  clamp(b.c2, m - b.c1, "2");
  clamp(b.c3, m - b.c1 - b.c2, "3");

  ColumnSet cols = uniform_sample(m, b.c1, rng);
  for (Index stage : {b.c2, b.c3}) {
    ColumnSet next = adaptive_sample(a, cols, stage, rng);
    if (next.early_exit) {
      cols.early_exit = true;
      break;
    }
    cols = std::move(next);
  }
  while (cols.stage_sizes.size() < 3) cols.stage_sizes.push_back(0);
  cols.clamped = clamped;
  return cols;
}

ColumnSet adaptive_full(const SymmetricMatrix& a, Index c, Rng& rng) {
  if (c < 3) throw ParameterError("adaptive_full: c must be >= 3");
  if (c > a.order()) throw ParameterError("adaptive_full: c exceeds matrix order");
  const Index third = c / 3;
  ColumnSet cols = uniform_sample(a.order(), third, rng);
  for (Index stage : {third, c - 2 * third}) {
    ColumnSet next = adaptive_sample(a, cols, stage, rng);
    if (next.early_exit) {
      cols.early_exit = true;
      break;
    }
    cols = std::move(next);
  }
  while (cols.stage_sizes.size() < 3) cols.stage_sizes.push_back(0);
  return cols;
}

ColumnSet sample_columns(const SymmetricMatrix& a, const SamplerConfig& config, Rng& rng) {
  validate(config);
  if (config.method == SamplerMethod::uniform_adaptive2) return uniform_adaptive2(a, config, rng);
  if (!config.budget) {
    throw ParameterError(std::string("sampler '") + std::string(to_string(config.method)) +
                         "' needs a column budget");
  }
  const Index c = *config.budget;
  switch (config.method) {
    case SamplerMethod::uniform: return uniform_sample(a.order(), c, rng);
    case SamplerMethod::adaptive: {
      ColumnSet out = adaptive_sample(a, ColumnSet{}, c, rng);
      if (out.indices.empty()) throw ParameterError("adaptive sampling of a zero matrix");
      return out;
    }
    case SamplerMethod::leverage: return leverage_sample(a, config.k, c, rng);
    case SamplerMethod::adaptive_full: return adaptive_full(a, c, rng);
    case SamplerMethod::uniform_adaptive2: break;
  }
  return uniform_adaptive2(a, config, rng);
}

}  // namespace nystrom
