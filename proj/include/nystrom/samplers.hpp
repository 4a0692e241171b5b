#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>

#include "nystrom/matrix.hpp"

namespace nystrom {

// All samplers draw from this engine; identical seed and inputs give an
// identical ColumnSet.
using Rng = std::mt19937_64;

enum class SamplerMethod { uniform, adaptive, leverage, uniform_adaptive2, adaptive_full };

SamplerMethod parse_sampler_method(std::string_view s);
std::string_view to_string(SamplerMethod m);

struct StageBudget {
  Index c1 = 0;
  Index c2 = 0;
  Index c3 = 0;
  Index total() const noexcept { return c1 + c2 + c3; }
};

struct SamplerConfig {
  SamplerMethod method = SamplerMethod::uniform_adaptive2;
  Index k = 10;
  double epsilon = 1.0;
  // Coherence surrogate; a constant rather than the measured coherence.
  double mu = 1.0;
  // When set, the total number of columns; stages get ceil(split_i * budget)
  // (the last stage takes the remainder) instead of the theorem formulas.
  std::optional<Index> budget;
  std::array<double, 3> split{0.25, 0.25, 0.5};
  // Uniform-stage analysis parameters, delta in (0, 0.5), theta in (0, 1).
  double delta = 0.25;
  double theta = 0.5;
  std::uint64_t seed = 0;
};

// Throws ParameterError on out-of-range fields.
void validate(const SamplerConfig& config);

// Flat `key = value` text, one field per line, '#' starts a comment.
std::string to_config_text(const SamplerConfig& config);
SamplerConfig parse_sampler_config(std::string_view text);

// c distinct indices from [0, m), uniform over all c-subsets.
ColumnSet uniform_sample(Index m, Index c, Rng& rng);

// p_j = |b_j|^2 / |B|_F^2. `exact` is set (and p left empty) when the residual
// has no mass, meaning the selected columns already reproduce A.
struct AdaptiveProbabilities {
  Vector p;
  bool exact = false;
};
AdaptiveProbabilities adaptive_probabilities(const DenseMatrix& residual);
AdaptiveProbabilities adaptive_probabilities_from_sq_norms(const Vector& sq_norms);

// Draws c_new fresh columns with probability proportional to the squared column
// norms of A - P_C A, C = A[:, existing]. Returns existing plus the new
// indices, with one more entry in stage_sizes. When the residual is zero the
// result equals `existing` with early_exit set. Throws ExhaustionError when
// fewer than c_new fresh columns carry residual mass.
ColumnSet adaptive_sample(const SymmetricMatrix& a, const ColumnSet& existing, Index c_new, Rng& rng);

// Sequential draws without replacement, proportional to leverage scores among
// the remaining indices; pads with uniform draws (and sets `padded`) once the
// positive scores run out.
ColumnSet leverage_sample(const SymmetricMatrix& a, Index k, Index c, Rng& rng);
ColumnSet leverage_sample_from_scores(const Vector& scores, Index c, Rng& rng);

// ceil(8.7 mu k ln(sqrt(5) k)), ceil(10 k / eps), ceil(2 (c1 + c2) / eps).
StageBudget theorem_budget(Index k, double epsilon, double mu);

// Stage sizes for budget mode.
StageBudget split_budget(Index total, const std::array<double, 3>& split);

// Uniform stage followed by two adaptive stages against the running residual.
ColumnSet uniform_adaptive2(const SymmetricMatrix& a, const SamplerConfig& config, Rng& rng);

// Uniform c/3, then two adaptive rounds of c/3 (remainder to the last).
ColumnSet adaptive_full(const SymmetricMatrix& a, Index c, Rng& rng);

// Dispatches on config.method. config.budget is the column count; it is
// required for every method except uniform_adaptive2, which falls back to
// theorem_budget when it is unset.
ColumnSet sample_columns(const SymmetricMatrix& a, const SamplerConfig& config, Rng& rng);

}  // namespace nystrom
