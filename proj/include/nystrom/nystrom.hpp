#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "nystrom/linalg.hpp"
#include "nystrom/matrix.hpp"
#include "nystrom/samplers.hpp"

namespace nystrom {

enum class IntersectionMethod { standard, modified_naive, modified_fast };

IntersectionMethod parse_intersection_method(std::string_view s);
std::string_view to_string(IntersectionMethod m);

// Either storage of the SPSD input.
using SymmetricInput = std::variant<std::reference_wrapper<const SymmetricMatrix>,
                                    std::reference_wrapper<const SparseSymmetric>>;

// A permuted so the selected indices come first:
//   [ W    A21^T ]
//   [ A21  A22   ]
// A22 is never densified; a22_times multiplies through the source matrix.
class PartitionView {
 public:
  PartitionView(SymmetricInput a, std::vector<Index> selected);

  const DenseMatrix& w() const noexcept { return w_; }
  const DenseMatrix& a21() const noexcept { return a21_; }
  const std::vector<Index>& selected() const noexcept { return selected_; }
  const std::vector<Index>& remaining() const noexcept { return remaining_; }
  Index order() const noexcept { return order_; }

  // A22 * x for x with remaining().size() rows.
  DenseMatrix a22_times(const DenseMatrix& x) const;
  // A22 densified; for tests and small inputs only.
  DenseMatrix a22_dense() const;
  // Undo the permutation: rebuilds A from W, A21 and A22.
  DenseMatrix reconstruct() const;

 private:
  SymmetricInput source_;
  Index order_ = 0;
  std::vector<Index> selected_;
  std::vector<Index> remaining_;
  DenseMatrix w_;
  DenseMatrix a21_;
};

PartitionView partition(SymmetricInput a, const ColumnSet& columns);

struct IntersectionOptions {
  // Relative singular-value tolerance for W's rank test; negative = default.
  double rank_tol = -1.0;
  // The fast path additionally needs sigma_min(W) / sigma_max(W) above this.
  double min_conditioning = 1e-10;
  // Mutation hook for the verification suite: flips the sign of T3.
  bool fault_negate_t3 = false;
};

// U = W^+.
DenseMatrix standard_intersection(const PartitionView& part);

// U = C^+ A (C^+)^T with C^+ from an SVD-based pseudoinverse and the product
// with A taken blockwise.
DenseMatrix modified_intersection_naive(SymmetricInput a, const DenseMatrix& c);

// U = T1 (W + T2 + T2^T + T3) T1^T with
//   T0 = A21^T A21, T2 = T0 W^-1, T1 = W^-1 (I + W^-1 T2)^-1,
//   T3 = W^-1 (A21^T A22 A21) W^-1.
// Every inverse is c x c and A22 is only touched through a22_times, so for
// sparse A no m x m dense product is formed. Throws SingularityError when W
// fails the rank or conditioning test.
DenseMatrix modified_intersection_fast(const PartitionView& part, const IntersectionOptions& opt = {});

// Implicit C U C^T.
struct NystromApproximation {
  ColumnSet columns;
  DenseMatrix c;
  SymmetricMatrix u;
  // Requested method; when fallback is set the naive path produced U.
  IntersectionMethod method = IntersectionMethod::modified_fast;
  bool fallback = false;
  std::uint64_t seed = 0;

  Index order() const noexcept { return c.rows(); }
  // Materialises C U C^T (m x m).
  DenseMatrix reconstruct() const;
};

// modified_fast downgrades to modified_naive on a singular or ill-conditioned
// W and records the fallback.
NystromApproximation approximate(SymmetricInput a, const ColumnSet& columns, IntersectionMethod method,
                                 const IntersectionOptions& opt = {});

// |A - C U C^T|. Frobenius is accumulated over row blocks; spectral
// materialises the residual.
double residual_norm(SymmetricInput a, const NystromApproximation& approx, NormKind kind);

// |A - A_k| from the eigenvalues of A.
double reference_error(SymmetricInput a, Index k, NormKind kind);

struct ErrorRatio {
  // |A - CUC^T| / |A - A_k|, or the absolute error when degenerate.
  double value = 0.0;
  // |A - A_k| <= degenerate_tol * |A|: A is effectively rank <= k.
  bool degenerate = false;
};

inline constexpr double kDegenerateTol = 1e-10;

ErrorRatio error_ratio(SymmetricInput a, const NystromApproximation& approx, Index k, NormKind kind);
// Same, with |A - A_k| and |A| precomputed.
ErrorRatio error_ratio(double residual, double reference, double a_norm);

// One measured draw.
struct TrialRecord {
  std::string method;
  Index c = 0;
  Index trial = 0;
  std::uint64_t seed = 0;
  double error_ratio = 0.0;
  bool degenerate = false;
  double sampling_seconds = 0.0;
  double intersection_seconds = 0.0;
  bool fallback = false;
};

// Produces a column set from a seed.
using SeededSampler = std::function<ColumnSet(std::uint64_t seed)>;

struct BestOfT {
  NystromApproximation best;
  std::vector<TrialRecord> records;
  double best_residual = 0.0;
};

// Runs t draws with seeds base_seed + i, approximates each with `method` and
// keeps the one with the smallest Frobenius residual. Records are ordered by
// trial index.
BestOfT best_of_t(const SymmetricMatrix& a, const SeededSampler& sampler, Index t, Index k,
                  std::uint64_t base_seed, IntersectionMethod method = IntersectionMethod::modified_fast);

// Binary container: "NYSA", u32 version, u8 method, u8 fallback, u16 pad,
// u64 seed, u64 c, u64 indices[c], then U as an NYSD block. C is not stored;
// a read approximation has an empty `c` until attach_columns is called.
void write_approximation(std::ostream& out, const NystromApproximation& approx);
NystromApproximation read_approximation(std::istream& in);
void write_approximation(const std::filesystem::path& path, const NystromApproximation& approx);
NystromApproximation read_approximation(const std::filesystem::path& path);
void attach_columns(NystromApproximation& approx, SymmetricInput a);

}  // namespace nystrom
