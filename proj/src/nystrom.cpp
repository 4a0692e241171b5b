#include "nystrom/nystrom.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <string>

#include <Eigen/Eigenvalues>
#include <spdlog/spdlog.h>

#include "nystrom/kernels.hpp"
#include "nystrom/matrix_io.hpp"

namespace nystrom {
namespace {

template <typename Fn>
decltype(auto) visit_input(const SymmetricInput& a, Fn&& fn) {
  return std::visit([&](const auto& ref) -> decltype(auto) { return fn(ref.get()); }, a);
}

Index order_of(const SymmetricInput& a) {
  return visit_input(a, [](const auto& m) { return m.order(); });
}

DenseMatrix dense_of(const SymmetricInput& a) {
  return std::visit(
      [](const auto& ref) -> DenseMatrix {
        using T = std::decay_t<decltype(ref.get())>;
        if constexpr (std::is_same_v<T, SymmetricMatrix>) {
          return ref.get().dense();
        } else {
          return ref.get().to_dense();
        }
      },
      a);
}

kernels::RowBlockFn row_source(const SymmetricInput& a) {
  return std::visit(
      [](const auto& ref) -> kernels::RowBlockFn {
        using T = std::decay_t<decltype(ref.get())>;
        const T* m = &ref.get();
        if constexpr (std::is_same_v<T, SymmetricMatrix>) {
          return [m](Index r0, Index r1) -> DenseMatrix { return m->dense().middleRows(r0, r1 - r0); };
        } else {
          return [m](Index r0, Index r1) -> DenseMatrix { return m->row_block(r0, r1); };
        }
      },
      a);
}

// Eigenvalues of A sorted by decreasing magnitude.
Vector eigen_magnitudes(const SymmetricInput& a) {
  const DenseMatrix d = dense_of(a);
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(d, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("eigenvalue solver did not converge");
  Vector mags = es.eigenvalues().cwiseAbs();
  std::sort(mags.data(), mags.data() + mags.size(), std::greater<>());
  return mags;
}

double tail_norm(const Vector& mags, Index k, NormKind kind) {
  if (k >= mags.size()) return 0.0;
  if (kind == NormKind::spectral) return mags(k);
  return mags.tail(mags.size() - k).norm();
}

double head_norm(const Vector& mags, NormKind kind) {
  if (mags.size() == 0) return 0.0;
  return kind == NormKind::spectral ? mags(0) : mags.norm();
}

DenseMatrix symmetrize(const DenseMatrix& u) { return 0.5 * (u + u.transpose()); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

constexpr char kApproxMagic[4] = {'N', 'Y', 'S', 'A'};
constexpr std::uint32_t kApproxVersion = 1;

template <typename T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw FormatError("truncated approximation file");
  return v;
}

}  // namespace

IntersectionMethod parse_intersection_method(std::string_view s) {
  if (s == "standard") return IntersectionMethod::standard;
  if (s == "modified_naive" || s == "naive") return IntersectionMethod::modified_naive;
  if (s == "modified_fast" || s == "modified" || s == "fast") return IntersectionMethod::modified_fast;
  throw ParameterError("unknown intersection method '" + std::string(s) + "'");
}

std::string_view to_string(IntersectionMethod m) {
  switch (m) {
    case IntersectionMethod::standard: return "standard";
    case IntersectionMethod::modified_naive: return "modified_naive";
    case IntersectionMethod::modified_fast: return "modified_fast";
  }
  return "standard";
}

// ---------------------------------------------------------------------------

PartitionView::PartitionView(SymmetricInput a, std::vector<Index> selected)
    : source_(a), order_(order_of(a)), selected_(std::move(selected)) {
  std::vector<char> used(static_cast<std::size_t>(order_), 0);
  for (Index i : selected_) used[static_cast<std::size_t>(i)] = 1;
  for (Index i = 0; i < order_; ++i)
    if (!used[static_cast<std::size_t>(i)]) remaining_.push_back(i);

  w_ = visit_input(source_, [&](const auto& m) { return m.principal(selected_); });
  const DenseMatrix cols = visit_input(source_, [&](const auto& m) { return m.columns(selected_); });
  a21_.resize(static_cast<Index>(remaining_.size()), static_cast<Index>(selected_.size()));
  for (std::size_t r = 0; r < remaining_.size(); ++r) a21_.row(static_cast<Index>(r)) = cols.row(remaining_[r]);
}

DenseMatrix PartitionView::a22_times(const DenseMatrix& x) const {
  const auto rest = static_cast<Index>(remaining_.size());
  if (x.rows() != rest) throw ParameterError("a22_times: row count mismatch");
  DenseMatrix full = DenseMatrix::Zero(order_, x.cols());
  for (Index r = 0; r < rest; ++r) full.row(remaining_[static_cast<std::size_t>(r)]) = x.row(r);
  const DenseMatrix y = visit_input(source_, [&](const auto& m) { return m.multiply(full); });
  DenseMatrix out(rest, x.cols());
  for (Index r = 0; r < rest; ++r) out.row(r) = y.row(remaining_[static_cast<std::size_t>(r)]);
  return out;
}

DenseMatrix PartitionView::a22_dense() const {
  return visit_input(source_, [&](const auto& m) { return m.principal(remaining_); });
}

DenseMatrix PartitionView::reconstruct() const {
  DenseMatrix out(order_, order_);
  std::vector<Index> perm = selected_;
  perm.insert(perm.end(), remaining_.begin(), remaining_.end());
  const auto c = static_cast<Index>(selected_.size());
  const auto rest = static_cast<Index>(remaining_.size());
  DenseMatrix permuted(order_, order_);
  permuted.topLeftCorner(c, c) = w_;
  permuted.bottomLeftCorner(rest, c) = a21_;
  permuted.topRightCorner(c, rest) = a21_.transpose();
  permuted.bottomRightCorner(rest, rest) = a22_dense();
  for (Index j = 0; j < order_; ++j)
    for (Index i = 0; i < order_; ++i) out(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]) = permuted(i, j);
  return out;
}

PartitionView partition(SymmetricInput a, const ColumnSet& columns) {
  validate(columns, order_of(a));
  return PartitionView(a, columns.indices);
}

// ---------------------------------------------------------------------------

DenseMatrix standard_intersection(const PartitionView& part) { return symmetrize(pinv(part.w())); }

DenseMatrix modified_intersection_naive(SymmetricInput a, const DenseMatrix& c) {
  if (c.rows() != order_of(a)) throw ParameterError("modified_intersection_naive: C has wrong row count");
  const DenseMatrix c_pinv = pinv(c);
  // A symmetric: (C^+ A)^T = A (C^+)^T.
  const DenseMatrix a_cpt = visit_input(a, [&](const auto& m) { return m.multiply(c_pinv.transpose()); });
  return symmetrize(matmul(c_pinv, a_cpt));
}

DenseMatrix modified_intersection_fast(const PartitionView& part, const IntersectionOptions& opt) {
  const DenseMatrix& w = part.w();
  const Index c = w.rows();
  const Vector sv = singular_values(w);
  const double tol = opt.rank_tol < 0.0 ? default_rank_tol(w) : opt.rank_tol;
  Index rank = 0;
  while (rank < sv.size() && sv(rank) > tol * sv(0)) ++rank;
  if (sv.size() == 0 || sv(0) == 0.0 || rank != c) {
    throw SingularityError("fast intersection: W has rank " + std::to_string(rank) + " < " + std::to_string(c));
  }
  if (sv(c - 1) / sv(0) <= opt.min_conditioning) {
    throw SingularityError("fast intersection: W too ill-conditioned (sigma_min/sigma_max = " +
                           std::to_string(sv(c - 1) / sv(0)) + ")");
  }

  const DenseMatrix& a21 = part.a21();
  const Index block = default_block_cols();
  const DenseMatrix identity = DenseMatrix::Identity(c, c);
  const DenseMatrix w_inv = Eigen::PartialPivLU<DenseMatrix>(w).inverse();

  const DenseMatrix t0 = kernels::matmul_tn(a21, a21, block);
  const DenseMatrix t2 = t0 * w_inv;
  const DenseMatrix t1 = w_inv * Eigen::PartialPivLU<DenseMatrix>(identity + w_inv * t2).inverse();
  const DenseMatrix a22_a21 = part.a22_times(a21);
  DenseMatrix t3 = w_inv * kernels::matmul_tn(a21, a22_a21, block) * w_inv;
  if (opt.fault_negate_t3) t3 = -t3;

  const DenseMatrix middle = w + t2 + t2.transpose() + t3;
  return symmetrize(t1 * middle * t1.transpose());
}

// ---------------------------------------------------------------------------

DenseMatrix NystromApproximation::reconstruct() const {
  return matmul(c, matmul(u.dense(), c.transpose()));
}

NystromApproximation approximate(SymmetricInput a, const ColumnSet& columns, IntersectionMethod method,
                                 const IntersectionOptions& opt) {
  const Index m = order_of(a);
  validate(columns, m);
  NystromApproximation out;
  out.columns = columns;
  out.method = method;
  out.c = visit_input(a, [&](const auto& mat) { return mat.columns(columns.indices); });

  switch (method) {
    case IntersectionMethod::standard:
      out.u = SymmetricMatrix::from_lower(standard_intersection(PartitionView(a, columns.indices)));
      break;
    case IntersectionMethod::modified_naive:
      out.u = SymmetricMatrix::from_lower(modified_intersection_naive(a, out.c));
      break;
    case IntersectionMethod::modified_fast:
      try {
        out.u = SymmetricMatrix::from_lower(modified_intersection_fast(PartitionView(a, columns.indices), opt));
      } catch (const SingularityError& e) {
        spdlog::debug("approximate: {}; falling back to the naive intersection", e.what());
        out.fallback = true;
        out.u = SymmetricMatrix::from_lower(modified_intersection_naive(a, out.c));
      }
      break;
  }
  return out;
}

void attach_columns(NystromApproximation& approx, SymmetricInput a) {
  validate(approx.columns, order_of(a));
  approx.c = visit_input(a, [&](const auto& mat) { return mat.columns(approx.columns.indices); });
}

double residual_norm(SymmetricInput a, const NystromApproximation& approx, NormKind kind) {
  const Index m = order_of(a);
  if (approx.c.rows() != m) throw ParameterError("residual_norm: approximation does not match A");
  if (kind == NormKind::frobenius) {
    const DenseMatrix g = matmul(approx.u.dense(), approx.c.transpose());
    const double sq = kernels::residual_frobenius_sq(m, row_source(a), approx.c, g, default_block_cols());
    return std::sqrt(std::max(0.0, sq));
  }
  const DenseMatrix r = dense_of(a) - approx.reconstruct();
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(0.5 * (r + r.transpose()), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("eigenvalue solver did not converge");
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

double reference_error(SymmetricInput a, Index k, NormKind kind) {
  if (k < 0) throw ParameterError("reference_error: k must be >= 0");
  return tail_norm(eigen_magnitudes(a), k, kind);
}

ErrorRatio error_ratio(double residual, double reference, double a_norm) {
  if (reference <= kDegenerateTol * a_norm) return ErrorRatio{residual, true};
  return ErrorRatio{residual / reference, false};
}

ErrorRatio error_ratio(SymmetricInput a, const NystromApproximation& approx, Index k, NormKind kind) {
  const Index m = order_of(a);
  if (k < 1 || k >= m) throw ParameterError("error_ratio: k must lie in [1, m)");
  const Vector mags = eigen_magnitudes(a);
  return error_ratio(residual_norm(a, approx, kind), tail_norm(mags, k, kind), head_norm(mags, kind));
}

BestOfT best_of_t(const SymmetricMatrix& a, const SeededSampler& sampler, Index t, Index k,
                  std::uint64_t base_seed, IntersectionMethod method) {
  if (t < 1) throw ParameterError("best_of_t: t must be >= 1");
  const Index m = a.order();
  if (k < 1 || k >= m) throw ParameterError("best_of_t: k must lie in [1, m)");
  const SymmetricInput input = std::cref(a);
  const Vector mags = eigen_magnitudes(input);
  const double reference = tail_norm(mags, k, NormKind::frobenius);
  const double a_norm = head_norm(mags, NormKind::frobenius);

  std::vector<NystromApproximation> approx(static_cast<std::size_t>(t));
  std::vector<double> residual(static_cast<std::size_t>(t));
  BestOfT out;
  out.records.resize(static_cast<std::size_t>(t));

  for (Index i = 0; i < t; ++i) {
    const auto slot = static_cast<std::size_t>(i);
    const std::uint64_t seed = base_seed + static_cast<std::uint64_t>(i);
    const auto t0 = std::chrono::steady_clock::now();
    const ColumnSet cols = sampler(seed);
    const double sampling = seconds_since(t0);
    const auto t1 = std::chrono::steady_clock::now();
    approx[slot] = approximate(input, cols, method);
    const double intersection = seconds_since(t1);
    approx[slot].seed = seed;
    residual[slot] = residual_norm(input, approx[slot], NormKind::frobenius);
    const ErrorRatio ratio = error_ratio(residual[slot], reference, a_norm);

    TrialRecord& rec = out.records[slot];
    rec.method = std::string(to_string(method));
    rec.c = static_cast<Index>(cols.size());
    rec.trial = i;
    rec.seed = seed;
    rec.error_ratio = ratio.value;
    rec.degenerate = ratio.degenerate;
    rec.sampling_seconds = sampling;
    rec.intersection_seconds = intersection;
    rec.fallback = approx[slot].fallback;
  }

  const auto best = static_cast<std::size_t>(std::min_element(residual.begin(), residual.end()) - residual.begin());
  out.best = std::move(approx[best]);
  out.best_residual = residual[best];
  return out;
}

// ---------------------------------------------------------------------------

void write_approximation(std::ostream& out, const NystromApproximation& approx) {
  out.write(kApproxMagic, 4);
  put<std::uint32_t>(out, kApproxVersion);
  put<std::uint8_t>(out, static_cast<std::uint8_t>(approx.method));
  put<std::uint8_t>(out, approx.fallback ? 1 : 0);
  put<std::uint16_t>(out, 0);
  put<std::uint64_t>(out, approx.seed);
  put<std::uint64_t>(out, approx.columns.size());
  for (Index i : approx.columns.indices) put<std::uint64_t>(out, static_cast<std::uint64_t>(i));
  io::write_binary(out, approx.u.dense());
}

NystromApproximation read_approximation(std::istream& in) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kApproxMagic, 4) != 0) throw FormatError("bad magic in approximation file");
  if (get<std::uint32_t>(in) != kApproxVersion) throw FormatError("unsupported approximation version");
  NystromApproximation out;
  const auto method = get<std::uint8_t>(in);
  if (method > 2) throw FormatError("unknown intersection method tag");
  out.method = static_cast<IntersectionMethod>(method);
  out.fallback = get<std::uint8_t>(in) != 0;
  (void)get<std::uint16_t>(in);
  out.seed = get<std::uint64_t>(in);
  const auto c = get<std::uint64_t>(in);
  if (c > (1ULL << 31)) throw FormatError("implausible column count");
  out.columns.indices.reserve(c);
  for (std::uint64_t i = 0; i < c; ++i) out.columns.indices.push_back(static_cast<Index>(get<std::uint64_t>(in)));
  const DenseMatrix u = io::read_binary(in);
  if (u.rows() != static_cast<Index>(c) || u.cols() != static_cast<Index>(c)) {
    throw FormatError("intersection matrix size does not match column count");
  }
  out.u = SymmetricMatrix::from_lower(u);
  return out;
}

void write_approximation(const std::filesystem::path& path, const NystromApproximation& approx) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_approximation(out, approx);
  if (!out) throw IoError("write failed: " + path.string());
}

NystromApproximation read_approximation(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  return read_approximation(in);
}

}  // namespace nystrom
