#pragma once

#include <filesystem>
#include <optional>
#include <string_view>

#include "nystrom/matrix.hpp"

namespace nystrom {

enum class Normalization { none, zscore, minmax };
enum class DatasetFormat { csv, libsvm };

Normalization parse_normalization(std::string_view s);
DatasetFormat parse_dataset_format(std::string_view s);
std::string_view to_string(Normalization n);

// m instances (rows) by d attributes (columns).
struct Dataset {
  DenseMatrix values;
  Normalization normalization = Normalization::none;

  Index instances() const noexcept { return values.rows(); }
  Index attributes() const noexcept { return values.cols(); }
};

struct CsvOptions {
  bool header = false;
  // Zero-based column holding a label to drop.
  std::optional<Index> label_column;
};

struct KernelConfig {
  double sigma = 0.2;
  Normalization normalization = Normalization::minmax;
  std::optional<double> sparsify_fraction;
};

// csv: comma separated numeric fields. libsvm: "label idx:value ..." with
// 1-based feature indices; the label is always dropped and missing features
// are zero.
Dataset load_dataset(const std::filesystem::path& path, DatasetFormat format,
                     Normalization normalization, const CsvOptions& csv = {});

// Applies per-attribute normalization in place. zscore uses the population
// standard deviation; constant attributes map to 0 under both schemes.
void normalize(Dataset& data, Normalization normalization);

SymmetricMatrix rbf_kernel(const Dataset& data, double sigma);

struct SparsifyResult {
  SparseSymmetric matrix;
  // Set when the requested fraction could not even cover the diagonal.
  bool diagonal_forced = false;
};

// Keeps the diagonal plus the round(f * pairs) largest-magnitude off-diagonal
// pairs, extended to every pair tied with the smallest kept magnitude.
// Entries that are exactly zero are never stored.
SparsifyResult sparsify(const SymmetricMatrix& k, double nnz_fraction);

}  // namespace nystrom
