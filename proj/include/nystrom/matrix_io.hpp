#pragma once

#include <filesystem>
#include <iosfwd>
#include <variant>

#include "nystrom/matrix.hpp"

namespace nystrom::io {

// Dense CSV: one matrix row per line, comma separated.
DenseMatrix read_csv(const std::filesystem::path& path);
void write_csv(const std::filesystem::path& path, const DenseMatrix& m);

// Raw little-endian binary: "NYSD", u64 rows, u64 cols, f64 entries column-major.
DenseMatrix read_binary(std::istream& in);
void write_binary(std::ostream& out, const DenseMatrix& m);
DenseMatrix read_binary(const std::filesystem::path& path);
void write_binary(const std::filesystem::path& path, const DenseMatrix& m);

// Matrix Market coordinate format. Reading accepts `symmetric` and `general`
// real/integer matrices (general ones must be symmetric); writing always emits
// `coordinate real symmetric` with the lower triangle.
SparseSymmetric read_matrix_market(const std::filesystem::path& path);
void write_matrix_market(const std::filesystem::path& path, const SparseSymmetric& m);

using AnyMatrix = std::variant<SymmetricMatrix, SparseSymmetric>;

// Dispatches on extension: .mtx -> sparse, .nysd/.bin -> binary, otherwise CSV.
// Dense sources must be symmetric (checked against the lower triangle to
// within 1e-12 relative).
AnyMatrix load_symmetric(const std::filesystem::path& path);
void save(const std::filesystem::path& path, const AnyMatrix& m);

}  // namespace nystrom::io
