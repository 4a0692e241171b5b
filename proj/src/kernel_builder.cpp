#include "nystrom/kernel_builder.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <spdlog/spdlog.h>

#include "nystrom/kernels.hpp"

namespace nystrom {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_cell(std::string_view field, std::size_t line, std::size_t column) {
  field = trim(field);
  double v = 0.0;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, v);
  if (ec != std::errc() || ptr != end || field.empty()) {
    throw DataError("non-numeric cell '" + std::string(field) + "' at line " +
                    std::to_string(line) + ", column " + std::to_string(column + 1));
  }
  if (!std::isfinite(v)) throw DataError("non-finite cell at line " + std::to_string(line));
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

DenseMatrix read_csv_dataset(std::ifstream& in, const CsvOptions& opt) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  std::size_t width = 0;
  bool header_pending = opt.header;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = trim(line);
    if (t.empty()) continue;
    const auto fields = split(t, ',');
    if (header_pending) {
      header_pending = false;
      width = fields.size();
      continue;
    }
    if (width == 0) width = fields.size();
    if (fields.size() != width) {
      throw FormatError("expected " + std::to_string(width) + " fields, got " +
                            std::to_string(fields.size()),
                        lineno);
    }
    if (opt.label_column && *opt.label_column >= static_cast<Index>(width)) {
      throw FormatError("label column " + std::to_string(*opt.label_column) + " out of range", lineno);
    }
    std::vector<double> row;
    row.reserve(width);
    for (std::size_t j = 0; j < fields.size(); ++j) {
      if (opt.label_column && static_cast<Index>(j) == *opt.label_column) continue;
      row.push_back(parse_cell(fields[j], lineno, j));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty() || rows.front().empty()) throw FormatError("dataset has no numeric rows");
  DenseMatrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return m;
}

DenseMatrix read_libsvm_dataset(std::ifstream& in) {
  std::vector<std::map<Index, double>> rows;
  Index width = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    std::map<Index, double> row;
    bool first = true;
    for (auto tok : split(t, ' ')) {
      tok = trim(tok);
      if (tok.empty()) continue;
      if (first) {
        first = false;  // label
        continue;
      }
      const auto colon = tok.find(':');
      if (colon == std::string_view::npos) throw FormatError("expected index:value, got '" + std::string(tok) + "'", lineno);
      long long idx = 0;
      const auto key = tok.substr(0, colon);
      const auto [p, ec] = std::from_chars(key.data(), key.data() + key.size(), idx);
      if (ec != std::errc() || p != key.data() + key.size() || idx < 1) {
        throw FormatError("bad feature index '" + std::string(key) + "'", lineno);
      }
      row[static_cast<Index>(idx - 1)] = parse_cell(tok.substr(colon + 1), lineno, static_cast<std::size_t>(idx - 1));
      width = std::max(width, static_cast<Index>(idx));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty() || width == 0) throw FormatError("dataset has no features");
  DenseMatrix m = DenseMatrix::Zero(static_cast<Index>(rows.size()), width);
  for (Index i = 0; i < m.rows(); ++i)
    for (const auto& [j, v] : rows[static_cast<std::size_t>(i)]) m(i, j) = v;
  return m;
}

}  // namespace

Normalization parse_normalization(std::string_view s) {
  if (s == "none") return Normalization::none;
  if (s == "zscore") return Normalization::zscore;
  if (s == "minmax") return Normalization::minmax;
  throw ParameterError("unknown normalization '" + std::string(s) + "'");
}

DatasetFormat parse_dataset_format(std::string_view s) {
  if (s == "csv") return DatasetFormat::csv;
  if (s == "libsvm") return DatasetFormat::libsvm;
  throw ParameterError("unknown dataset format '" + std::string(s) + "'");
}

std::string_view to_string(Normalization n) {
  switch (n) {
    case Normalization::none: return "none";
    case Normalization::zscore: return "zscore";
    case Normalization::minmax: return "minmax";
  }
  return "none";
}

Dataset load_dataset(const std::filesystem::path& path, DatasetFormat format,
                     Normalization normalization, const CsvOptions& csv) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset " + path.string());
  Dataset data;
  data.values = format == DatasetFormat::csv ? read_csv_dataset(in, csv) : read_libsvm_dataset(in);
  if (data.instances() < 2) throw DataError("dataset needs at least 2 instances");
  normalize(data, normalization);
  return data;
}

void normalize(Dataset& data, Normalization normalization) {
  auto& x = data.values;
  const double n = static_cast<double>(x.rows());
  for (Index j = 0; j < x.cols(); ++j) {
    auto col = x.col(j);
    if (normalization == Normalization::minmax) {
      const double lo = col.minCoeff();
      const double span = col.maxCoeff() - lo;
      if (span > 0.0) {
        col = (col.array() - lo) / span;
      } else {
        col.setZero();
      }
    } else if (normalization == Normalization::zscore) {
      const double mean = col.mean();
      col.array() -= mean;
      const double sd = std::sqrt(col.squaredNorm() / n);
      if (sd > 0.0) {
        col /= sd;
      } else {
        col.setZero();
      }
    }
  }
  data.normalization = normalization;
}

SymmetricMatrix rbf_kernel(const Dataset& data, double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ParameterError("rbf_kernel: sigma must be > 0");
  return SymmetricMatrix::from_lower(kernels::rbf_gram(data.values, sigma));
}

SparsifyResult sparsify(const SymmetricMatrix& k, double nnz_fraction) {
  if (!(nnz_fraction > 0.0 && nnz_fraction <= 1.0)) {
    throw ParameterError("sparsify: fraction must lie in (0, 1]");
  }
  const Index m = k.order();
  SparsifyResult result;
  const double target_total = nnz_fraction * static_cast<double>(m) * static_cast<double>(m);
  if (target_total < static_cast<double>(m)) {
    result.diagonal_forced = true;
    spdlog::warn("sparsify: fraction {} keeps fewer entries than the diagonal; diagonal kept anyway",
                 nnz_fraction);
  }

  std::vector<double> mags;
  mags.reserve(static_cast<std::size_t>(m) * static_cast<std::size_t>(m - 1) / 2);
  for (Index j = 0; j < m; ++j)
    for (Index i = j + 1; i < m; ++i) mags.push_back(std::abs(k(i, j)));

  const auto pairs = mags.size();
  const auto keep = static_cast<std::size_t>(std::llround(nnz_fraction * static_cast<double>(pairs)));
  double threshold = std::numeric_limits<double>::infinity();
  if (keep >= pairs) {
    threshold = 0.0;
  } else if (keep > 0) {
    std::nth_element(mags.begin(), mags.begin() + static_cast<std::ptrdiff_t>(keep - 1), mags.end(),
                     std::greater<>());
    threshold = mags[keep - 1];
  }

  std::vector<Triplet> lower;
  for (Index j = 0; j < m; ++j) {
    if (k(j, j) != 0.0) lower.push_back({j, j, k(j, j)});
    for (Index i = j + 1; i < m; ++i) {
      const double v = k(i, j);
      if (v != 0.0 && std::abs(v) >= threshold) lower.push_back({i, j, v});
    }
  }
  result.matrix = SparseSymmetric(m, std::move(lower));
  return result;
}

}  // namespace nystrom
