#include "nystrom/matrix_io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace nystrom::io {
namespace {

static_assert(std::endian::native == std::endian::little,
              "binary matrix format assumes a little-endian host");

constexpr char kMagic[4] = {'N', 'Y', 'S', 'D'};

std::ifstream open_in(const std::filesystem::path& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_double(std::string_view field, std::size_t line) {
  field = trim(field);
  double v = 0.0;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw FormatError("not a number: '" + std::string(field) + "'", line);
  }
  if (!std::isfinite(v)) throw DataError("non-finite value at line " + std::to_string(line));
  return v;
}

template <typename T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw FormatError("truncated binary matrix");
  return v;
}

std::string lower(std::string s) {
  for (auto& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return s;
}

}  // namespace

DenseMatrix read_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = trim(line);
    if (t.empty()) continue;
    std::vector<double> row;
    std::size_t start = 0;
    while (true) {
      const auto comma = t.find(',', start);
      row.push_back(parse_double(t.substr(start, comma - start), lineno));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw FormatError("ragged CSV row: expected " + std::to_string(rows.front().size()) +
                            " fields, got " + std::to_string(row.size()),
                        lineno);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw FormatError("empty CSV matrix " + path.string());
  DenseMatrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return m;
}

void write_csv(const std::filesystem::path& path, const DenseMatrix& m) {
  auto out = open_out(path);
  char buf[32];
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      const auto res = std::to_chars(buf, buf + sizeof buf, m(i, j));
      if (j) out << ',';
      out.write(buf, res.ptr - buf);
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

void write_binary(std::ostream& out, const DenseMatrix& m) {
  out.write(kMagic, 4);
  put<std::uint64_t>(out, static_cast<std::uint64_t>(m.rows()));
  put<std::uint64_t>(out, static_cast<std::uint64_t>(m.cols()));
  out.write(reinterpret_cast<const char*>(m.data()),
            static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(m.size())));
}

DenseMatrix read_binary(std::istream& in) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) throw FormatError("bad magic in binary matrix");
  const auto rows = get<std::uint64_t>(in);
  const auto cols = get<std::uint64_t>(in);
  if (rows > (1ULL << 31) || cols > (1ULL << 31)) throw FormatError("implausible matrix dimensions");
  DenseMatrix m(static_cast<Index>(rows), static_cast<Index>(cols));
  in.read(reinterpret_cast<char*>(m.data()),
          static_cast<std::streamsize>(sizeof(double) * rows * cols));
  if (!in) throw FormatError("truncated binary matrix payload");
  require_finite(m, "binary matrix");
  return m;
}

DenseMatrix read_binary(const std::filesystem::path& path) {
  auto in = open_in(path, std::ios::binary);
  return read_binary(in);
}

void write_binary(const std::filesystem::path& path, const DenseMatrix& m) {
  auto out = open_out(path, std::ios::binary);
  write_binary(out, m);
  if (!out) throw IoError("write failed: " + path.string());
}

SparseSymmetric read_matrix_market(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) throw FormatError("empty Matrix Market file", 1);
  ++lineno;
  std::istringstream banner(lower(line));
  std::string tag, object, format, field, symmetry;
  banner >> tag >> object >> format >> field >> symmetry;
  if (tag != "%%matrixmarket" || object != "matrix") throw FormatError("missing MatrixMarket banner", 1);
  if (format != "coordinate") throw FormatError("only coordinate format is supported", 1);
  if (field != "real" && field != "integer" && field != "double") {
    throw FormatError("unsupported field type '" + field + "'", 1);
  }
  if (symmetry != "symmetric" && symmetry != "general") {
    throw FormatError("unsupported symmetry '" + symmetry + "'", 1);
  }
  const bool general = symmetry == "general";

  long long rows = -1, cols = -1, entries = -1;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = trim(line);
    if (t.empty() || t.front() == '%') continue;
    std::istringstream hdr{std::string(t)};
    if (!(hdr >> rows >> cols >> entries)) throw FormatError("bad size line", lineno);
    break;
  }
  if (rows < 1 || rows != cols || entries < 0) throw FormatError("matrix must be square and non-empty", lineno);

  std::vector<Triplet> lowers;
  std::vector<Triplet> uppers;
  lowers.reserve(static_cast<std::size_t>(entries));
  long long seen = 0;
  while (seen < entries && std::getline(in, line)) {
    ++lineno;
    const auto t = trim(line);
    if (t.empty() || t.front() == '%') continue;
    std::istringstream row{std::string(t)};
    long long i = 0, j = 0;
    std::string vs;
    if (!(row >> i >> j >> vs)) throw FormatError("bad entry line", lineno);
    const double v = parse_double(vs, lineno);
    if (i < 1 || i > rows || j < 1 || j > cols) throw FormatError("entry index out of range", lineno);
    ++seen;
    if (v == 0.0) continue;
    Triplet tr{static_cast<Index>(i - 1), static_cast<Index>(j - 1), v};
    if (tr.row >= tr.col) {
      lowers.push_back(tr);
    } else if (general) {
      uppers.push_back(Triplet{tr.col, tr.row, v});
    } else {
      throw FormatError("symmetric Matrix Market file has an upper-triangle entry", lineno);
    }
  }
  if (seen != entries) throw FormatError("expected " + std::to_string(entries) + " entries, got " + std::to_string(seen), lineno);

  if (general) {
    // Every strictly-lower entry must be mirrored by an equal upper entry.
    auto key = [](const Triplet& a, const Triplet& b) {
      return a.col != b.col ? a.col < b.col : a.row < b.row;
    };
    std::sort(uppers.begin(), uppers.end(), key);
    std::vector<Triplet> strict;
    for (const auto& t : lowers)
      if (t.row != t.col) strict.push_back(t);
    std::sort(strict.begin(), strict.end(), key);
    bool ok = strict.size() == uppers.size();
    for (std::size_t k = 0; ok && k < strict.size(); ++k) {
      ok = strict[k].row == uppers[k].row && strict[k].col == uppers[k].col &&
           strict[k].value == uppers[k].value;
    }
    if (!ok) throw DataError("general Matrix Market input is not symmetric: " + path.string());
  }
  return SparseSymmetric(static_cast<Index>(rows), std::move(lowers));
}

void write_matrix_market(const std::filesystem::path& path, const SparseSymmetric& m) {
  auto out = open_out(path);
  out << "%%MatrixMarket matrix coordinate real symmetric\n";
  out << m.order() << ' ' << m.order() << ' ' << m.lower_entries().size() << '\n';
  char buf[32];
  for (const auto& t : m.lower_entries()) {
    const auto res = std::to_chars(buf, buf + sizeof buf, t.value);
    out << (t.row + 1) << ' ' << (t.col + 1) << ' ';
    out.write(buf, res.ptr - buf);
    out << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

AnyMatrix load_symmetric(const std::filesystem::path& path) {
  const auto ext = lower(path.extension().string());
  if (ext == ".mtx") return read_matrix_market(path);
  DenseMatrix d = (ext == ".nysd" || ext == ".bin") ? read_binary(path) : read_csv(path);
  if (d.rows() != d.cols()) throw DataError("matrix in " + path.string() + " is not square");
  const double scale = std::max(1.0, d.cwiseAbs().maxCoeff());
  if ((d - d.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw DataError("matrix in " + path.string() + " is not symmetric");
  }
  return SymmetricMatrix::from_lower(d);
}

void save(const std::filesystem::path& path, const AnyMatrix& m) {
  const auto ext = lower(path.extension().string());
  if (const auto* sp = std::get_if<SparseSymmetric>(&m)) {
    if (ext == ".mtx") return write_matrix_market(path, *sp);
    const DenseMatrix d = sp->to_dense();
    if (ext == ".nysd" || ext == ".bin") return write_binary(path, d);
    return write_csv(path, d);
  }
  const auto& dense = std::get<SymmetricMatrix>(m);
  if (ext == ".mtx") {
    std::vector<Triplet> lo;
    for (Index j = 0; j < dense.order(); ++j)
      for (Index i = j; i < dense.order(); ++i)
        if (dense(i, j) != 0.0) lo.push_back({i, j, dense(i, j)});
    return write_matrix_market(path, SparseSymmetric(dense.order(), std::move(lo)));
  }
  if (ext == ".nysd" || ext == ".bin") return write_binary(path, dense.dense());
  write_csv(path, dense.dense());
}

}  // namespace nystrom::io
