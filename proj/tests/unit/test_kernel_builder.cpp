#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include <Eigen/Eigenvalues>

#include "../oracles.hpp"
#include "nystrom/kernel_builder.hpp"

using namespace nystrom;
namespace fs = std::filesystem;

namespace {

fs::path write_file(const std::string& name, const std::string& text) {
  const fs::path dir = fs::temp_directory_path() / "nystrom_kb";
  fs::create_directories(dir);
  std::ofstream(dir / name) << text;
  return dir / name;
}

Dataset random_dataset(Index m, Index d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Dataset data;
  data.values.resize(m, d);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < d; ++j) data.values(i, j) = u(rng);
  return data;
}

}  // namespace

TEST_CASE("csv dataset loading and normalisation") {
  const auto path = write_file("three.csv", "1,2\n3,4\n5,6\n");
  const Dataset none = load_dataset(path, DatasetFormat::csv, Normalization::none);
  CHECK(none.instances() == 3);
  CHECK(none.attributes() == 2);
  CHECK(none.values(2, 1) == 6);

  const Dataset mm = load_dataset(path, DatasetFormat::csv, Normalization::minmax);
  CHECK(mm.values(0, 0) == doctest::Approx(0));
  CHECK(mm.values(1, 0) == doctest::Approx(0.5));
  CHECK(mm.values(2, 0) == doctest::Approx(1));
  CHECK(mm.normalization == Normalization::minmax);

  const Dataset z = load_dataset(path, DatasetFormat::csv, Normalization::zscore);
  for (Index j = 0; j < 2; ++j) {
    const Vector col = z.values.col(j);
    const double mean = col.mean();
    const double sd = std::sqrt((col.array() - mean).square().mean());
    CHECK(std::abs(mean) <= 1e-10);
    CHECK(sd == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("csv header and label column") {
  const auto path = write_file("labelled.csv", "a,label,b\n1,7,2\n3,8,4\n");
  CsvOptions opt;
  opt.header = true;
  opt.label_column = 1;
  const Dataset d = load_dataset(path, DatasetFormat::csv, Normalization::none, opt);
  CHECK(d.attributes() == 2);
  CHECK(d.values(1, 1) == 4);
}

TEST_CASE("dataset errors carry line numbers") {
  try {
    load_dataset(write_file("ragged.csv", "1,2\n3,4\n5\n"), DatasetFormat::csv, Normalization::none);
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    CHECK(e.line() == 3);
  }
  CHECK_THROWS_AS(load_dataset(write_file("text.csv", "1,2\n3,x\n"), DatasetFormat::csv, Normalization::none),
                  DataError);
  CHECK_THROWS_AS(load_dataset(write_file("one.csv", "1,2\n"), DatasetFormat::csv, Normalization::none), DataError);
  CHECK_THROWS_AS(load_dataset("/nonexistent/file.csv", DatasetFormat::csv, Normalization::none), IoError);
}

TEST_CASE("libsvm loading") {
  const auto path = write_file("d.svm", "+1 1:0.5 3:2\n-1 2:1.5\n");
  const Dataset d = load_dataset(path, DatasetFormat::libsvm, Normalization::none);
  CHECK(d.instances() == 2);
  CHECK(d.attributes() == 3);
  CHECK(d.values(0, 2) == 2.0);
  CHECK(d.values(0, 1) == 0.0);
  CHECK(d.values(1, 1) == 1.5);
  CHECK_THROWS_AS(load_dataset(write_file("bad.svm", "1 0:1\n1 1:1\n"), DatasetFormat::libsvm, Normalization::none),
                  FormatError);
}

TEST_CASE("constant columns normalise to zero") {
  Dataset d;
  d.values.resize(3, 1);
  d.values << 2, 2, 2;
  Dataset z = d;
  normalize(z, Normalization::zscore);
  CHECK(z.values.norm() == 0.0);
  normalize(d, Normalization::minmax);
  CHECK(d.values.norm() == 0.0);
}

TEST_CASE("rbf kernel entries") {
  Dataset d;
  d.values.resize(2, 1);
  d.values << 0.0, 0.2;
  const SymmetricMatrix k = rbf_kernel(d, 0.2);
  CHECK(k(0, 0) == 1.0);
  CHECK(k(1, 1) == 1.0);
  CHECK(k(0, 1) == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
  CHECK(k(0, 1) == doctest::Approx(0.606531).epsilon(1e-6));

  const Dataset r = random_dataset(30, 4, 1);
  const SymmetricMatrix wide = rbf_kernel(r, 1e6);
  CHECK(wide.dense().minCoeff() >= 1.0 - 1e-6);
  CHECK_THROWS_AS(rbf_kernel(r, 0.0), ParameterError);
  CHECK_THROWS_AS(rbf_kernel(r, -1.0), ParameterError);
}

TEST_CASE("rbf kernel is SPSD with unit diagonal") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Dataset r = random_dataset(120, 5, seed);
    const SymmetricMatrix k = rbf_kernel(r, 0.2);
    CHECK((k.dense().diagonal().array() == 1.0).all());
    CHECK(k.dense().maxCoeff() <= 1.0);
    CHECK(k.dense().minCoeff() > 0.0);
    CHECK(oracle::rel_diff(k.dense(), oracle::rbf(r.values, 0.2)) <= 1e-13);
    const Vector ev = Eigen::SelfAdjointEigenSolver<DenseMatrix>(k.dense(), Eigen::EigenvaluesOnly).eigenvalues();
    CHECK(ev.minCoeff() >= -1e-8 * ev.maxCoeff());
  }
}

TEST_CASE("sparsify keeps the largest off-diagonal entries") {
  DenseMatrix m(3, 3);
  m << 1, 0.9, 0.1, 0.9, 1, 0.5, 0.1, 0.5, 1;
  const SymmetricMatrix k = SymmetricMatrix::from_lower(m);

  const SparsifyResult all = sparsify(k, 1.0);
  CHECK(all.matrix.nnz() == 9);

  const SparsifyResult top1 = sparsify(k, 1.0 / 3.0);
  CHECK(top1.matrix.nnz() == 5);
  CHECK(top1.matrix(1, 0) == 0.9);
  CHECK(top1.matrix(0, 1) == 0.9);
  CHECK(top1.matrix(2, 1) == 0.0);
  CHECK(top1.matrix(2, 2) == 1.0);

  const SparsifyResult tiny = sparsify(k, 0.01);
  CHECK(tiny.diagonal_forced);
  CHECK(tiny.matrix.nnz() == 3);

  CHECK_THROWS_AS(sparsify(k, 0.0), ParameterError);
  CHECK_THROWS_AS(sparsify(k, 1.5), ParameterError);
}

TEST_CASE("sparsify ties are all kept") {
  DenseMatrix m = DenseMatrix::Identity(3, 3);
  m(1, 0) = m(0, 1) = 0.5;
  m(2, 0) = m(0, 2) = 0.5;
  m(2, 1) = m(1, 2) = 0.1;
  const SparsifyResult s = sparsify(SymmetricMatrix::from_lower(m), 1.0 / 3.0);
  CHECK(s.matrix.nnz() == 7);
}

TEST_CASE("sparsify density and monotonicity") {
  const SymmetricMatrix k = rbf_kernel(random_dataset(200, 3, 9), 0.2);
  const double m2 = 200.0 * 200.0;
  std::size_t prev = 0;
  for (double f : {0.01, 0.05, 0.1, 0.3, 0.7, 1.0}) {
    const SparsifyResult s = sparsify(k, f);
    const double density = static_cast<double>(s.matrix.nnz()) / m2;
    CHECK(std::abs(density - f) <= 0.005);
    CHECK(s.matrix.nnz() >= prev);
    prev = s.matrix.nnz();
    const DenseMatrix d = s.matrix.to_dense();
    CHECK(d == d.transpose());
  }
}

TEST_CASE("enum parsing") {
  CHECK(parse_normalization("zscore") == Normalization::zscore);
  CHECK(parse_dataset_format("libsvm") == DatasetFormat::libsvm);
  CHECK(to_string(Normalization::minmax) == "minmax");
  CHECK_THROWS_AS(parse_normalization("l2"), ParameterError);
  CHECK_THROWS_AS(parse_dataset_format("arff"), ParameterError);
}
