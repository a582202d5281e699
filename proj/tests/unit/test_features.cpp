// Copyright 2026 The compvec Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "compvec/errors.hpp"
#include "compvec/features.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace compvec;
using compvec::testing::TempDir;

namespace {

Matrix random_matrix(std::uint64_t seed, std::size_t n, std::size_t d) {
  Rng rng(seed);
  Matrix m(n, d);
  for (auto& x : m.data()) x = rng.normal();
  return m;
}

std::vector<SparseVector> to_sparse(const Matrix& m) {
  std::vector<SparseVector> rows;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    SparseVector v;
    v.dim = m.cols();
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (m(i, j) != 0.0) v.entries.emplace_back(static_cast<std::uint32_t>(j), m(i, j));
    }
    rows.push_back(std::move(v));
  }
  return rows;
}

Eigen::MatrixXd as_eigen(const Matrix& m) {
  Eigen::MatrixXd e(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
  return e;
}

struct Reconstruction {
  double max_abs = 0;
  double sum_sq = 0;
};

Reconstruction reconstruction_error(const Matrix& x, const SelectionModel& m) {
  const auto z = apply(m, FeatureMatrix::dense(x)).to_dense();
  Reconstruction e;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < x.cols(); ++j) {
      double r = m.means[j];
      for (std::size_t c = 0; c < m.output_dim(); ++c) r += z(i, c) * m.projection(j, c);
      e.max_abs = std::max(e.max_abs, std::abs(r - x(i, j)));
      e.sum_sq += (r - x(i, j)) * (r - x(i, j));
    }
  }
  return e;
}

}  // namespace

TEST(FeatureMatrix, DenseSparseAccessorsAgree) {
  auto m = random_matrix(1, 5, 4);
  m(2, 1) = 0.0;
  const auto d = FeatureMatrix::dense(m);
  const auto s = FeatureMatrix::sparse(to_sparse(m), 4);
  const std::vector<double> w{1, -2, 0.5, 3};
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_NEAR(d.row_dot(i, w), s.row_dot(i, w), 1e-14);
    EXPECT_NEAR(d.row_norm_sq(i), s.row_norm_sq(i), 1e-14);
    std::vector<double> a(4, 0), b(4, 0);
    d.row_axpy(i, 0.5, a);
    s.row_axpy(i, 0.5, b);
    EXPECT_EQ(a, b);
  }
  EXPECT_EQ(s.to_dense(), m);
  std::size_t visited = 0;
  d.for_each_nonzero(2, [&](std::size_t c, double) {
    EXPECT_NE(c, 1u);
    ++visited;
  });
  EXPECT_EQ(visited, 3u);
}

TEST(FeatureMatrix, ValidateCatchesBadInput) {
  Matrix m(2, 2, 1.0);
  EXPECT_THROW(FeatureMatrix::dense(m, {"a"}).validate(), DataError);
  m(1, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(FeatureMatrix::dense(m).validate(), DataError);
  EXPECT_THROW(FeatureMatrix::sparse({SparseVector{{{0, 1.0}}, 5}}, 3), LayoutError);
}

TEST(Anova, MatchesTextbookComputation) {
  const auto x = random_matrix(7, 50, 10);
  std::vector<std::string> labels;
  Rng rng(8);
  for (std::size_t i = 0; i < 50; ++i) labels.push_back(i < 3 ? "abc"[i] + std::string() : "abc"[rng.below(3)] + std::string());
  const auto got = anova_f_scores(FeatureMatrix::dense(x), labels);
  ASSERT_EQ(got.size(), 10u);
  for (std::size_t j = 0; j < 10; ++j) EXPECT_NEAR(got[j], oracle::anova_f(x, labels, j), 1e-9 * (1 + got[j]));
  const auto sparse = anova_f_scores(FeatureMatrix::sparse(to_sparse(x), 10), labels);
  for (std::size_t j = 0; j < 10; ++j) EXPECT_NEAR(sparse[j], got[j], 1e-9 * (1 + got[j]));
}

TEST(Anova, ConstantAndPerfectlySeparatedColumns) {
  auto x = random_matrix(9, 20, 4);
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < 20; ++i) {
    labels.push_back(i % 2 ? "pos" : "neg");
    x(i, 1) = 3.0;                     // constant
    x(i, 2) = i % 2 ? 1.0 : -1.0;      // no within-group variance
  }
  const auto f = anova_f_scores(FeatureMatrix::dense(x), labels);
  EXPECT_EQ(f[1], 0.0);
  EXPECT_TRUE(std::isinf(f[2]) && f[2] > 0);
  EXPECT_EQ(select_top_k(f, 1).keep, (std::vector<std::size_t>{2}));
}

TEST(Anova, SparseHandlesImplicitZeros) {
  Matrix x(6, 3, 0.0);
  x(0, 0) = 1, x(1, 0) = 2, x(3, 1) = 5, x(4, 2) = -1, x(5, 2) = 1;
  const std::vector<std::string> labels{"a", "a", "a", "b", "b", "b"};
  const auto s = anova_f_scores(FeatureMatrix::sparse(to_sparse(x), 3), labels);
  for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(s[j], oracle::anova_f(x, labels, j), 1e-12);
}

TEST(Anova, Errors) {
  const auto x = random_matrix(1, 4, 2);
  EXPECT_THROW(anova_f_scores(FeatureMatrix::dense(x), std::vector<std::string>{"a", "b"}), DataError);
  EXPECT_THROW(anova_f_scores(FeatureMatrix::dense(x), std::vector<std::string>(4, "a")), DataError);
  EXPECT_THROW(anova_f_scores(FeatureMatrix::dense(x), std::vector<std::string>{"a", "a", "a", "b"}), DataError);
}

TEST(SelectTopK, OrdersByScoreThenIndex) {
  const std::vector<double> scores{1.0, 5.0, 3.0, 5.0, 0.0};
  EXPECT_EQ(select_top_k(scores, 3).keep, (std::vector<std::size_t>{1, 3, 2}));
  EXPECT_THROW(select_top_k(scores, 0), RangeError);
  EXPECT_THROW(select_top_k(scores, 6), RangeError);
  const auto m = select_top_k(scores, 2);
  Matrix x(1, 5);
  for (std::size_t j = 0; j < 5; ++j) x(0, j) = static_cast<double>(j);
  const auto out = apply(m, FeatureMatrix::dense(x)).to_dense();
  EXPECT_EQ(out(0, 0), 1.0);
  EXPECT_EQ(out(0, 1), 3.0);
  const auto sparse_out = apply(m, FeatureMatrix::sparse(to_sparse(x), 5)).to_dense();
  EXPECT_EQ(sparse_out, out);
  EXPECT_THROW(apply(m, FeatureMatrix::dense(Matrix(1, 4))), LayoutError);
}

TEST(Pca, OrthonormalAndAgreesWithCovarianceEigenvalues) {
  const auto x = random_matrix(11, 40, 6);
  const auto m = pca_fit(FeatureMatrix::dense(x), 4);
  ASSERT_EQ(m.projection.rows(), 6u);
  ASSERT_EQ(m.projection.cols(), 4u);
  for (std::size_t a = 0; a < 4; ++a) {
    for (std::size_t b = 0; b < 4; ++b) {
      double g = 0;
      for (std::size_t j = 0; j < 6; ++j) g += m.projection(j, a) * m.projection(j, b);
      EXPECT_NEAR(g, a == b ? 1.0 : 0.0, 1e-8);
    }
  }
  for (std::size_t c = 1; c < 4; ++c) EXPECT_LE(m.explained_variance_ratio[c], m.explained_variance_ratio[c - 1]);

  Eigen::MatrixXd e = as_eigen(x);
  e.rowwise() -= e.colwise().mean();
  const Eigen::MatrixXd cov = e.transpose() * e / static_cast<double>(x.rows() - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  const auto values = solver.eigenvalues().reverse();
  const double total = values.sum();
  for (std::size_t c = 0; c < 4; ++c) {
    EXPECT_NEAR(m.explained_variance_ratio[c], values(static_cast<Eigen::Index>(c)) / total, 1e-10);
    // Same direction up to sign.
    const auto vec = solver.eigenvectors().col(static_cast<Eigen::Index>(5 - c));
    double dot = 0;
    for (std::size_t j = 0; j < 6; ++j) dot += vec(static_cast<Eigen::Index>(j)) * m.projection(j, c);
    EXPECT_NEAR(std::abs(dot), 1.0, 1e-8);
  }

  const auto z = apply(m, FeatureMatrix::dense(x)).to_dense();
  double proj_var = 0;
  for (std::size_t c = 0; c < 4; ++c) {
    double s = 0;
    for (std::size_t i = 0; i < x.rows(); ++i) s += z(i, c) * z(i, c);
    proj_var += s / static_cast<double>(x.rows() - 1);
  }
  EXPECT_LE(proj_var, total + 1e-12);
}

TEST(Pca, FullRankReconstructionAndMonotoneError) {
  const auto x = random_matrix(12, 30, 8);
  double prev = std::numeric_limits<double>::infinity();
  Reconstruction err;
  for (std::size_t n = 1; n <= 8; ++n) {
    err = reconstruction_error(x, pca_fit(FeatureMatrix::dense(x), n));
    EXPECT_LE(err.sum_sq, prev + 1e-12);
    prev = err.sum_sq;
  }
  EXPECT_LE(err.max_abs, 1e-9);
}

TEST(Pca, SparseInputMatchesDense) {
  auto x = random_matrix(13, 25, 7);
  for (std::size_t i = 0; i < 25; ++i) x(i, i % 7) = 0.0;
  const auto a = pca_fit(FeatureMatrix::dense(x), 3);
  const auto b = pca_fit(FeatureMatrix::sparse(to_sparse(x), 7), 3);
  for (std::size_t c = 0; c < 3; ++c) EXPECT_NEAR(a.explained_variance_ratio[c], b.explained_variance_ratio[c], 1e-12);
}

TEST(Pca, RejectsComponentCountOutOfRange) {
  const auto x = random_matrix(14, 5, 8);
  EXPECT_THROW(pca_fit(FeatureMatrix::dense(x), 6), RangeError);
  EXPECT_THROW(pca_fit(FeatureMatrix::dense(x), 0), RangeError);
  EXPECT_NO_THROW(pca_fit(FeatureMatrix::dense(x), 5));
  const auto tall = random_matrix(15, 20, 3);
  EXPECT_THROW(pca_fit(FeatureMatrix::dense(tall), 4), RangeError);
}

TEST(SelectionModel, SaveLoadRoundTrip) {
  TempDir tmp;
  const auto x = random_matrix(16, 12, 5);
  const auto pca = pca_fit(FeatureMatrix::dense(x), 3);
  pca.save(tmp / "pca.txt");
  const auto back = SelectionModel::load(tmp / "pca.txt");
  EXPECT_EQ(back.kind, SelectionModel::Kind::kPca);
  EXPECT_EQ(apply(back, FeatureMatrix::dense(x)).to_dense(), apply(pca, FeatureMatrix::dense(x)).to_dense());

  const auto top = select_top_k(std::vector<double>{0.1, 0.9, 0.5, 0.2, 0.3}, 2);
  top.save(tmp / "anova.txt");
  const auto back2 = SelectionModel::load(tmp / "anova.txt");
  EXPECT_EQ(back2.keep, top.keep);
  EXPECT_EQ(back2.input_dim, 5u);
  compvec::testing::write_text(tmp / "junk.txt", "lasso 3 1\n");
  EXPECT_THROW(SelectionModel::load(tmp / "junk.txt"), FormatError);
}

TEST(ColumnScaler, StandardizesLeadingColumnsOnly) {
  Matrix x(4, 3, 0.0);
  x(0, 0) = 1, x(1, 0) = 3, x(2, 0) = 5, x(3, 0) = 7;
  x(0, 1) = 2, x(1, 1) = 2, x(2, 1) = 2, x(3, 1) = 2;
  x(1, 2) = 9;
  const auto rows = to_sparse(x);
  const auto sc = ColumnScaler::fit(rows, 2);
  EXPECT_EQ(sc.width(), 2u);
  Matrix z(4, 3);
  for (std::size_t i = 0; i < 4; ++i) {
    for (const auto& [j, v] : sc.transform(rows[i]).entries) z(i, j) = v;
  }
  double mean = 0, sq = 0;
  for (std::size_t i = 0; i < 4; ++i) mean += z(i, 0), sq += z(i, 0) * z(i, 0);
  EXPECT_NEAR(mean, 0.0, 1e-12);
  EXPECT_NEAR(sq / 4, 1.0, 1e-12);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(z(i, 1), 0.0);  // constant: centered only
  EXPECT_EQ(z(1, 2), 9.0);
  EXPECT_THROW(sc.transform(SparseVector{{}, 1}), LayoutError);
  EXPECT_THROW(ColumnScaler::fit({}, 2), DataError);
}
