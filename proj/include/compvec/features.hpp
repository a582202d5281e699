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

#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "compvec/matrix.hpp"
#include "compvec/stats.hpp"

namespace compvec {

/// N documents x D features, stored dense or sparse, with optional labels.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  static FeatureMatrix dense(Matrix rows, std::vector<std::string> labels = {});
  static FeatureMatrix sparse(std::vector<SparseVector> rows, std::size_t dim, std::vector<std::string> labels = {});

  std::size_t rows() const noexcept { return sparse_ ? sparse_rows_.size() : dense_.rows(); }
  std::size_t cols() const noexcept { return cols_; }
  bool is_sparse() const noexcept { return sparse_; }

  const Matrix& dense_rows() const noexcept { return dense_; }
  const std::vector<SparseVector>& sparse_rows() const noexcept { return sparse_rows_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  bool has_labels() const noexcept { return !labels_.empty(); }

  /// x_i . w
  double row_dot(std::size_t i, std::span<const double> w) const;
  /// w += alpha * x_i
  void row_axpy(std::size_t i, double alpha, std::span<double> w) const;
  double row_norm_sq(std::size_t i) const;
  /// Visits the non-zero (column, value) pairs of row i in column order.
  template <typename F>
  void for_each_nonzero(std::size_t i, F&& f) const {
    if (sparse_) {
      for (const auto& [c, v] : sparse_rows_[i].entries) f(static_cast<std::size_t>(c), v);
    } else {
      const auto r = dense_.row(i);
      for (std::size_t c = 0; c < r.size(); ++c) {
        if (r[c] != 0.0) f(c, r[c]);
      }
    }
  }

  Matrix to_dense() const;
  /// Throws DataError on non-finite values or a label count != rows().
  void validate() const;

 private:
  bool sparse_ = false;
  std::size_t cols_ = 0;
  Matrix dense_;
  std::vector<SparseVector> sparse_rows_;
  std::vector<std::string> labels_;
};

/// One-way ANOVA F statistic per feature: between-group mean square over
/// within-group mean square. Features with no variance at all score 0; a
/// feature with between-group but no within-group variance scores +infinity.
/// Sparse input is handled without densifying.
std::vector<double> anova_f_scores(const FeatureMatrix& x, std::span<const std::string> labels);

struct SelectionModel {
  enum class Kind { kAnovaF, kPca };
  Kind kind = Kind::kAnovaF;
  std::size_t input_dim = 0;
  std::vector<std::size_t> keep;                  // anova-f: by descending score
  Matrix projection;                              // pca: D x n, orthonormal columns
  std::vector<double> means;                      // pca: column means
  std::vector<double> explained_variance_ratio;   // pca: non-increasing

  std::size_t output_dim() const noexcept { return kind == Kind::kAnovaF ? keep.size() : projection.cols(); }

  void save(const std::filesystem::path& path) const;
  static SelectionModel load(const std::filesystem::path& path);
};

/// Per-column z-scores for the leading `width` columns of sparse rows; later
/// columns pass through unchanged. Constant columns are only centered.
struct ColumnScaler {
  std::vector<double> mean;
  std::vector<double> inv_sd;

  std::size_t width() const noexcept { return mean.size(); }
  static ColumnScaler fit(std::span<const SparseVector> rows, std::size_t width);
  SparseVector transform(const SparseVector& row) const;
};

/// Indices of the k largest scores, ties by ascending index.
SelectionModel select_top_k(std::span<const double> scores, std::size_t k);

/// Top-n principal directions of the mean-centered data (thin SVD).
/// Requires 1 <= n <= min(N, D).
SelectionModel pca_fit(const FeatureMatrix& x, std::size_t n);

/// anova-f: column subset in selection order. pca: (X - means) * projection.
FeatureMatrix apply(const SelectionModel& model, const FeatureMatrix& x);

}  // namespace compvec
