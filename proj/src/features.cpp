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

#include "compvec/features.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include "compvec/errors.hpp"
#include "compvec/simd.hpp"

namespace compvec {

FeatureMatrix FeatureMatrix::dense(Matrix rows, std::vector<std::string> labels) {
  FeatureMatrix m;
  m.sparse_ = false;
  m.cols_ = rows.cols();
  m.dense_ = std::move(rows);
  m.labels_ = std::move(labels);
  m.validate();
  return m;
}

FeatureMatrix FeatureMatrix::sparse(std::vector<SparseVector> rows, std::size_t dim, std::vector<std::string> labels) {
  FeatureMatrix m;
  m.sparse_ = true;
  m.cols_ = dim;
  for (auto& r : rows) {
    if (r.dim > dim) throw LayoutError("sparse row of width " + std::to_string(r.dim) + " in a matrix of width " +
                                       std::to_string(dim));
    r.dim = dim;
  }
  m.sparse_rows_ = std::move(rows);
  m.labels_ = std::move(labels);
  m.validate();
  return m;
}

void FeatureMatrix::validate() const {
  if (!labels_.empty() && labels_.size() != rows()) {
    throw DataError("feature matrix has " + std::to_string(rows()) + " rows but " + std::to_string(labels_.size()) +
                    " labels");
  }
  for (std::size_t i = 0; i < rows(); ++i) {
    for_each_nonzero(i, [&](std::size_t c, double v) {
      if (!std::isfinite(v)) {
        throw DataError("non-finite feature value at row " + std::to_string(i) + ", column " + std::to_string(c));
      }
    });
    if (sparse_ && !sparse_rows_[i].well_formed()) throw DataError("malformed sparse row " + std::to_string(i));
  }
}

double FeatureMatrix::row_dot(std::size_t i, std::span<const double> w) const {
  if (sparse_) return sparse_rows_[i].dot(w);
  return simd::dot(dense_.row(i), w);
}

void FeatureMatrix::row_axpy(std::size_t i, double alpha, std::span<double> w) const {
  if (sparse_) {
    for (const auto& [c, v] : sparse_rows_[i].entries) w[c] += alpha * v;
  } else {
    simd::axpy(alpha, dense_.row(i), w);
  }
}

double FeatureMatrix::row_norm_sq(std::size_t i) const {
  if (sparse_) {
    const double n = sparse_rows_[i].norm2();
    return n * n;
  }
  return simd::dot(dense_.row(i), dense_.row(i));
}

Matrix FeatureMatrix::to_dense() const {
  if (!sparse_) return dense_;
  Matrix out(rows(), cols_);
  for (std::size_t i = 0; i < rows(); ++i) {
    for (const auto& [c, v] : sparse_rows_[i].entries) out(i, c) = v;
  }
  return out;
}

std::vector<double> anova_f_scores(const FeatureMatrix& x, std::span<const std::string> labels) {
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  if (labels.size() != n) throw DataError("label count does not match the feature matrix");

  std::map<std::string, std::size_t> class_of;
  for (const auto& l : labels) class_of.emplace(l, 0);
  if (class_of.size() < 2) throw DataError("ANOVA-F needs at least two classes");
  std::size_t k = 0;
  for (auto& [name, idx] : class_of) idx = k++;

  std::vector<std::size_t> group(n);
  std::vector<double> count(k, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    group[i] = class_of.at(labels[i]);
    count[group[i]] += 1.0;
  }
  for (const auto& [name, idx] : class_of) {
    if (count[idx] < 2.0) {
      throw DataError("class '" + name + "' has fewer than 2 samples; ANOVA-F within-group degrees of freedom are zero");
    }
  }

  // Pass 1: class sums. Pass 2: squared deviations from class means over the
  // stored non-zeros; implicit zeros contribute (n_c - nnz_c) * mean^2.
  std::vector<double> sums(k * d, 0.0);
  std::vector<double> nnz(k * d, 0.0);
  std::vector<double> sumsq(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double* s = &sums[group[i] * d];
    double* z = &nnz[group[i] * d];
    x.for_each_nonzero(i, [&](std::size_t c, double v) {
      s[c] += v;
      z[c] += 1.0;
      sumsq[c] += v * v;
    });
  }
  std::vector<double> means(k * d);
  for (std::size_t g = 0; g < k; ++g) {
    for (std::size_t j = 0; j < d; ++j) means[g * d + j] = sums[g * d + j] / count[g];
  }
  std::vector<double> ssw(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double* m = &means[group[i] * d];
    x.for_each_nonzero(i, [&](std::size_t c, double v) {
      const double dev = v - m[c];
      ssw[c] += dev * dev;
    });
  }
  for (std::size_t g = 0; g < k; ++g) {
    for (std::size_t j = 0; j < d; ++j) {
      const double m = means[g * d + j];
      ssw[j] += (count[g] - nnz[g * d + j]) * m * m;
    }
  }

  const double df_between = static_cast<double>(k - 1);
  const double df_within = static_cast<double>(n - k);
  std::vector<double> scores(d);
  for (std::size_t j = 0; j < d; ++j) {
    double grand = 0.0;
    for (std::size_t g = 0; g < k; ++g) grand += sums[g * d + j];
    grand /= static_cast<double>(n);
    double ssb = 0.0;
    for (std::size_t g = 0; g < k; ++g) {
      const double dev = means[g * d + j] - grand;
      ssb += count[g] * dev * dev;
    }
    // Cancellation noise in ssb/ssw is ~eps^2 * sum x^2; anything below this
    // floor is treated as exactly zero.
    const double floor = 1e-20 * sumsq[j];
    const bool no_between = ssb <= floor;
    const bool no_within = ssw[j] <= floor;
    if (no_between && no_within) {
      scores[j] = 0.0;
    } else if (no_within) {
      scores[j] = std::numeric_limits<double>::infinity();
    } else {
      scores[j] = (ssb / df_between) / (ssw[j] / df_within);
    }
  }
  return scores;
}

SelectionModel select_top_k(std::span<const double> scores, std::size_t k) {
  if (k < 1 || k > scores.size()) {
    throw RangeError("k = " + std::to_string(k) + " must be in [1, " + std::to_string(scores.size()) + "]");
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto key = [&](std::size_t i) {
    // NaN never outranks a real score.
    return std::isnan(scores[i]) ? -std::numeric_limits<double>::infinity() : scores[i];
  };
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return key(a) > key(b); });
  order.resize(k);
  SelectionModel m;
  m.kind = SelectionModel::Kind::kAnovaF;
  m.input_dim = scores.size();
  m.keep = std::move(order);
  return m;
}

SelectionModel pca_fit(const FeatureMatrix& x, std::size_t n) {
  const std::size_t rows = x.rows();
  const std::size_t d = x.cols();
  if (n < 1 || n > std::min(rows, d)) {
    throw RangeError("PCA with n = " + std::to_string(n) + " needs n <= min(N, D) = " +
                     std::to_string(std::min(rows, d)));
  }
  Eigen::MatrixXd a(rows, d);
  a.setZero();
  for (std::size_t i = 0; i < rows; ++i) {
    x.for_each_nonzero(i, [&](std::size_t c, double v) { a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = v; });
  }
  const Eigen::RowVectorXd mean = a.colwise().mean();
  a.rowwise() -= mean;

  Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  const Eigen::MatrixXd& v = svd.matrixV();
  const double total = s.squaredNorm();

  SelectionModel m;
  m.kind = SelectionModel::Kind::kPca;
  m.input_dim = d;
  m.means.assign(mean.data(), mean.data() + d);
  m.projection = Matrix(d, n);
  for (std::size_t c = 0; c < n; ++c) {
    const auto col = v.col(static_cast<Eigen::Index>(c));
    // Sign convention: the largest-magnitude entry is positive.
    Eigen::Index arg = 0;
    col.cwiseAbs().maxCoeff(&arg);
    const double sign = col(arg) < 0.0 ? -1.0 : 1.0;
    for (std::size_t r = 0; r < d; ++r) m.projection(r, c) = sign * col(static_cast<Eigen::Index>(r));
    const double sc = s(static_cast<Eigen::Index>(c));
    m.explained_variance_ratio.push_back(total > 0.0 ? sc * sc / total : 0.0);
  }
  return m;
}

FeatureMatrix apply(const SelectionModel& model, const FeatureMatrix& x) {
  if (x.cols() != model.input_dim) {
    throw LayoutError("feature width " + std::to_string(x.cols()) + " does not match the fitted width " +
                      std::to_string(model.input_dim));
  }
  const std::size_t rows = x.rows();
  auto labels = x.labels();
  if (model.kind == SelectionModel::Kind::kAnovaF) {
    const std::size_t k = model.keep.size();
    if (x.is_sparse()) {
      std::vector<std::int64_t> pos(model.input_dim, -1);
      for (std::size_t j = 0; j < k; ++j) pos[model.keep[j]] = static_cast<std::int64_t>(j);
      std::vector<SparseVector> out(rows);
      for (std::size_t i = 0; i < rows; ++i) {
        auto& r = out[i];
        r.dim = k;
        for (const auto& [c, v] : x.sparse_rows()[i].entries) {
          if (pos[c] >= 0) r.entries.emplace_back(static_cast<std::uint32_t>(pos[c]), v);
        }
        std::sort(r.entries.begin(), r.entries.end());
      }
      return FeatureMatrix::sparse(std::move(out), k, std::move(labels));
    }
    Matrix out(rows, k);
    for (std::size_t i = 0; i < rows; ++i) {
      const auto src = x.dense_rows().row(i);
      auto dst = out.row(i);
      for (std::size_t j = 0; j < k; ++j) dst[j] = src[model.keep[j]];
    }
    return FeatureMatrix::dense(std::move(out), std::move(labels));
  }

  const std::size_t n = model.projection.cols();
  std::vector<double> mean_proj(n, 0.0);
  for (std::size_t r = 0; r < model.input_dim; ++r) {
    simd::axpy(model.means[r], model.projection.row(r), mean_proj);
  }
  Matrix out(rows, n);
  for (std::size_t i = 0; i < rows; ++i) {
    auto dst = out.row(i);
    x.for_each_nonzero(i, [&](std::size_t c, double v) { simd::axpy(v, model.projection.row(c), dst); });
    simd::axpy(-1.0, mean_proj, dst);
  }
  return FeatureMatrix::dense(std::move(out), std::move(labels));
}

void SelectionModel::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  char buf[64];
  const auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  if (kind == Kind::kAnovaF) {
    out << "anova-f " << input_dim << ' ' << keep.size() << '\n';
    for (const auto i : keep) out << i << '\n';
  } else {
    out << "pca " << input_dim << ' ' << projection.cols() << '\n';
    for (std::size_t j = 0; j < explained_variance_ratio.size(); ++j) {
      out << (j ? " " : "") << num(explained_variance_ratio[j]);
    }
    out << '\n';
    for (std::size_t r = 0; r < input_dim; ++r) {
      out << num(means[r]);
      for (const double v : projection.row(r)) out << ' ' << num(v);
      out << '\n';
    }
  }
  if (!out) throw DataError("failed writing " + path.string());
}

SelectionModel SelectionModel::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::string kind;
  SelectionModel m;
  std::size_t width = 0;
  if (!(in >> kind >> m.input_dim >> width)) throw FormatError(path.string() + ": bad selection model header");
  if (kind == "anova-f") {
    m.kind = Kind::kAnovaF;
    m.keep.resize(width);
    for (auto& i : m.keep) {
      if (!(in >> i) || i >= m.input_dim) throw FormatError(path.string() + ": bad feature index");
    }
  } else if (kind == "pca") {
    m.kind = Kind::kPca;
    m.explained_variance_ratio.resize(width);
    for (auto& v : m.explained_variance_ratio) {
      if (!(in >> v)) throw FormatError(path.string() + ": truncated variance ratios");
    }
    m.means.resize(m.input_dim);
    m.projection = Matrix(m.input_dim, width);
    for (std::size_t r = 0; r < m.input_dim; ++r) {
      if (!(in >> m.means[r])) throw FormatError(path.string() + ": truncated projection");
      for (auto& v : m.projection.row(r)) {
        if (!(in >> v)) throw FormatError(path.string() + ": truncated projection");
      }
    }
  } else {
    throw FormatError(path.string() + ": unknown selection kind '" + kind + "'");
  }
  return m;
}

ColumnScaler ColumnScaler::fit(std::span<const SparseVector> rows, std::size_t width) {
  if (rows.empty()) throw DataError("cannot fit a scaler on zero rows");
  ColumnScaler sc;
  sc.mean.assign(width, 0.0);
  std::vector<double> sq(width, 0.0);
  std::vector<std::size_t> nonzero(width, 0);
  const auto n = static_cast<double>(rows.size());
  for (const auto& r : rows) {
    if (r.dim < width) throw LayoutError("row width " + std::to_string(r.dim) + " below scaler width");
    for (const auto& [j, v] : r.entries) {
      if (j >= width) break;
      sc.mean[j] += v;
    }
  }
  for (auto& m : sc.mean) m /= n;
  for (const auto& r : rows) {
    for (const auto& [j, v] : r.entries) {
      if (j >= width) break;
      sq[j] += (v - sc.mean[j]) * (v - sc.mean[j]);
      ++nonzero[j];
    }
  }
  sc.inv_sd.resize(width);
  for (std::size_t j = 0; j < width; ++j) {
    // implicit zeros
    sq[j] += static_cast<double>(rows.size() - nonzero[j]) * sc.mean[j] * sc.mean[j];
    const double sd = std::sqrt(sq[j] / n);
    sc.inv_sd[j] = sd > 0.0 ? 1.0 / sd : 1.0;
  }
  return sc;
}

SparseVector ColumnScaler::transform(const SparseVector& row) const {
  const std::size_t w = width();
  if (row.dim < w) throw LayoutError("row width " + std::to_string(row.dim) + " below scaler width");
  std::vector<double> dense(w, 0.0);
  std::size_t k = 0;
  for (; k < row.entries.size() && row.entries[k].first < w; ++k) dense[row.entries[k].first] = row.entries[k].second;
  SparseVector out;
  out.dim = row.dim;
  out.entries.reserve(w + row.entries.size() - k);
  for (std::size_t j = 0; j < w; ++j) {
    const double z = (dense[j] - mean[j]) * inv_sd[j];
    if (z != 0.0) out.entries.emplace_back(static_cast<std::uint32_t>(j), z);
  }
  out.entries.insert(out.entries.end(), row.entries.begin() + static_cast<std::ptrdiff_t>(k), row.entries.end());
  return out;
}

}  // namespace compvec
