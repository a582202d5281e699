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

// Binary linear SVM trained by Pegasos-style SGD on
//
//   lambda/2 * (|w|^2 + b^2) + (1/N) * sum_i max(0, 1 - y_i (w . x_i + b))
//
// with step 1/(lambda (t + t0)), t0 = 1/(lambda eta0). The bias is trained as the weight of a constant
// unit feature, so it shares the shrinkage and projection. The returned model
// is the average of all iterates.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "compvec/features.hpp"
#include "compvec/stats.hpp"

namespace compvec {

struct SvmParams {
  double lambda = 1e-4;
  std::size_t epochs = 10;
  std::uint64_t seed = 1;
  /// Project onto the ball of radius 1/sqrt(lambda) after each step.
  bool project = true;
  /// Return the average of all iterates instead of the last one.
  bool average = true;
  /// Initial step; 0 calibrates it with svm_calibrate_eta0.
  double eta0 = 0.0;
};

struct LinearModel {
  std::vector<double> weights;
  double bias = 0.0;
  double lambda = 1e-4;
  /// p(positive) = sigma(cal_a * margin + cal_b)
  double cal_a = 1.0;
  double cal_b = 0.0;

  std::size_t dim() const noexcept { return weights.size(); }

  /// Header `D lambda a b bias`, then one weight per line (%.9g).
  void save(const std::filesystem::path& path) const;
  static LinearModel load(const std::filesystem::path& path);
};

struct SvmReport {
  std::vector<double> epoch_objective;  // full-data objective after each epoch
};

/// Maps string labels onto +1 (== positive) / -1 (anything else). Throws
/// DataError unless exactly two distinct labels occur and one is `positive`.
std::vector<int> binary_targets(std::span<const std::string> labels, const std::string& positive);

/// Throws DataError for fewer than 2 rows, a single class, or y outside {-1, +1}.
LinearModel svm_train(const FeatureMatrix& x, std::span<const int> y, const SvmParams& params,
                      SvmReport* report = nullptr);

inline constexpr std::size_t kEtaSampleRows = 1000;

/// Tries eta0 = c / mean(|x|^2 + 1) for c = 0.1 * 3^k up to 1000, one epoch
/// each on at most kEtaSampleRows rows, and returns a tenth of the candidate
/// with the lowest objective on those rows.
double svm_calibrate_eta0(const FeatureMatrix& x, std::span<const int> y, const SvmParams& params);

/// Rewrites a model trained on `scaler`-transformed rows so that it gives the
/// same margins on the raw rows.
void unscale_model(LinearModel& m, const ColumnScaler& scaler);

/// The training objective above at (w, b).
double svm_objective(const FeatureMatrix& x, std::span<const int> y, std::span<const double> w, double b,
                     double lambda);

/// Fits (a, b) of sigma(a m + b) to targets by regularized maximum likelihood
/// (Platt's smoothed targets, Newton with backtracking).
void platt_calibrate(std::span<const double> margins, std::span<const int> y, double& a, double& b);

double svm_margin(const LinearModel& m, std::span<const double> x);
double svm_margin(const LinearModel& m, const SparseVector& x);
/// +1 when margin >= 0, else -1.
int svm_predict(const LinearModel& m, std::span<const double> x);
int svm_predict(const LinearModel& m, const SparseVector& x);
/// Strictly inside (0, 1).
double svm_proba(const LinearModel& m, double margin);

/// Margins for every row of `x`; throws LayoutError on width mismatch.
std::vector<double> svm_margins(const LinearModel& m, const FeatureMatrix& x);

double sigmoid(double z);

}  // namespace compvec
