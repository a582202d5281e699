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

#include "compvec/classify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>

#include "compvec/errors.hpp"
#include "compvec/rng.hpp"
#include "compvec/simd.hpp"

namespace compvec {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

namespace {

// log(1 + e^z)
double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

void check_targets(std::size_t rows, std::span<const int> y) {
  if (y.size() != rows) throw DataError("target count does not match the feature matrix");
  if (rows < 2) throw DataError("SVM training needs at least 2 rows");
  bool pos = false;
  bool neg = false;
  for (const int v : y) {
    if (v == 1) {
      pos = true;
    } else if (v == -1) {
      neg = true;
    } else {
      throw DataError("SVM targets must be +1 or -1");
    }
  }
  if (!pos || !neg) throw DataError("SVM training needs both classes; got a single class");
}

}  // namespace

std::vector<int> binary_targets(std::span<const std::string> labels, const std::string& positive) {
  std::set<std::string> distinct(labels.begin(), labels.end());
  if (distinct.size() != 2) {
    throw DataError("binary classification needs exactly 2 labels, found " + std::to_string(distinct.size()));
  }
  if (!distinct.contains(positive)) throw DataError("positive label '" + positive + "' does not occur");
  std::vector<int> y;
  y.reserve(labels.size());
  for (const auto& l : labels) y.push_back(l == positive ? 1 : -1);
  return y;
}

double svm_objective(const FeatureMatrix& x, std::span<const int> y, std::span<const double> w, double b,
                     double lambda) {
  double hinge = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    hinge += std::max(0.0, 1.0 - y[i] * (x.row_dot(i, w) + b));
  }
  return 0.5 * lambda * (simd::dot(w, w) + b * b) + hinge / static_cast<double>(x.rows());
}

namespace {

struct SgdResult {
  std::vector<double> w;
  double b = 0.0;
};

double subset_objective(const FeatureMatrix& x, std::span<const int> y, std::span<const std::size_t> rows,
                        const SgdResult& r, double lambda) {
  double hinge = 0.0;
  for (const auto i : rows) hinge += std::max(0.0, 1.0 - y[i] * (x.row_dot(i, r.w) + r.b));
  return 0.5 * lambda * (simd::dot(r.w, r.w) + r.b * r.b) + hinge / static_cast<double>(rows.size());
}

// Averaged Pegasos SGD over the rows listed in `rows`. The report holds the
// objective over those rows.
SgdResult run_sgd(const FeatureMatrix& x, std::span<const int> y, std::span<const std::size_t> rows,
                  std::span<const double> row_sq, const SvmParams& params, double eta0, std::size_t epochs,
                  std::uint64_t seed, SvmReport* report) {
  const double lambda = params.lambda;
  const double radius = 1.0 / std::sqrt(lambda);
  const double t0 = 1.0 / (lambda * eta0);

  // w = scale * v, b = scale * vb; nsq tracks |v|^2 + vb^2. The running sum
  // of iterates is kept as sum_p + sigma * v so that sparse steps stay sparse.
  std::vector<double> v(x.cols(), 0.0);
  double vb = 0.0;
  double scale = 1.0;
  double nsq = 0.0;
  std::vector<double> sum_p(params.average ? x.cols() : 0, 0.0);
  double sum_pb = 0.0;
  double sigma = 0.0;
  const auto fold = [&] {
    if (params.average) {
      simd::axpy(sigma, v, sum_p);
      sum_pb += sigma * vb;
      sigma = 0.0;
    }
    simd::scale(scale, v);
    vb *= scale;
    scale = 1.0;
    nsq = simd::dot(v, v) + vb * vb;
  };

  SgdResult out;
  out.w.resize(x.cols());
  const auto current = [&](std::uint64_t steps) {
    if (params.average) {
      const double inv = 1.0 / static_cast<double>(steps);
      for (std::size_t j = 0; j < out.w.size(); ++j) out.w[j] = (sum_p[j] + sigma * v[j]) * inv;
      out.b = (sum_pb + sigma * vb) * inv;
    } else {
      out.w = v;
      out.b = vb;
    }
  };

  Rng rng(seed);
  std::vector<std::size_t> order(rows.begin(), rows.end());
  std::uint64_t t = 0;
  for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
    rng.shuffle(order.begin(), order.end());
    for (const auto i : order) {
      ++t;
      const double tt = static_cast<double>(t) + t0;
      const double eta = 1.0 / (lambda * tt);
      const double raw = x.row_dot(i, v) + vb;
      const double margin = scale * raw;
      if (tt > 1.0) scale *= 1.0 - 1.0 / tt;
      if (y[i] * margin < 1.0) {
        const double c = eta * y[i] / scale;
        x.row_axpy(i, c, v);
        vb += c;
        nsq += 2.0 * c * raw + c * c * row_sq[i];
        if (params.average) {
          x.row_axpy(i, -sigma * c, sum_p);
          sum_pb -= sigma * c;
        }
      }
      if (params.project) {
        const double norm = scale * std::sqrt(std::max(nsq, 0.0));
        if (norm > radius) scale *= radius / norm;
      }
      sigma += scale;
      if (scale < 1e-9) fold();
    }
    fold();
    if (!std::isfinite(nsq) || !std::isfinite(sigma)) {
      throw DivergenceError("SVM weights became non-finite in epoch " + std::to_string(epoch + 1));
    }
    if (report) {
      current(t);
      report->epoch_objective.push_back(subset_objective(x, y, rows, out, lambda));
    }
  }
  current(t);
  return out;
}

}  // namespace

double svm_calibrate_eta0(const FeatureMatrix& x, std::span<const int> y, const SvmParams& params) {
  const std::size_t n = x.rows();
  std::vector<double> row_sq(n);
  for (std::size_t i = 0; i < n; ++i) row_sq[i] = x.row_norm_sq(i) + 1.0;
  const double mean_sq = std::accumulate(row_sq.begin(), row_sq.end(), 0.0) / static_cast<double>(n);

  std::vector<std::size_t> sample(n);
  std::iota(sample.begin(), sample.end(), std::size_t{0});
  Rng rng(Rng::derive(params.seed, 0xe7a));
  if (n > kEtaSampleRows) {
    rng.shuffle(sample.begin(), sample.end());
    sample.resize(kEtaSampleRows);
  }
  double best_eta = 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (double f = 0.1; f <= 1000.0; f *= 3.0) {
    const double eta0 = f / mean_sq;
    SvmReport rep;
    run_sgd(x, y, sample, row_sq, params, eta0, 1, Rng::derive(params.seed, 0xe7b), &rep);
    const auto& o = rep.epoch_objective;
    if (o.back() < best) {
      best = o.back();
      best_eta = eta0;
    }
  }
  return best_eta / 10.0;
}

LinearModel svm_train(const FeatureMatrix& x, std::span<const int> y, const SvmParams& params, SvmReport* report) {
  if (!(params.lambda > 0.0) || !std::isfinite(params.lambda)) throw ConfigError("lambda must be positive");
  if (params.epochs < 1) throw ConfigError("epochs must be >= 1");
  if (!(params.eta0 >= 0.0) || !std::isfinite(params.eta0)) throw ConfigError("eta0 must be >= 0");
  x.validate();
  check_targets(x.rows(), y);

  const std::size_t n = x.rows();
  std::vector<double> row_sq(n);
  for (std::size_t i = 0; i < n; ++i) row_sq[i] = x.row_norm_sq(i) + 1.0;
  const double eta0 = params.eta0 > 0.0 ? params.eta0 : svm_calibrate_eta0(x, y, params);

  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  auto r = run_sgd(x, y, rows, row_sq, params, eta0, params.epochs, Rng::derive(params.seed, 0x5f3), report);

  LinearModel m;
  m.weights = std::move(r.w);
  m.bias = r.b;
  m.lambda = params.lambda;
  const auto margins = svm_margins(m, x);
  platt_calibrate(margins, y, m.cal_a, m.cal_b);
  return m;
}

void platt_calibrate(std::span<const double> margins, std::span<const int> y, double& a, double& b) {
  if (margins.size() != y.size()) throw DataError("margin and target counts differ");
  double n_pos = 0.0;
  double n_neg = 0.0;
  for (const int v : y) (v > 0 ? n_pos : n_neg) += 1.0;
  const double hi = (n_pos + 1.0) / (n_pos + 2.0);
  const double lo = 1.0 / (n_neg + 2.0);
  const std::size_t n = margins.size();
  std::vector<double> target(n);
  for (std::size_t i = 0; i < n; ++i) target[i] = y[i] > 0 ? hi : lo;

  const auto objective = [&](double aa, double bb) {
    double f = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double z = aa * margins[i] + bb;
      f += softplus(z) - target[i] * z;
    }
    return f;
  };

  a = 0.0;
  b = std::log((n_pos + 1.0) / (n_neg + 1.0));
  double f = objective(a, b);
  for (int it = 0; it < 100; ++it) {
    double h11 = 1e-12, h22 = 1e-12, h21 = 0.0, g1 = 0.0, g2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double p = sigmoid(a * margins[i] + b);
      const double d2 = p * (1.0 - p);
      const double d1 = p - target[i];
      h11 += margins[i] * margins[i] * d2;
      h22 += d2;
      h21 += margins[i] * d2;
      g1 += margins[i] * d1;
      g2 += d1;
    }
    if (std::abs(g1) < 1e-5 && std::abs(g2) < 1e-5) break;
    const double det = h11 * h22 - h21 * h21;
    const double da = -(h22 * g1 - h21 * g2) / det;
    const double db = -(-h21 * g1 + h11 * g2) / det;
    const double slope = g1 * da + g2 * db;
    double step = 1.0;
    bool moved = false;
    while (step >= 1e-10) {
      const double na = a + step * da;
      const double nb = b + step * db;
      const double nf = objective(na, nb);
      if (nf < f + 1e-4 * step * slope) {
        a = na;
        b = nb;
        f = nf;
        moved = true;
        break;
      }
      step /= 2.0;
    }
    if (!moved) break;
  }
}

void unscale_model(LinearModel& m, const ColumnScaler& scaler) {
  if (scaler.width() > m.dim()) throw LayoutError("scaler is wider than the model");
  for (std::size_t j = 0; j < scaler.width(); ++j) {
    m.weights[j] *= scaler.inv_sd[j];
    m.bias -= m.weights[j] * scaler.mean[j];
  }
}

double svm_margin(const LinearModel& m, std::span<const double> x) {
  if (x.size() != m.dim()) {
    throw LayoutError("input width " + std::to_string(x.size()) + " does not match model width " +
                      std::to_string(m.dim()));
  }
  return simd::dot(m.weights, x) + m.bias;
}

double svm_margin(const LinearModel& m, const SparseVector& x) {
  if (x.dim != m.dim()) {
    throw LayoutError("input width " + std::to_string(x.dim) + " does not match model width " +
                      std::to_string(m.dim()));
  }
  return x.dot(m.weights) + m.bias;
}

int svm_predict(const LinearModel& m, std::span<const double> x) { return svm_margin(m, x) >= 0.0 ? 1 : -1; }
int svm_predict(const LinearModel& m, const SparseVector& x) { return svm_margin(m, x) >= 0.0 ? 1 : -1; }

double svm_proba(const LinearModel& m, double margin) {
  return std::clamp(sigmoid(m.cal_a * margin + m.cal_b), 1e-15, 1.0 - 1e-15);
}

std::vector<double> svm_margins(const LinearModel& m, const FeatureMatrix& x) {
  if (x.cols() != m.dim()) {
    throw LayoutError("feature width " + std::to_string(x.cols()) + " does not match model width " +
                      std::to_string(m.dim()));
  }
  std::vector<double> out(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) out[i] = x.row_dot(i, m.weights) + m.bias;
  return out;
}

void LinearModel::save(const std::filesystem::path& path) const {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw DataError("cannot write " + path.string());
  std::fprintf(f, "%zu %.17g %.17g %.17g %.17g\n", weights.size(), lambda, cal_a, cal_b, bias);
  for (const double w : weights) std::fprintf(f, "%.9g\n", w);
  const bool ok = std::ferror(f) == 0;
  std::fclose(f);
  if (!ok) throw DataError("failed writing " + path.string());
}

LinearModel LinearModel::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  LinearModel m;
  std::size_t d = 0;
  if (!(in >> d >> m.lambda >> m.cal_a >> m.cal_b >> m.bias)) {
    throw FormatError(path.string() + ": bad model header");
  }
  m.weights.resize(d);
  for (auto& w : m.weights) {
    if (!(in >> w)) throw FormatError(path.string() + ": expected " + std::to_string(d) + " weights");
    if (!std::isfinite(w)) throw FormatError(path.string() + ": non-finite weight");
  }
  return m;
}

}  // namespace compvec
