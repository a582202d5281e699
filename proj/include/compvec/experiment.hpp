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

// End-to-end pipeline: load -> vocab -> embeddings (+ paragraph vectors) ->
// compose -> (select) -> SVM -> predict -> (RNNLM + ensemble) -> report.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "compvec/classify.hpp"
#include "compvec/compose.hpp"
#include "compvec/corpus.hpp"
#include "compvec/embeddings.hpp"
#include "compvec/ensemble.hpp"
#include "compvec/rnnlm.hpp"
#include "compvec/stats.hpp"
#include "compvec/synth.hpp"

namespace compvec {

enum class DataFormat { kTsv, kDirPerClass, kSynthetic };
enum class SelectionMethod { kNone, kAnovaF, kPca };

struct ExperimentConfig {
  struct Data {
    DataFormat format = DataFormat::kSynthetic;
    std::string train;      // corpus path (tsv file or class directory root)
    std::string test;       // optional; otherwise a stratified split of `train`
    std::string unlabeled;  // optional extra unlabeled corpus
    double test_fraction = 0.2;
    std::string positive_label = "pos";
    SentimentSynthConfig synthetic;
  } data;
  TokenizerConfig tokenizer;
  std::uint64_t min_count = 1;
  TrainConfig embeddings = TrainConfig::defaults_for(EmbeddingModel::kSkipGram);
  TrainConfig paragraph = TrainConfig::defaults_for(EmbeddingModel::kPvDbow);
  std::size_t inference_epochs = 20;
  struct Composition {
    CompositionVariant variant = CompositionVariant::kGradedIdf;
    double delta = 0.0;
    bool average = true;
    StopwordMode stopword_mode = StopwordMode::kDfRatio;
    double stopword_df_ratio = 0.5;
    std::string stopword_list;  // file, one term per line (explicit-list mode)
  } composition;
  struct Parts {
    bool wavg = true;
    bool pv = true;
    bool tfidf = true;
    bool tfidf_l2 = false;
    bool l2_normalize_dense = true;
    /// Center and scale each dense column with training-set statistics.
    bool standardize_dense = true;
  } parts;
  struct Selection {
    SelectionMethod method = SelectionMethod::kNone;
    std::size_t k = 4000;
    std::size_t n = 50;
  } selection;
  SvmParams svm;
  struct Rnn {
    bool enabled = false;
    RnnLmConfig config;
  } rnnlm;
  EnsembleConfig ensemble;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  std::string out;

  /// Strict: unknown keys and wrong types throw ConfigError.
  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig load(const std::filesystem::path& path);
  nlohmann::json to_json() const;
  /// Ranges, consistency and referenced paths.
  void validate() const;
  /// Reads the stopword list file when one is configured.
  CompositionScheme make_scheme() const;
};

/// Flattens nested objects into dotted keys ("svm.lambda").
std::map<std::string, nlohmann::json> flatten_config(const nlohmann::json& j);
/// Sets a dotted key, parsing `value` as JSON when it is valid JSON and as a
/// string otherwise. Unknown keys throw ConfigError.
void override_config(nlohmann::json& j, const std::string& dotted_key, const std::string& value);

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  std::size_t support = 0;
};

struct MetricsReport {
  double accuracy = 0.0;
  std::vector<std::string> classes;                         // [negative, positive]
  std::vector<std::vector<std::size_t>> confusion;          // [true][predicted]
  std::map<std::string, ClassMetrics> per_class;
  std::size_t test_size = 0;
  std::size_t zero_vector_docs = 0;
  double svm_accuracy = 0.0;
  std::optional<double> rnnlm_accuracy;
  std::optional<double> ensemble_accuracy;
  std::size_t feature_dim = 0;
  nlohmann::json config;
  std::vector<std::pair<std::string, double>> timings;  // seconds per stage

  /// Everything except timings; byte-identical across reruns of one config.
  nlohmann::json to_json(bool include_timings = true) const;
};

/// Confusion matrix and derived metrics from +1/-1 truth and predictions.
MetricsReport score_predictions(std::span<const int> truth, std::span<const int> predicted,
                                const std::string& negative_label, const std::string& positive_label);

/// Loaded data and trained representations shared by pipeline variants.
struct PreparedData {
  Corpus train;      // labeled training documents
  Corpus test;       // labeled test documents
  Corpus unlabeled;  // extra text for unsupervised training
  Vocabulary vocab;
  std::optional<EmbeddingMatrix> embeddings;
  std::optional<ParagraphVectors> paragraph;
  std::vector<std::vector<double>> train_pv;
  std::vector<std::vector<double>> test_pv;
  std::string negative_label;
  std::vector<std::pair<std::string, double>> timings;
};

PreparedData prepare_data(const ExperimentConfig& cfg);

struct ExperimentOutputs {
  MetricsReport report;
  std::vector<int> truth;
  std::vector<double> svm_probs;
  std::vector<int> svm_predictions;
  std::vector<double> rnn_probs;  // empty unless the RNNLM is enabled
};

/// Runs the stages after prepare_data. When `out_dir` is non-empty the
/// artifacts and report.json are written there.
ExperimentOutputs evaluate_pipeline(const ExperimentConfig& cfg, const PreparedData& data,
                                    const std::filesystem::path& out_dir = {});

MetricsReport run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out_dir = {});

enum class CompareAxis { kSkipgramVsCbow, kSchemeSweep, kDeltaSweep, kAlphaSweep };
CompareAxis parse_compare_axis(std::string_view s);

struct CompareRow {
  std::string setting;
  double accuracy = 0.0;
};

/// Runs the pipeline varying one axis. `values` overrides the default grid
/// (schemes by name, deltas/alphas as numbers, models by name).
std::vector<CompareRow> compare_models(const ExperimentConfig& cfg, CompareAxis axis,
                                       const std::vector<std::string>& values = {});
std::string compare_table_tsv(CompareAxis axis, const std::vector<CompareRow>& rows);

}  // namespace compvec
