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

// Word embeddings (skip-gram, CBOW) and paragraph vectors (PV-DBOW, PV-DM),
// all trained with negative sampling:
//
//   L = -log sigma(v_c . h) - sum_{i=1..k} log sigma(-v_{n_i} . h)
//
// where h is the center word's input vector (skip-gram), the mean of the
// context input vectors (CBOW), the document vector (PV-DBOW) or the mean of
// the document vector and the window's word vectors (PV-DM).

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "compvec/corpus.hpp"
#include "compvec/matrix.hpp"
#include "compvec/rng.hpp"
#include "compvec/stats.hpp"

namespace compvec {

enum class EmbeddingModel { kSkipGram, kCbow, kPvDbow, kPvDm };

EmbeddingModel parse_embedding_model(std::string_view name);
std::string_view to_string(EmbeddingModel m);

struct TrainConfig {
  EmbeddingModel model = EmbeddingModel::kSkipGram;
  std::size_t dim = 100;
  std::size_t window = 5;
  std::size_t negatives = 5;
  std::size_t epochs = 5;
  double lr0 = 0.025;
  double min_lr = 0.0001;
  double subsample_t = 1e-4;
  std::uint64_t seed = 1;
  std::size_t workers = 1;

  /// Reference defaults; paragraph-vector models use window 10, 20 epochs.
  static TrainConfig defaults_for(EmbeddingModel model);
  /// Throws ConfigError on out-of-range fields.
  void validate() const;
};

/// Input (v_w) and context (v_c) vectors, one row per term.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;
  EmbeddingMatrix(std::vector<std::string> terms, std::size_t dim);

  std::size_t size() const noexcept { return terms_.size(); }
  std::size_t dim() const noexcept { return input.cols(); }
  const std::vector<std::string>& terms() const noexcept { return terms_; }
  std::optional<TermId> find(std::string_view term) const;
  TermId id(std::string_view term) const;

  Matrix input;
  Matrix context;

 private:
  std::vector<std::string> terms_;
  std::unordered_map<std::string, TermId> index_;
};

struct ParagraphVectors {
  TrainConfig config;
  Matrix docs;                         // one row per training document id
  EmbeddingMatrix words;               // shared word/context weights
  std::vector<std::uint64_t> counts;   // unigram counts behind the noise distribution
};

struct TrainReport {
  std::vector<double> epoch_loss;  // mean loss per (hidden, target) example
  std::uint64_t examples = 0;
};

/// Noise distribution P(w) proportional to count(w)^power.
///
/// Two draw modes. `draw(Rng&)` is the usual i.i.d. inverse-CDF draw.
/// `next()` walks a randomly-offset golden-ratio (Weyl) sequence through the
/// inverse CDF: a low-discrepancy stream whose empirical frequencies converge
/// at O(log N / N) rather than O(1/sqrt N). Training uses `next()`.
class NegativeSampler {
 public:
  NegativeSampler(std::span<const std::uint64_t> counts, double power = 0.75);

  std::size_t size() const noexcept { return cdf_.size(); }
  double probability(TermId id) const;

  TermId draw(Rng& rng) const { return lookup(rng.uniform()); }

  /// Starts the low-discrepancy stream at a seeded offset.
  void reseed(Rng& rng) { phase_ = rng.uniform(); }
  TermId next() {
    phase_ += 0.6180339887498949;
    if (phase_ >= 1.0) phase_ -= 1.0;
    return lookup(phase_);
  }

 private:
  TermId lookup(double u) const;

  std::vector<double> cdf_;
  double phase_ = 0.0;
};

/// Per-term corpus counts (tokens not in `vocab` are ignored).
std::vector<std::uint64_t> count_terms(const Corpus& corpus, const Vocabulary& vocab);

EmbeddingMatrix train_embeddings(const Corpus& corpus, const Vocabulary& vocab, const TrainConfig& cfg,
                                 TrainReport* report = nullptr);

ParagraphVectors train_paragraph_vectors(const Corpus& corpus, const Vocabulary& vocab,
                                         const TrainConfig& cfg, TrainReport* report = nullptr);

/// Fits a fresh document vector against frozen word/context weights.
/// Deterministic for a given seed; 0 epochs returns the seeded initialization.
/// Throws DataError when the document has no in-vocabulary token.
std::vector<double> infer_paragraph_vector(const ParagraphVectors& model, const Document& doc,
                                           std::size_t inference_epochs, std::uint64_t seed);

/// Top-k terms by cosine similarity of input vectors, excluding the query.
/// Descending; ties by ascending id.
std::vector<std::pair<std::string, double>> nearest_neighbors(const EmbeddingMatrix& emb,
                                                              std::string_view term, std::size_t k);

double cosine(std::span<const double> a, std::span<const double> b);

/// word2vec text format: `<V> <d>` then `<term> <v1> ... <vd>`; `%.6f` values
/// unless `precision` asks for more (paragraph-vector side files use 17 for
/// exact round-trips).
void save_embeddings(const EmbeddingMatrix& emb, const std::filesystem::path& path, int precision = 6);
/// Context vectors are not part of the format and come back zero.
EmbeddingMatrix load_embeddings(const std::filesystem::path& path);

/// Directory with docs.w2v, words.w2v, context.w2v, counts.tsv, config.tsv.
void save_paragraph_vectors(const ParagraphVectors& pv, const std::filesystem::path& dir);
ParagraphVectors load_paragraph_vectors(const std::filesystem::path& dir);

// Single negative-sampling SGD steps. Each computes the loss and gradient at
// the current parameters, applies `params -= lr * grad`, and returns the
// pre-step loss. `negatives` are used as given (the trainers drop draws that
// equal the target). With lr = 0 they only evaluate the loss.
struct StepScratch {
  std::vector<double> hidden;
  std::vector<double> grad_hidden;
  std::vector<double> coef;
};

double skipgram_step(Matrix& input, Matrix& context, TermId center, TermId target,
                     std::span<const TermId> negatives, double lr, StepScratch& s);

double cbow_step(Matrix& input, Matrix& context, std::span<const TermId> context_words, TermId target,
                 std::span<const TermId> negatives, double lr, StepScratch& s);

double pv_dbow_step(Matrix& docs, DocId doc, Matrix& context, TermId target,
                    std::span<const TermId> negatives, double lr, StepScratch& s);

double pv_dm_step(Matrix& docs, DocId doc, Matrix& input, Matrix& context,
                  std::span<const TermId> context_words, TermId target, std::span<const TermId> negatives,
                  double lr, StepScratch& s);

// Inference variants: only the document vector moves.
double pv_dbow_infer_step(std::span<double> doc_vec, const Matrix& context, TermId target,
                          std::span<const TermId> negatives, double lr, StepScratch& s);

double pv_dm_infer_step(std::span<double> doc_vec, const Matrix& input, const Matrix& context,
                        std::span<const TermId> context_words, TermId target,
                        std::span<const TermId> negatives, double lr, StepScratch& s);

}  // namespace compvec
