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

// Class-conditional Elman language models:
//
//   s_t = sigma(U x_t + W s_{t-1}),   y_t = softmax(O s_t)
//
// x_t is one-hot, so U x_t is a row lookup. Every document starts from the
// boundary token with s_{-1} = 0.1 and predicts each of its tokens in turn.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "compvec/corpus.hpp"
#include "compvec/matrix.hpp"
#include "compvec/rng.hpp"
#include "compvec/stats.hpp"

namespace compvec {

/// LM vocabulary: id 0 is the boundary token `</s>`, id 1 is `<unk>`, then
/// the most frequent terms.
class LmVocab {
 public:
  static constexpr TermId kBoundary = 0;
  static constexpr TermId kUnknown = 1;

  LmVocab() : LmVocab(std::vector<std::string>{}) {}
  /// `terms` must not contain the two reserved tokens.
  explicit LmVocab(std::vector<std::string> terms);
  /// Top `max_terms` of a Vocabulary (its ids are frequency ordered).
  static LmVocab from(const Vocabulary& vocab, std::size_t max_terms);

  std::size_t size() const noexcept { return terms_.size(); }
  const std::vector<std::string>& terms() const noexcept { return terms_; }
  TermId map(std::string_view term) const;
  /// Token ids of a document; out-of-vocabulary tokens become <unk>.
  std::vector<TermId> encode(const Document& doc) const;

 private:
  std::vector<std::string> terms_;
  std::unordered_map<std::string, TermId> index_;
};

struct RnnGrads {
  Matrix u, w, o;
};

class ElmanNetwork {
 public:
  static constexpr double kInitialState = 0.1;

  ElmanNetwork() = default;
  /// Weights uniform in [-init_range, init_range].
  ElmanNetwork(std::size_t vocab, std::size_t hidden, Rng& rng, double init_range = 0.1);

  std::size_t vocab_size() const noexcept { return u.rows(); }
  std::size_t hidden() const noexcept { return u.cols(); }

  Matrix u;  // V x h: column x_t of the input map, stored as rows
  Matrix w;  // h x h
  Matrix o;  // V x h: output unit v reads row v

  /// Next hidden state and output distribution.
  void step(TermId input, std::span<const double> prev, std::span<double> next, std::span<double> probs) const;

  /// sum_t log p(tokens[t] | boundary, tokens[0..t)); 0 for an empty sequence.
  double logprob(std::span<const TermId> tokens) const;

  /// Cross-entropy of predicting targets[t] from inputs[0..t] starting at
  /// `state`, which is advanced to the final hidden state. With `grads` the
  /// exact gradient of that loss (full backpropagation through the segment)
  /// is added into it.
  double segment_loss(std::span<const TermId> inputs, std::span<const TermId> targets, std::vector<double>& state,
                      RnnGrads* grads) const;

  RnnGrads zero_grads() const;
};

struct RnnLmConfig {
  std::size_t hidden = 32;
  std::size_t bptt = 5;
  std::size_t epochs = 10;
  double lr = 0.1;
  std::uint64_t seed = 1;
  std::size_t max_vocab = 10000;
  double init_range = 0.1;
  /// Fraction of class documents held out to drive lr halving (at least one
  /// document when the class has 10 or more; otherwise training perplexity).
  double validation_fraction = 0.1;

  void validate() const;
};

struct RnnTrainReport {
  std::vector<double> train_perplexity;
  std::vector<double> valid_perplexity;
  std::vector<double> lr;
};

/// exp(-sum logprob / tokens) over the documents.
double perplexity(const ElmanNetwork& net, const std::vector<std::vector<TermId>>& docs);

/// SGD over the class documents in order, truncated BPTT in segments of
/// `bptt` tokens with the hidden state carried across segments. Throws
/// DivergenceError naming the epoch when the loss goes non-finite.
ElmanNetwork rnnlm_train(const std::vector<std::vector<TermId>>& docs, std::size_t vocab_size,
                         const RnnLmConfig& cfg, RnnTrainReport* report = nullptr);

struct RnnLmModel {
  LmVocab vocab;
  std::vector<std::string> classes;
  std::vector<double> priors;
  std::vector<ElmanNetwork> networks;

  void save(const std::filesystem::path& path) const;
  static RnnLmModel load(const std::filesystem::path& path);
};

/// One network per label of `corpus` (unlabeled documents ignored), priors
/// from class document counts. Classes train in parallel on `threads`.
RnnLmModel rnnlm_train_classes(const Corpus& corpus, const Vocabulary& vocab, const RnnLmConfig& cfg,
                               std::size_t threads = 1, std::vector<RnnTrainReport>* reports = nullptr);

double rnnlm_logprob(const RnnLmModel& model, std::size_t cls, const Document& doc);

/// Softmax over classes of logprob_c + log prior_c, aligned with model.classes.
std::vector<double> rnnlm_classify(const RnnLmModel& model, const Document& doc);
std::vector<double> class_posterior(std::span<const double> logprobs, std::span<const double> priors);

}  // namespace compvec
