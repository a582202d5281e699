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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "compvec/corpus.hpp"
#include "compvec/embeddings.hpp"
#include "compvec/stats.hpp"

namespace compvec {

enum class CompositionVariant { kSum, kMean, kMultiplicative, kStopwordStep, kGradedIdf };

CompositionVariant parse_composition_variant(std::string_view name);
std::string_view to_string(CompositionVariant v);

struct CompositionScheme {
  CompositionVariant variant = CompositionVariant::kGradedIdf;
  /// idf threshold; only meaningful for graded-idf.
  std::optional<double> delta = 0.0;
  /// Only meaningful for stopword-step.
  std::optional<StopwordPolicy> stopword_policy;
  /// stopword-step and graded-idf divide by the number of contributing
  /// tokens when set; plain sums otherwise.
  bool average = true;

  static CompositionScheme sum() { return {CompositionVariant::kSum, std::nullopt, std::nullopt, false}; }
  static CompositionScheme mean() { return {CompositionVariant::kMean, std::nullopt, std::nullopt, true}; }
  static CompositionScheme multiplicative() {
    return {CompositionVariant::kMultiplicative, std::nullopt, std::nullopt, false};
  }
  static CompositionScheme graded_idf(double delta, bool average = true) {
    return {CompositionVariant::kGradedIdf, delta, std::nullopt, average};
  }
  static CompositionScheme stopword_step(StopwordPolicy policy, bool average = true) {
    return {CompositionVariant::kStopwordStep, std::nullopt, std::move(policy), average};
  }

  /// delta present iff graded-idf; policy present iff stopword-step.
  void validate() const;
};

struct DocumentVector {
  std::vector<double> values;
  CompositionScheme scheme;
  /// Tokens that passed the scheme's filter. 0 means `values` is the zero vector.
  std::size_t contributing = 0;
};

/// Composes a document vector from word vectors. A token takes part only if
/// it is present in both `emb` and `vocab`. Throws DataError when no token of
/// the document is in vocabulary; returns the zero vector (contributing = 0)
/// when tokens exist but the scheme filters all of them out.
DocumentVector compose(const Document& doc, const EmbeddingMatrix& emb, const Vocabulary& vocab,
                       const CompositionScheme& scheme);

/// Ids of the tokens a scheme lets through, in document order. Shared by
/// compose() and the property tests.
std::vector<TermId> contributing_tokens(const Document& doc, const EmbeddingMatrix& emb, const Vocabulary& vocab,
                                        const CompositionScheme& scheme);

struct CompositeVector {
  std::vector<std::pair<std::string, std::vector<double>>> dense_parts;
  std::optional<SparseVector> sparse_part;
  std::size_t total_dim = 0;

  /// Dense parts at indices [0, sum d), sparse part offset by sum d.
  SparseVector flatten() const;
  /// Explicit dense concatenation (tests, PCA).
  std::vector<double> to_dense() const;
};

/// Part names and widths of a composite vector. The first vector seen fixes
/// it; later vectors must match.
struct CompositeLayout {
  std::vector<std::pair<std::string, std::size_t>> parts;

  std::size_t total_dim() const;
  static CompositeLayout of(const CompositeVector& v);
  /// Throws LayoutError on any mismatch.
  void check(const CompositeVector& v) const;
};

struct CompositeOptions {
  bool l2_normalize_dense = true;
};

/// Concatenates, in fixed order, the weighted-average part, the paragraph
/// vector and the tf-idf vector. Dense parts are L2-normalized (zero parts
/// stay zero); the sparse part is appended as given. When `layout` is given
/// the result is checked against it.
CompositeVector composite_vector(const std::optional<DocumentVector>& weighted_avg,
                                 const std::optional<std::vector<double>>& paragraph,
                                 const std::optional<SparseVector>& tfidf, const CompositeOptions& opts = {},
                                 const CompositeLayout* layout = nullptr);

/// Convenience overload composing the weighted-average part itself.
CompositeVector composite_vector(const Document& doc, const EmbeddingMatrix& emb, const Vocabulary& vocab,
                                 const CompositionScheme& scheme, const std::optional<std::vector<double>>& paragraph,
                                 const std::optional<SparseVector>& tfidf, const CompositeOptions& opts = {},
                                 const CompositeLayout* layout = nullptr);

}  // namespace compvec
