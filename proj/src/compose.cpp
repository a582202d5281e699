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

#include "compvec/compose.hpp"

#include <cmath>

#include "compvec/errors.hpp"
#include "compvec/simd.hpp"

namespace compvec {

CompositionVariant parse_composition_variant(std::string_view name) {
  if (name == "sum") return CompositionVariant::kSum;
  if (name == "mean") return CompositionVariant::kMean;
  if (name == "multiplicative") return CompositionVariant::kMultiplicative;
  if (name == "stopword-step") return CompositionVariant::kStopwordStep;
  if (name == "graded-idf") return CompositionVariant::kGradedIdf;
  throw ConfigError("unknown composition scheme '" + std::string(name) + "'");
}

std::string_view to_string(CompositionVariant v) {
  switch (v) {
    case CompositionVariant::kSum:
      return "sum";
    case CompositionVariant::kMean:
      return "mean";
    case CompositionVariant::kMultiplicative:
      return "multiplicative";
    case CompositionVariant::kStopwordStep:
      return "stopword-step";
    case CompositionVariant::kGradedIdf:
      return "graded-idf";
  }
  return "?";
}

void CompositionScheme::validate() const {
  const bool graded = variant == CompositionVariant::kGradedIdf;
  if (graded != delta.has_value()) throw ConfigError("delta must be set exactly for graded-idf composition");
  if (graded && !(*delta >= 0.0)) throw ConfigError("delta must be non-negative");
  if ((variant == CompositionVariant::kStopwordStep) != stopword_policy.has_value()) {
    throw ConfigError("a stopword policy must be set exactly for stopword-step composition");
  }
}

namespace {

struct Token {
  TermId emb;
  TermId vocab;
};

std::vector<Token> filtered(const Document& doc, const EmbeddingMatrix& emb, const Vocabulary& vocab,
                            const CompositionScheme& scheme) {
  scheme.validate();
  std::vector<Token> out;
  bool any_in_vocab = false;
  for (const auto& t : doc.tokens) {
    const auto e = emb.find(t);
    if (!e) continue;
    const auto v = vocab.find(t);
    if (!v) continue;
    any_in_vocab = true;
    switch (scheme.variant) {
      case CompositionVariant::kStopwordStep:
        if (is_stopword(*scheme.stopword_policy, vocab, t)) continue;
        break;
      case CompositionVariant::kGradedIdf:
        if (vocab.idf(*v) <= *scheme.delta) continue;
        break;
      default:
        break;
    }
    out.push_back({*e, *v});
  }
  if (!any_in_vocab) {
    throw DataError("document " + std::to_string(doc.id) + " has no in-vocabulary token to compose");
  }
  return out;
}

}  // namespace

std::vector<TermId> contributing_tokens(const Document& doc, const EmbeddingMatrix& emb, const Vocabulary& vocab,
                                        const CompositionScheme& scheme) {
  std::vector<TermId> ids;
  for (const auto& t : filtered(doc, emb, vocab, scheme)) ids.push_back(t.vocab);
  return ids;
}

DocumentVector compose(const Document& doc, const EmbeddingMatrix& emb, const Vocabulary& vocab,
                       const CompositionScheme& scheme) {
  const auto tokens = filtered(doc, emb, vocab, scheme);
  DocumentVector out{std::vector<double>(emb.dim(), 0.0), scheme, tokens.size()};
  if (tokens.empty()) return out;

  auto& v = out.values;
  switch (scheme.variant) {
    case CompositionVariant::kMultiplicative:
      v.assign(emb.dim(), 1.0);
      for (const auto& t : tokens) simd::mul(v, emb.input.row(t.emb), v);
      return out;
    case CompositionVariant::kGradedIdf:
      for (const auto& t : tokens) simd::axpy(vocab.idf(t.vocab), emb.input.row(t.emb), v);
      break;
    default:
      for (const auto& t : tokens) simd::axpy(1.0, emb.input.row(t.emb), v);
      break;
  }
  const bool divide = scheme.variant == CompositionVariant::kMean ||
                      (scheme.average && (scheme.variant == CompositionVariant::kStopwordStep ||
                                          scheme.variant == CompositionVariant::kGradedIdf));
  if (divide) simd::scale(1.0 / static_cast<double>(tokens.size()), v);
  return out;
}

SparseVector CompositeVector::flatten() const {
  SparseVector out;
  out.dim = total_dim;
  std::size_t offset = 0;
  for (const auto& [name, values] : dense_parts) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (values[i] != 0.0) out.entries.emplace_back(static_cast<std::uint32_t>(offset + i), values[i]);
    }
    offset += values.size();
  }
  if (sparse_part) {
    for (const auto& [i, x] : sparse_part->entries) out.entries.emplace_back(static_cast<std::uint32_t>(offset + i), x);
  }
  return out;
}

std::vector<double> CompositeVector::to_dense() const {
  std::vector<double> out(total_dim, 0.0);
  for (const auto& [i, x] : flatten().entries) out[i] = x;
  return out;
}

std::size_t CompositeLayout::total_dim() const {
  std::size_t n = 0;
  for (const auto& p : parts) n += p.second;
  return n;
}

CompositeLayout CompositeLayout::of(const CompositeVector& v) {
  CompositeLayout l;
  for (const auto& [name, values] : v.dense_parts) l.parts.emplace_back(name, values.size());
  if (v.sparse_part) l.parts.emplace_back("tfidf", v.sparse_part->dim);
  return l;
}

void CompositeLayout::check(const CompositeVector& v) const {
  const auto other = of(v);
  if (other.parts != parts) {
    std::string want;
    std::string got;
    for (const auto& [n, d] : parts) want += n + ":" + std::to_string(d) + " ";
    for (const auto& [n, d] : other.parts) got += n + ":" + std::to_string(d) + " ";
    throw LayoutError("composite layout mismatch: expected [" + want + "] got [" + got + "]");
  }
}

CompositeVector composite_vector(const std::optional<DocumentVector>& weighted_avg,
                                 const std::optional<std::vector<double>>& paragraph,
                                 const std::optional<SparseVector>& tfidf, const CompositeOptions& opts,
                                 const CompositeLayout* layout) {
  if (!weighted_avg && !paragraph && !tfidf) throw ConfigError("composite vector needs at least one part");
  CompositeVector out;
  const auto add_dense = [&](std::string name, std::vector<double> values) {
    if (opts.l2_normalize_dense) {
      const double n = std::sqrt(simd::dot(values, values));
      if (n > 0.0) simd::scale(1.0 / n, values);
    }
    out.total_dim += values.size();
    out.dense_parts.emplace_back(std::move(name), std::move(values));
  };
  if (weighted_avg) add_dense("weighted-avg", weighted_avg->values);
  if (paragraph) add_dense("paragraph", *paragraph);
  if (tfidf) {
    out.sparse_part = *tfidf;
    out.total_dim += tfidf->dim;
  }
  if (layout) layout->check(out);
  return out;
}

CompositeVector composite_vector(const Document& doc, const EmbeddingMatrix& emb, const Vocabulary& vocab,
                                 const CompositionScheme& scheme, const std::optional<std::vector<double>>& paragraph,
                                 const std::optional<SparseVector>& tfidf, const CompositeOptions& opts,
                                 const CompositeLayout* layout) {
  return composite_vector(compose(doc, emb, vocab, scheme), paragraph, tfidf, opts, layout);
}

}  // namespace compvec
