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

#include "compvec/synth.hpp"

#include <algorithm>
#include <cstdio>
#include <string>
#include <vector>

#include "compvec/errors.hpp"
#include "compvec/rng.hpp"

namespace compvec {

namespace {

class Categorical {
 public:
  explicit Categorical(std::vector<double> weights) : cdf_(std::move(weights)) {
    double total = 0.0;
    for (auto& w : cdf_) {
      total += w;
      w = total;
    }
    for (auto& w : cdf_) w /= total;
  }
  std::size_t draw(Rng& rng) const {
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), rng.uniform());
    return std::min<std::size_t>(static_cast<std::size_t>(it - cdf_.begin()), cdf_.size() - 1);
  }

 private:
  std::vector<double> cdf_;
};

Categorical zipf(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t r = 0; r < n; ++r) w[r] = 1.0 / static_cast<double>(r + 1);
  return Categorical(std::move(w));
}

std::string name(const char* prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%03zu", prefix, i);
  return buf;
}

std::size_t length(Rng& rng, std::size_t lo, std::size_t hi) { return lo + rng.below(hi - lo + 1); }

}  // namespace

Corpus make_sentiment_corpus(const SentimentSynthConfig& cfg) {
  const std::size_t polar = 2 * cfg.polar_words;
  if (cfg.docs < 2 || cfg.topics < 1 || cfg.function_words < 1 || cfg.polar_words < 1 ||
      cfg.vocab < cfg.function_words + polar + cfg.topics) {
    throw ConfigError("synthetic sentiment corpus: vocabulary too small for its word groups");
  }
  if (cfg.min_length < 1 || cfg.max_length < cfg.min_length) throw ConfigError("synthetic corpus: bad length range");
  const std::size_t neutral = cfg.vocab - cfg.function_words - polar;
  const std::size_t per_topic = neutral / cfg.topics;

  std::vector<std::string> function_terms, pos_terms, neg_terms, neutral_terms;
  for (std::size_t i = 0; i < cfg.function_words; ++i) function_terms.push_back(name("fn", i));
  for (std::size_t i = 0; i < cfg.polar_words; ++i) pos_terms.push_back(name("pos", i));
  for (std::size_t i = 0; i < cfg.polar_words; ++i) neg_terms.push_back(name("neg", i));
  for (std::size_t i = 0; i < neutral; ++i) neutral_terms.push_back(name("nt", i));

  const auto fn_dist = zipf(function_terms.size());
  const auto polar_dist = zipf(cfg.polar_words);
  const auto topic_dist = zipf(per_topic);
  const auto neutral_dist = zipf(neutral);

  Rng rng(Rng::derive(cfg.seed, 0x5e47));
  Corpus corpus;
  const auto make_doc = [&](int label) {
    const std::size_t topic = rng.below(cfg.topics);
    const std::size_t n = length(rng, cfg.min_length, cfg.max_length);
    std::vector<std::string> tokens;
    tokens.reserve(n);
    for (std::size_t t = 0; t < n; ++t) {
      const double u = rng.uniform();
      if (u < cfg.function_rate) {
        tokens.push_back(function_terms[fn_dist.draw(rng)]);
      } else if (u < cfg.function_rate + cfg.polar_rate && label != 0) {
        const bool own = rng.uniform() < cfg.polar_purity;
        const auto& set = (label > 0) == own ? pos_terms : neg_terms;
        tokens.push_back(set[polar_dist.draw(rng)]);
      } else if (rng.uniform() < cfg.off_topic_rate) {
        tokens.push_back(neutral_terms[neutral_dist.draw(rng)]);
      } else {
        tokens.push_back(neutral_terms[topic * per_topic + topic_dist.draw(rng)]);
      }
    }
    return tokens;
  };
  for (std::size_t d = 0; d < cfg.docs; ++d) {
    const int label = d % 2 == 0 ? 1 : -1;
    corpus.add(label > 0 ? "pos" : "neg", make_doc(label));
  }
  // Unlabeled documents still carry polarity, like real unlabeled reviews.
  for (std::size_t d = 0; d < cfg.unlabeled; ++d) {
    auto tokens = make_doc(d % 2 == 0 ? 1 : -1);
    corpus.add("", std::move(tokens));
  }
  return corpus;
}

Corpus make_grammar_corpus(const GrammarSynthConfig& cfg) {
  if (cfg.vocab < 2 || cfg.fanout < 1 || cfg.fanout > cfg.vocab || cfg.docs < 2) {
    throw ConfigError("synthetic grammar corpus: bad vocabulary or fanout");
  }
  if (cfg.min_length < 1 || cfg.max_length < cfg.min_length) throw ConfigError("synthetic corpus: bad length range");
  if (!(cfg.concentration > 0.0 && cfg.concentration <= 1.0)) {
    throw ConfigError("synthetic grammar corpus: concentration must be in (0, 1]");
  }
  Rng rng(Rng::derive(cfg.seed, 0x9a3));
  std::vector<std::string> terms;
  for (std::size_t i = 0; i < cfg.vocab; ++i) terms.push_back(name("g", i));

  // Row `vocab` is the start state.
  const auto chain = [&] {
    std::vector<Categorical> rows;
    std::vector<std::size_t> ids(cfg.vocab);
    for (std::size_t s = 0; s <= cfg.vocab; ++s) {
      for (std::size_t i = 0; i < cfg.vocab; ++i) ids[i] = i;
      rng.shuffle(ids.begin(), ids.end());
      std::vector<double> w(cfg.vocab, (1.0 - cfg.concentration) / static_cast<double>(cfg.vocab));
      for (std::size_t k = 0; k < cfg.fanout; ++k) w[ids[k]] += cfg.concentration / static_cast<double>(cfg.fanout);
      rows.emplace_back(std::move(w));
    }
    return rows;
  };
  const auto chain_a = chain();
  const auto chain_b = chain();

  Corpus corpus;
  for (std::size_t d = 0; d < cfg.docs; ++d) {
    const bool a = d % 2 == 0;
    const auto& rows = a ? chain_a : chain_b;
    const std::size_t n = length(rng, cfg.min_length, cfg.max_length);
    std::vector<std::string> tokens;
    std::size_t state = cfg.vocab;
    for (std::size_t t = 0; t < n; ++t) {
      state = rows[state].draw(rng);
      tokens.push_back(terms[state]);
    }
    corpus.add(a ? "a" : "b", std::move(tokens));
  }
  return corpus;
}

}  // namespace compvec
