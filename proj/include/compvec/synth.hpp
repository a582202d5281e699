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

// Seeded synthetic corpora for tests and offline experiments.

#include <cstdint>

#include "compvec/corpus.hpp"

namespace compvec {

/// Two-label reviews ("pos"/"neg"). The vocabulary splits into function words
/// (in nearly every document), polar words for each label, and neutral words
/// grouped into topics that are independent of the label. Each token is a
/// function word with probability `function_rate`, a polar word with
/// probability `polar_rate` (from the document's own label with probability
/// `polar_purity`), and otherwise a topic word.
struct SentimentSynthConfig {
  std::size_t docs = 400;
  std::size_t vocab = 500;
  std::size_t function_words = 30;
  std::size_t polar_words = 40;  // per label
  std::size_t topics = 10;
  std::size_t min_length = 60;
  std::size_t max_length = 120;
  double function_rate = 0.35;
  double polar_rate = 0.12;
  double polar_purity = 0.8;
  double off_topic_rate = 0.2;
  std::size_t unlabeled = 0;  // extra unlabeled documents appended at the end
  std::uint64_t seed = 1;
};

Corpus make_sentiment_corpus(const SentimentSynthConfig& cfg);

/// Two labels ("a"/"b"), each generated by its own random first-order Markov
/// chain over a shared vocabulary. Every token has `fanout` favored successors
/// that share `concentration` of the transition mass.
struct GrammarSynthConfig {
  std::size_t docs = 200;
  std::size_t vocab = 20;
  std::size_t fanout = 3;
  double concentration = 0.85;
  std::size_t min_length = 10;
  std::size_t max_length = 30;
  std::uint64_t seed = 1;
};

Corpus make_grammar_corpus(const GrammarSynthConfig& cfg);

}  // namespace compvec
