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

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace compvec {

using DocId = std::uint32_t;

struct Document {
  DocId id = 0;
  std::string label;  // empty = unlabeled
  std::vector<std::string> tokens;

  bool labeled() const noexcept { return !label.empty(); }
};

/// Ordered, immutable-after-construction document collection. Ids are dense
/// and equal to the position in `documents()`.
class Corpus {
 public:
  Corpus() = default;

  /// Appends a document, assigning it the next id. Returns that id.
  DocId add(std::string label, std::vector<std::string> tokens);

  const std::vector<Document>& documents() const noexcept { return docs_; }
  const Document& operator[](DocId id) const { return docs_.at(id); }
  std::size_t size() const noexcept { return docs_.size(); }
  bool empty() const noexcept { return docs_.empty(); }

  /// Distinct non-empty labels present.
  const std::set<std::string>& labelset() const noexcept { return labels_; }

  auto begin() const noexcept { return docs_.begin(); }
  auto end() const noexcept { return docs_.end(); }

  /// Documents carrying `label`, renumbered.
  Corpus filter_label(std::string_view label) const;

  /// Only labeled documents, renumbered.
  Corpus labeled_only() const;

  /// Concatenation; ids of `other` shift by size().
  void append(const Corpus& other);

 private:
  std::vector<Document> docs_;
  std::set<std::string> labels_;
};

enum class UnicodeMode { kAsciiLetters, kUnicodeAlphanumeric };

struct TokenizerConfig {
  bool lowercase = true;
  bool strip_punctuation = true;
  UnicodeMode unicode_mode = UnicodeMode::kUnicodeAlphanumeric;
};

/// Whitespace split, then optional trimming of leading/trailing punctuation
/// (what counts as punctuation depends on `unicode_mode`), then optional
/// lowercasing. Tokens left empty by trimming are dropped. Input must be
/// valid UTF-8 (throws EncodingError otherwise).
std::vector<std::string> tokenize(std::string_view text, const TokenizerConfig& cfg = {});

/// True if `bytes` is well-formed UTF-8 (no overlongs, no surrogates).
bool valid_utf8(std::string_view bytes) noexcept;

enum class CorpusFormat { kTsv, kDirPerClass };

CorpusFormat parse_corpus_format(std::string_view name);

/// tsv: one `<label>\t<text>` per line (empty label = unlabeled).
/// dir-per-class: `<root>/<label>/*.txt`; `<root>/unlabeled/` (or IMDB's
/// `unsup/`) holds unlabeled documents. Directories and files are visited in
/// sorted order so ids are reproducible.
Corpus load_corpus(const std::filesystem::path& path, CorpusFormat fmt,
                   const TokenizerConfig& cfg = {});

/// Writes `<label>\t<space-joined tokens>` per document.
void save_corpus_tsv(const Corpus& corpus, const std::filesystem::path& path);

/// Stratified split. Each label group (unlabeled documents form their own
/// group) is shuffled with `seed` and its first round(fraction * n) members
/// go to the training side. Both outputs are renumbered in input order.
std::pair<Corpus, Corpus> split(const Corpus& corpus, double train_fraction, std::uint64_t seed);

}  // namespace compvec
