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
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "compvec/corpus.hpp"

namespace compvec {

using TermId = std::uint32_t;

/// Term <-> id map with document frequencies. Ids are dense 0..V-1, ordered
/// by descending corpus frequency with ties broken lexicographically.
class Vocabulary {
 public:
  Vocabulary() = default;

  /// Builds from explicit (term, df) rows. Used by the loader and tests.
  Vocabulary(std::vector<std::string> terms, std::vector<std::uint64_t> df, std::uint64_t num_docs,
             std::uint64_t min_count = 1);

  std::size_t size() const noexcept { return terms_.size(); }
  bool empty() const noexcept { return terms_.empty(); }
  std::uint64_t num_docs() const noexcept { return num_docs_; }
  std::uint64_t min_count() const noexcept { return min_count_; }

  std::optional<TermId> find(std::string_view term) const;
  /// Throws LookupError for unknown terms.
  TermId id(std::string_view term) const;
  bool contains(std::string_view term) const { return find(term).has_value(); }

  const std::string& term(TermId id) const { return terms_.at(id); }
  const std::vector<std::string>& terms() const noexcept { return terms_; }
  std::uint64_t df(TermId id) const { return df_.at(id); }

  /// ln(|D| / df(t)); exactly 0 when df(t) = |D|.
  double idf(TermId id) const;
  double idf_for(std::string_view term) const { return idf(id(term)); }

  /// Tsv: `#num_docs=<N>` header then `<term>\t<id>\t<df>` rows.
  void save(const std::filesystem::path& path) const;
  static Vocabulary load(const std::filesystem::path& path);

 private:
  std::vector<std::string> terms_;
  std::vector<std::uint64_t> df_;
  std::unordered_map<std::string, TermId> index_;
  std::uint64_t num_docs_ = 0;
  std::uint64_t min_count_ = 1;
};

/// Terms with corpus frequency < min_count are dropped. df counts distinct
/// documents. Throws DataError if the corpus is empty or everything is pruned.
Vocabulary build_vocab(const Corpus& corpus, std::uint64_t min_count = 1);

/// Sorted (index, value) pairs; no stored zeros.
struct SparseVector {
  std::vector<std::pair<std::uint32_t, double>> entries;
  std::size_t dim = 0;

  double dot(std::span<const double> dense) const;
  double norm2() const;
  /// Checks the ordering/range/no-zero invariants.
  bool well_formed() const noexcept;
};

/// tf(t, d) * idf(t) with raw counts; out-of-vocabulary tokens skipped. When
/// `l2_normalize` is set the result is scaled to unit length (if non-zero).
SparseVector tfidf_vectorize(const Vocabulary& vocab, const Document& doc, bool l2_normalize = false);

/// One libsvm-style line: `<label> <idx>:<val> ...`, 1-based indices, %.9g.
/// An empty label is written as `0`.
std::string format_libsvm_line(std::string_view label, const SparseVector& v);
void write_libsvm(std::ostream& out, std::string_view label, const SparseVector& v);

struct LibsvmRow {
  std::string label;
  SparseVector vector;
};
/// Reads rows written by write_libsvm. `dim` becomes max(index) unless a
/// larger `dim_hint` is given.
std::vector<LibsvmRow> read_libsvm(const std::filesystem::path& path, std::size_t dim_hint = 0);

enum class StopwordMode { kExplicitList, kDfRatio };

struct StopwordPolicy {
  StopwordMode mode = StopwordMode::kDfRatio;
  std::optional<std::set<std::string>> list;
  double df_ratio_threshold = 0.5;
};

/// Explicit-list mode: set membership (ConfigError if no list was supplied).
/// df-ratio mode: df(t)/|D| >= threshold (LookupError for unknown terms).
bool is_stopword(const StopwordPolicy& policy, const Vocabulary& vocab, std::string_view term);

}  // namespace compvec
