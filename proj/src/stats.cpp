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

#include "compvec/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "compvec/errors.hpp"

namespace compvec {

Vocabulary::Vocabulary(std::vector<std::string> terms, std::vector<std::uint64_t> df,
                       std::uint64_t num_docs, std::uint64_t min_count)
    : terms_(std::move(terms)), df_(std::move(df)), num_docs_(num_docs), min_count_(min_count) {
  if (terms_.size() != df_.size()) throw FormatError("vocabulary: term and df counts differ");
  index_.reserve(terms_.size());
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (df_[i] < 1 || df_[i] > num_docs_) {
      throw FormatError("vocabulary: df(" + terms_[i] + ") = " + std::to_string(df_[i]) +
                        " outside [1, " + std::to_string(num_docs_) + "]");
    }
    if (!index_.emplace(terms_[i], static_cast<TermId>(i)).second) {
      throw FormatError("vocabulary: duplicate term '" + terms_[i] + "'");
    }
  }
}

std::optional<TermId> Vocabulary::find(std::string_view term) const {
  const auto it = index_.find(std::string(term));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

TermId Vocabulary::id(std::string_view term) const {
  if (auto id = find(term)) return *id;
  throw LookupError("term not in vocabulary: '" + std::string(term) + "'");
}

double Vocabulary::idf(TermId id) const {
  const std::uint64_t d = df_.at(id);
  if (d == num_docs_) return 0.0;
  return std::log(static_cast<double>(num_docs_) / static_cast<double>(d));
}

void Vocabulary::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << "#num_docs=" << num_docs_ << '\n';
  for (std::size_t i = 0; i < terms_.size(); ++i) out << terms_[i] << '\t' << i << '\t' << df_[i] << '\n';
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("#num_docs=", 0) != 0) {
    throw ParseError(path.string(), 1, "expected '#num_docs=<N>' header");
  }
  std::uint64_t num_docs = 0;
  try {
    num_docs = std::stoull(line.substr(10));
  } catch (const std::exception&) {
    throw ParseError(path.string(), 1, "bad num_docs value");
  }
  std::map<std::uint64_t, std::pair<std::string, std::uint64_t>> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos) throw ParseError(path.string(), lineno, "expected <term>\\t<id>\\t<df>");
    try {
      const auto id = std::stoull(line.substr(t1 + 1, t2 - t1 - 1));
      const auto df = std::stoull(line.substr(t2 + 1));
      if (!rows.emplace(id, std::make_pair(line.substr(0, t1), df)).second) {
        throw ParseError(path.string(), lineno, "duplicate id");
      }
    } catch (const std::invalid_argument&) {
      throw ParseError(path.string(), lineno, "non-numeric id or df");
    }
  }
  std::vector<std::string> terms;
  std::vector<std::uint64_t> df;
  for (const auto& [id, row] : rows) {
    if (id != terms.size()) throw FormatError(path.string() + ": ids are not dense 0..V-1");
    terms.push_back(row.first);
    df.push_back(row.second);
  }
  return Vocabulary(std::move(terms), std::move(df), num_docs);
}

Vocabulary build_vocab(const Corpus& corpus, std::uint64_t min_count) {
  if (corpus.empty()) throw DataError("cannot build a vocabulary from an empty corpus");
  if (min_count < 1) throw ConfigError("min_count must be >= 1");
  struct Stat {
    std::uint64_t count = 0;
    std::uint64_t df = 0;
    DocId last_doc = 0;
    bool seen = false;
  };
  std::unordered_map<std::string, Stat> stats;
  for (const auto& doc : corpus) {
    for (const auto& tok : doc.tokens) {
      auto& s = stats[tok];
      ++s.count;
      if (!s.seen || s.last_doc != doc.id) {
        ++s.df;
        s.last_doc = doc.id;
        s.seen = true;
      }
    }
  }
  std::vector<std::pair<const std::string*, const Stat*>> kept;
  for (const auto& [term, s] : stats) {
    if (s.count >= min_count) kept.emplace_back(&term, &s);
  }
  if (kept.empty()) {
    throw DataError("vocabulary is empty after pruning with min_count=" + std::to_string(min_count));
  }
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (a.second->count != b.second->count) return a.second->count > b.second->count;
    return *a.first < *b.first;
  });
  std::vector<std::string> terms;
  std::vector<std::uint64_t> df;
  terms.reserve(kept.size());
  df.reserve(kept.size());
  for (const auto& [t, s] : kept) {
    terms.push_back(*t);
    df.push_back(s->df);
  }
  return Vocabulary(std::move(terms), std::move(df), corpus.size(), min_count);
}

double SparseVector::dot(std::span<const double> dense) const {
  double s = 0.0;
  for (const auto& [i, v] : entries) s += v * dense[i];
  return s;
}

double SparseVector::norm2() const {
  double s = 0.0;
  for (const auto& e : entries) s += e.second * e.second;
  return std::sqrt(s);
}

bool SparseVector::well_formed() const noexcept {
  for (std::size_t k = 0; k < entries.size(); ++k) {
    if (entries[k].first >= dim || entries[k].second == 0.0) return false;
    if (k > 0 && entries[k].first <= entries[k - 1].first) return false;
  }
  return true;
}

SparseVector tfidf_vectorize(const Vocabulary& vocab, const Document& doc, bool l2_normalize) {
  std::map<TermId, std::uint64_t> tf;
  for (const auto& tok : doc.tokens) {
    if (auto id = vocab.find(tok)) ++tf[*id];
  }
  SparseVector out;
  out.dim = vocab.size();
  out.entries.reserve(tf.size());
  for (const auto& [id, count] : tf) {
    const double w = static_cast<double>(count) * vocab.idf(id);
    if (w != 0.0) out.entries.emplace_back(id, w);
  }
  if (l2_normalize) {
    const double n = out.norm2();
    if (n > 0.0) {
      for (auto& e : out.entries) e.second /= n;
    }
  }
  return out;
}

std::string format_libsvm_line(std::string_view label, const SparseVector& v) {
  std::string line = label.empty() ? std::string("0") : std::string(label);
  char buf[64];
  for (const auto& [i, x] : v.entries) {
    std::snprintf(buf, sizeof buf, " %u:%.9g", static_cast<unsigned>(i + 1), x);
    line += buf;
  }
  return line;
}

void write_libsvm(std::ostream& out, std::string_view label, const SparseVector& v) {
  out << format_libsvm_line(label, v) << '\n';
}

std::vector<LibsvmRow> read_libsvm(const std::filesystem::path& path, std::size_t dim_hint) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<LibsvmRow> rows;
  std::string line;
  std::size_t lineno = 0;
  std::size_t max_index = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ss(line);
    LibsvmRow row;
    ss >> row.label;
    std::string item;
    while (ss >> item) {
      const auto colon = item.find(':');
      if (colon == std::string::npos) throw ParseError(path.string(), lineno, "expected <idx>:<val>");
      std::size_t idx = 0;
      double val = 0.0;
      try {
        idx = std::stoul(item.substr(0, colon));
        val = std::stod(item.substr(colon + 1));
      } catch (const std::exception&) {
        throw ParseError(path.string(), lineno, "bad feature '" + item + "'");
      }
      if (idx < 1) throw ParseError(path.string(), lineno, "indices are 1-based");
      if (!row.vector.entries.empty() && idx - 1 <= row.vector.entries.back().first) {
        throw ParseError(path.string(), lineno, "indices must be strictly increasing");
      }
      max_index = std::max(max_index, idx);
      if (val != 0.0) row.vector.entries.emplace_back(static_cast<std::uint32_t>(idx - 1), val);
    }
    rows.push_back(std::move(row));
  }
  const std::size_t dim = std::max(dim_hint, max_index);
  for (auto& r : rows) r.vector.dim = dim;
  return rows;
}

bool is_stopword(const StopwordPolicy& policy, const Vocabulary& vocab, std::string_view term) {
  if (policy.mode == StopwordMode::kExplicitList) {
    if (!policy.list) throw ConfigError("explicit-list stopword policy has no list");
    return policy.list->count(std::string(term)) > 0;
  }
  if (!(policy.df_ratio_threshold > 0.0 && policy.df_ratio_threshold <= 1.0)) {
    throw ConfigError("df-ratio threshold must lie in (0, 1]");
  }
  const TermId id = vocab.id(term);
  return static_cast<double>(vocab.df(id)) / static_cast<double>(vocab.num_docs()) >=
         policy.df_ratio_threshold;
}

}  // namespace compvec
