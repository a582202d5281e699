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

#include "compvec/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "compvec/errors.hpp"
#include "compvec/rng.hpp"

namespace compvec {

DocId Corpus::add(std::string label, std::vector<std::string> tokens) {
  const auto id = static_cast<DocId>(docs_.size());
  if (!label.empty()) labels_.insert(label);
  docs_.push_back(Document{id, std::move(label), std::move(tokens)});
  return id;
}

Corpus Corpus::filter_label(std::string_view label) const {
  Corpus out;
  for (const auto& d : docs_) {
    if (d.label == label) out.add(d.label, d.tokens);
  }
  return out;
}

Corpus Corpus::labeled_only() const {
  Corpus out;
  for (const auto& d : docs_) {
    if (d.labeled()) out.add(d.label, d.tokens);
  }
  return out;
}

void Corpus::append(const Corpus& other) {
  for (const auto& d : other.docs_) add(d.label, d.tokens);
}

namespace {

constexpr char32_t kInvalid = 0xFFFFFFFF;

// Decodes one code point starting at s[i]; advances i. Returns kInvalid on
// malformed input.
char32_t decode(std::string_view s, std::size_t& i) noexcept {
  const auto b0 = static_cast<unsigned char>(s[i]);
  if (b0 < 0x80) {
    ++i;
    return b0;
  }
  int len;
  char32_t cp;
  char32_t min;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2, cp = b0 & 0x1F, min = 0x80;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3, cp = b0 & 0x0F, min = 0x800;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4, cp = b0 & 0x07, min = 0x10000;
  } else {
    return kInvalid;
  }
  if (i + len > s.size()) return kInvalid;
  for (int k = 1; k < len; ++k) {
    const auto b = static_cast<unsigned char>(s[i + k]);
    if ((b & 0xC0) != 0x80) return kInvalid;
    cp = (cp << 6) | (b & 0x3F);
  }
  if (cp < min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return kInvalid;
  i += len;
  return cp;
}

void encode(char32_t cp, std::string& out) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

bool is_space(char32_t c) noexcept {
  switch (c) {
    case ' ': case '\t': case '\n': case '\v': case '\f': case '\r':
    case 0x85: case 0xA0: case 0x1680: case 0x2028: case 0x2029:
    case 0x202F: case 0x205F: case 0x3000:
      return true;
    default:
      return c >= 0x2000 && c <= 0x200A;
  }
}

bool ascii_alnum(char32_t c) noexcept {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

// Punctuation and symbol blocks; everything else outside ASCII counts as part
// of a word (letters, digits, combining marks such as Devanagari matras).
bool unicode_word_char(char32_t c) noexcept {
  if (c < 0x80) return ascii_alnum(c);
  if (c < 0xC0) return c == 0xAA || c == 0xB5 || c == 0xBA;
  if (c == 0xD7 || c == 0xF7) return false;
  if (c == 0x0964 || c == 0x0965) return false;  // danda, double danda
  if (c >= 0x2000 && c <= 0x206F) return false;
  if (c >= 0x20A0 && c <= 0x20CF) return false;
  if (c >= 0x2190 && c <= 0x2BFF) return false;
  if (c >= 0x3000 && c <= 0x303F) return false;
  if (c >= 0xFE30 && c <= 0xFE4F) return false;
  if ((c >= 0xFF01 && c <= 0xFF0F) || (c >= 0xFF1A && c <= 0xFF20) ||
      (c >= 0xFF3B && c <= 0xFF40) || (c >= 0xFF5B && c <= 0xFF65)) {
    return false;
  }
  if (c >= 0x1F000 && c <= 0x1FAFF) return false;
  return true;
}

char32_t to_lower(char32_t c) noexcept {
  if (c >= 'A' && c <= 'Z') return c + 32;
  if (c < 0xC0) return c;
  if (c <= 0xDE && c != 0xD7) return c + 32;                       // Latin-1
  if (c >= 0x100 && c <= 0x17F && c != 0x130 && c != 0x138 && c != 0x149 && c != 0x178) {
    // Latin Extended-A alternates upper/lower; parity flips in two runs.
    const bool flipped = (c >= 0x139 && c <= 0x148) || (c >= 0x179 && c <= 0x17E);
    return ((c % 2 == 0) != flipped) ? c + 1 : c;
  }
  if (c >= 0x391 && c <= 0x3AB && c != 0x3A2) return c + 32;        // Greek
  if (c >= 0x410 && c <= 0x42F) return c + 32;                      // Cyrillic
  if (c >= 0x400 && c <= 0x40F) return c + 80;
  return c;
}

}  // namespace

bool valid_utf8(std::string_view bytes) noexcept {
  std::size_t i = 0;
  while (i < bytes.size()) {
    if (decode(bytes, i) == kInvalid) return false;
  }
  return true;
}

std::vector<std::string> tokenize(std::string_view text, const TokenizerConfig& cfg) {
  std::vector<char32_t> cps;
  cps.reserve(text.size());
  for (std::size_t i = 0; i < text.size();) {
    const char32_t c = decode(text, i);
    if (c == kInvalid) throw EncodingError("invalid UTF-8 at byte offset " + std::to_string(i));
    cps.push_back(c);
  }

  const auto word_char = [&](char32_t c) {
    return cfg.unicode_mode == UnicodeMode::kAsciiLetters ? ascii_alnum(c) : unicode_word_char(c);
  };

  std::vector<std::string> tokens;
  std::size_t pos = 0;
  while (pos < cps.size()) {
    while (pos < cps.size() && is_space(cps[pos])) ++pos;
    std::size_t end = pos;
    while (end < cps.size() && !is_space(cps[end])) ++end;
    std::size_t lo = pos;
    std::size_t hi = end;
    if (cfg.strip_punctuation) {
      while (lo < hi && !word_char(cps[lo])) ++lo;
      while (hi > lo && !word_char(cps[hi - 1])) --hi;
    }
    if (lo < hi) {
      std::string tok;
      for (std::size_t k = lo; k < hi; ++k) encode(cfg.lowercase ? to_lower(cps[k]) : cps[k], tok);
      tokens.push_back(std::move(tok));
    }
    pos = end;
  }
  return tokens;
}

CorpusFormat parse_corpus_format(std::string_view name) {
  if (name == "tsv") return CorpusFormat::kTsv;
  if (name == "dir" || name == "dir-per-class") return CorpusFormat::kDirPerClass;
  throw ConfigError("unknown corpus format '" + std::string(name) + "' (expected tsv or dir-per-class)");
}

namespace {

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw DataError("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Corpus load_tsv(const std::filesystem::path& path, const TokenizerConfig& cfg) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  Corpus corpus;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!valid_utf8(line)) throw EncodingError(path.string() + ":" + std::to_string(lineno) + ": invalid UTF-8");
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError(path.string(), lineno, "missing tab between label and text");
    corpus.add(line.substr(0, tab), tokenize(std::string_view(line).substr(tab + 1), cfg));
  }
  return corpus;
}

Corpus load_dirs(const std::filesystem::path& root, const TokenizerConfig& cfg) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(root)) throw DataError(root.string() + " is not a directory");
  std::vector<fs::path> classes;
  for (const auto& e : fs::directory_iterator(root)) {
    if (e.is_directory()) classes.push_back(e.path());
  }
  std::sort(classes.begin(), classes.end());
  Corpus corpus;
  for (const auto& dir : classes) {
    const std::string name = dir.filename().string();
    const std::string label = (name == "unlabeled" || name == "unsup") ? std::string() : name;
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir)) {
      if (e.is_regular_file() && e.path().extension() == ".txt") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      const std::string text = read_file(f);
      if (!valid_utf8(text)) throw EncodingError(f.string() + ": invalid UTF-8");
      corpus.add(label, tokenize(text, cfg));
    }
  }
  return corpus;
}

}  // namespace

Corpus load_corpus(const std::filesystem::path& path, CorpusFormat fmt, const TokenizerConfig& cfg) {
  if (!std::filesystem::exists(path)) throw DataError("no such file: " + path.string());
  return fmt == CorpusFormat::kTsv ? load_tsv(path, cfg) : load_dirs(path, cfg);
}

void save_corpus_tsv(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  for (const auto& d : corpus) {
    out << d.label << '\t';
    for (std::size_t i = 0; i < d.tokens.size(); ++i) {
      if (i) out << ' ';
      out << d.tokens[i];
    }
    out << '\n';
  }
}

std::pair<Corpus, Corpus> split(const Corpus& corpus, double train_fraction, std::uint64_t seed) {
  if (corpus.empty()) throw DataError("cannot split an empty corpus");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw RangeError("train fraction must lie in (0, 1)");
  }
  std::map<std::string, std::vector<DocId>> groups;
  for (const auto& d : corpus) groups[d.label].push_back(d.id);

  std::vector<bool> in_train(corpus.size(), false);
  Rng rng(seed);
  for (auto& [label, ids] : groups) {
    if (ids.size() < 2) {
      throw DataError("label '" + label + "' has fewer than 2 documents; cannot stratify");
    }
    rng.shuffle(ids.begin(), ids.end());
    const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(ids.size())));
    for (std::size_t i = 0; i < n_train; ++i) in_train[ids[i]] = true;
  }
  Corpus train;
  Corpus test;
  for (const auto& d : corpus) (in_train[d.id] ? train : test).add(d.label, d.tokens);
  return {std::move(train), std::move(test)};
}

}  // namespace compvec
