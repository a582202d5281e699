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

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <sstream>

#include "compvec/errors.hpp"
#include "compvec/rng.hpp"
#include "compvec/stats.hpp"
#include "test_util.hpp"

using namespace compvec;
using compvec::testing::TempDir;
using compvec::testing::write_text;

namespace {

Corpus random_corpus(std::uint64_t seed, std::size_t docs, std::size_t vocab) {
  Rng rng(seed);
  Corpus c;
  for (std::size_t d = 0; d < docs; ++d) {
    std::vector<std::string> toks(1 + rng.below(40));
    for (auto& t : toks) t = "w" + std::to_string(rng.below(vocab));
    c.add(d % 2 ? "pos" : "neg", std::move(toks));
  }
  return c;
}

}  // namespace

TEST(Vocabulary, OrdersByFrequencyThenTerm) {
  Corpus c;
  c.add("a", {"b", "a", "c", "c"});
  c.add("a", {"a", "c", "d"});
  const auto v = build_vocab(c);
  EXPECT_EQ(v.terms(), (std::vector<std::string>{"c", "a", "b", "d"}));
  EXPECT_EQ(v.df(v.id("c")), 2u);
  EXPECT_EQ(v.df(v.id("b")), 1u);
  EXPECT_EQ(v.num_docs(), 2u);
}

TEST(Vocabulary, MinCountPrunesByCorpusFrequency) {
  Corpus c;
  c.add("a", {"x", "x", "y"});
  c.add("a", {"z"});
  const auto v = build_vocab(c, 2);
  EXPECT_EQ(v.size(), 1u);
  EXPECT_TRUE(v.contains("x"));
  EXPECT_FALSE(v.contains("y"));
  EXPECT_THROW(build_vocab(c, 3), DataError);
  EXPECT_THROW(build_vocab(Corpus{}), DataError);
  EXPECT_THROW(v.id("y"), LookupError);
}

TEST(Vocabulary, IdfBoundaryAndReferenceCounts) {
  const Vocabulary v({"the", "movie", "rare"}, {252, 139, 2}, 252);
  EXPECT_EQ(v.idf(v.id("the")), 0.0);
  EXPECT_NEAR(v.idf_for("movie"), std::log(252.0 / 139.0), 1e-12);
  EXPECT_NEAR(v.idf_for("movie"), 0.594955, 5e-7);
  EXPECT_NEAR(v.idf_for("rare"), std::log(126.0), 1e-12);
  EXPECT_NEAR(v.idf_for("rare"), 4.83628, 5e-6);
}

TEST(Vocabulary, RejectsInconsistentRows) {
  EXPECT_THROW(Vocabulary({"a"}, {1, 2}, 2), FormatError);
  EXPECT_THROW(Vocabulary({"a"}, {3}, 2), FormatError);
  EXPECT_THROW(Vocabulary({"a", "a"}, {1, 1}, 2), FormatError);
}

TEST(Vocabulary, SaveLoadRoundTrip) {
  TempDir tmp;
  const auto v = build_vocab(random_corpus(3, 20, 30));
  v.save(tmp / "v.tsv");
  const auto back = Vocabulary::load(tmp / "v.tsv");
  EXPECT_EQ(back.terms(), v.terms());
  EXPECT_EQ(back.num_docs(), v.num_docs());
  for (TermId i = 0; i < v.size(); ++i) EXPECT_EQ(back.df(i), v.df(i));
}

TEST(Vocabulary, LoadReportsMalformedFiles) {
  TempDir tmp;
  write_text(tmp / "nohdr.tsv", "a\t0\t1\n");
  EXPECT_THROW(Vocabulary::load(tmp / "nohdr.tsv"), ParseError);
  write_text(tmp / "gap.tsv", "#num_docs=3\na\t0\t1\nb\t2\t1\n");
  EXPECT_THROW(Vocabulary::load(tmp / "gap.tsv"), FormatError);
  write_text(tmp / "nan.tsv", "#num_docs=3\na\tzero\t1\n");
  EXPECT_THROW(Vocabulary::load(tmp / "nan.tsv"), ParseError);
}

TEST(Tfidf, MatchesBruteForceOnRandomCorpora) {
  for (std::uint64_t seed : {11u, 12u, 13u}) {
    const auto corpus = random_corpus(seed, 50, 200);
    const auto vocab = build_vocab(corpus);
    for (const auto& doc : corpus) {
      const auto v = tfidf_vectorize(vocab, doc);
      ASSERT_TRUE(v.well_formed());
      EXPECT_EQ(v.dim, vocab.size());
      std::vector<double> expect(vocab.size(), 0.0);
      for (TermId t = 0; t < vocab.size(); ++t) {
        double tf = 0;
        for (const auto& tok : doc.tokens) tf += tok == vocab.term(t);
        double df = 0;
        for (const auto& other : corpus) {
          bool has = false;
          for (const auto& tok : other.tokens) has |= tok == vocab.term(t);
          df += has;
        }
        expect[t] = tf * std::log(static_cast<double>(corpus.size()) / df);
      }
      std::vector<double> got(vocab.size(), 0.0);
      for (const auto& [i, x] : v.entries) got[i] = x;
      for (TermId t = 0; t < vocab.size(); ++t) ASSERT_NEAR(got[t], expect[t], 1e-12);
    }
  }
}

TEST(Tfidf, SkipsUnknownTokensAndNormalizes) {
  Corpus c;
  c.add("a", {"x", "y"});
  c.add("a", {"y"});
  const auto vocab = build_vocab(c);
  Document d{0, "a", {"x", "x", "unseen", "y"}};
  const auto raw = tfidf_vectorize(vocab, d);
  ASSERT_EQ(raw.entries.size(), 1u);  // y has idf 0 and is not stored
  EXPECT_NEAR(raw.entries[0].second, 2 * std::log(2.0), 1e-15);
  const auto unit = tfidf_vectorize(vocab, d, true);
  EXPECT_NEAR(unit.norm2(), 1.0, 1e-15);
  Document empty{0, "a", {"y"}};
  EXPECT_TRUE(tfidf_vectorize(vocab, empty, true).entries.empty());
}

TEST(SparseVector, DotNormAndInvariant) {
  SparseVector v{{{0, 2.0}, {3, -1.0}}, 5};
  const std::vector<double> dense{1, 1, 1, 4, 1};
  EXPECT_DOUBLE_EQ(v.dot(dense), -2.0);
  EXPECT_DOUBLE_EQ(v.norm2(), std::sqrt(5.0));
  EXPECT_TRUE(v.well_formed());
  EXPECT_FALSE((SparseVector{{{3, 1.0}, {1, 1.0}}, 5}).well_formed());
  EXPECT_FALSE((SparseVector{{{1, 0.0}}, 5}).well_formed());
  EXPECT_FALSE((SparseVector{{{5, 1.0}}, 5}).well_formed());
}

TEST(Libsvm, FormatsOneBasedAndRoundTrips) {
  SparseVector v{{{0, 0.5}, {9, 1.0 / 3.0}}, 12};
  EXPECT_EQ(format_libsvm_line("pos", v), "pos 1:0.5 10:0.333333333");
  EXPECT_EQ(format_libsvm_line("", SparseVector{{}, 3}), "0");
  TempDir tmp;
  {
    std::ofstream out(tmp / "x.svm");
    write_libsvm(out, "pos", v);
    write_libsvm(out, "neg", SparseVector{{{2, -4.0}}, 12});
  }
  const auto rows = read_libsvm(tmp / "x.svm");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].label, "pos");
  EXPECT_EQ(rows[0].vector.dim, 10u);
  EXPECT_NEAR(rows[0].vector.entries[1].second, 1.0 / 3.0, 1e-9);
  EXPECT_EQ(rows[1].vector.entries[0].first, 2u);
  EXPECT_EQ(read_libsvm(tmp / "x.svm", 12)[0].vector.dim, 12u);
}

TEST(Libsvm, ReadRejectsMalformedLines) {
  TempDir tmp;
  write_text(tmp / "a.svm", "pos 1:1 1:2\n");
  EXPECT_THROW(read_libsvm(tmp / "a.svm"), ParseError);
  write_text(tmp / "b.svm", "pos 0:1\n");
  EXPECT_THROW(read_libsvm(tmp / "b.svm"), ParseError);
  write_text(tmp / "c.svm", "pos 3\n");
  EXPECT_THROW(read_libsvm(tmp / "c.svm"), ParseError);
  write_text(tmp / "d.svm", "pos 3:x\n");
  EXPECT_THROW(read_libsvm(tmp / "d.svm"), ParseError);
}

TEST(Stopwords, ExplicitListAndDfRatio) {
  const Vocabulary v({"the", "movie", "rare"}, {252, 139, 2}, 252);
  StopwordPolicy ratio;
  ratio.df_ratio_threshold = 0.5;
  EXPECT_TRUE(is_stopword(ratio, v, "the"));
  EXPECT_TRUE(is_stopword(ratio, v, "movie"));
  EXPECT_FALSE(is_stopword(ratio, v, "rare"));
  EXPECT_THROW(is_stopword(ratio, v, "unknown"), LookupError);
  ratio.df_ratio_threshold = 0.0;
  EXPECT_THROW(is_stopword(ratio, v, "the"), ConfigError);

  StopwordPolicy list;
  list.mode = StopwordMode::kExplicitList;
  EXPECT_THROW(is_stopword(list, v, "the"), ConfigError);
  list.list = std::set<std::string>{"the", "unknown"};
  EXPECT_TRUE(is_stopword(list, v, "the"));
  EXPECT_TRUE(is_stopword(list, v, "unknown"));
  EXPECT_FALSE(is_stopword(list, v, "movie"));
}
