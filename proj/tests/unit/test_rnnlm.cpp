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
#include <numeric>

#include "compvec/errors.hpp"
#include "compvec/rnnlm.hpp"
#include "compvec/synth.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace compvec;
using compvec::testing::TempDir;

TEST(LmVocab, ReservedIdsAndEncoding) {
  const LmVocab v({"good", "bad"});
  EXPECT_EQ(v.size(), 4u);
  EXPECT_EQ(v.map("</s>"), LmVocab::kBoundary);
  EXPECT_EQ(v.map("good"), 2u);
  EXPECT_EQ(v.map("unseen"), LmVocab::kUnknown);
  EXPECT_EQ(v.encode(Document{0, "", {"bad", "zzz", "good"}}), (std::vector<TermId>{3, 1, 2}));
  EXPECT_THROW(LmVocab({"a", "<unk>"}), ConfigError);

  const Vocabulary vocab({"the", "a", "film"}, {3, 2, 1}, 3);
  const auto top = LmVocab::from(vocab, 2);
  EXPECT_EQ(top.terms(), (std::vector<std::string>{"</s>", "<unk>", "the", "a"}));
}

TEST(Rnn, DistributionSumsToOneOverAllLengthTwoSequences) {
  Rng rng(1);
  const ElmanNetwork net(5, 4, rng, 0.8);
  double total = 0;
  for (TermId a = 0; a < 5; ++a) {
    for (TermId b = 0; b < 5; ++b) {
      const std::vector<TermId> seq{a, b};
      total += std::exp(net.logprob(seq));
    }
  }
  EXPECT_NEAR(total, 1.0, 1e-6);
  EXPECT_EQ(net.logprob({}), 0.0);
}

TEST(Rnn, StepProducesDistribution) {
  Rng rng(2);
  const ElmanNetwork net(7, 3, rng);
  std::vector<double> prev(3, ElmanNetwork::kInitialState), next(3), probs(7);
  net.step(2, prev, next, probs);
  EXPECT_NEAR(std::accumulate(probs.begin(), probs.end(), 0.0), 1.0, 1e-12);
  for (double h : next) {
    EXPECT_GT(h, 0.0);
    EXPECT_LT(h, 1.0);
  }
}

TEST(Rnn, BpttGradientMatchesFiniteDifferences) {
  Rng rng(3);
  ElmanNetwork net(6, 4, rng, 0.5);
  const std::vector<TermId> inputs{0, 3, 2, 5, 1, 3};
  const std::vector<TermId> targets{3, 2, 5, 1, 3, 0};
  const std::vector<double> start{0.2, 0.4, 0.6, 0.1};
  auto grads = net.zero_grads();
  auto state = start;
  net.segment_loss(inputs, targets, state, &grads);

  std::vector<double*> params;
  std::vector<double> analytic;
  for (auto [m, g] : {std::pair{&net.u, &grads.u}, std::pair{&net.w, &grads.w}, std::pair{&net.o, &grads.o}}) {
    for (std::size_t k = 0; k < m->data().size(); ++k) {
      params.push_back(&m->data()[k]);
      analytic.push_back(g->data()[k]);
    }
  }
  const double err = oracle::gradient_error(params, analytic, [&] {
    auto s = start;
    return net.segment_loss(inputs, targets, s, nullptr);
  });
  EXPECT_LT(err, 1e-4);
}

TEST(Rnn, SegmentLossCarriesState) {
  Rng rng(4);
  const ElmanNetwork net(5, 3, rng);
  const std::vector<TermId> seq{0, 1, 2, 3, 4, 2};
  std::vector<double> whole(3, ElmanNetwork::kInitialState);
  const double full = net.segment_loss(std::span(seq).first(5), std::span(seq).subspan(1), whole, nullptr);
  std::vector<double> state(3, ElmanNetwork::kInitialState);
  const double first = net.segment_loss(std::span(seq).first(2), std::span(seq).subspan(1, 2), state, nullptr);
  const double second = net.segment_loss(std::span(seq).subspan(2, 3), std::span(seq).subspan(3, 3), state, nullptr);
  EXPECT_NEAR(first + second, full, 1e-12);
  EXPECT_EQ(state, whole);
}

TEST(RnnTrain, PerplexityStrictlyDecreasesOnToyCorpus) {
  GrammarSynthConfig g;
  g.docs = 100;  // about 1k tokens in class "a"
  const auto corpus = make_grammar_corpus(g);
  const auto vocab = build_vocab(corpus);
  const auto lm = LmVocab::from(vocab, 1000);
  std::vector<std::vector<TermId>> docs;
  for (const auto& d : corpus.filter_label("a")) docs.push_back(lm.encode(d));
  RnnLmConfig cfg;
  cfg.epochs = 5;
  cfg.hidden = 16;
  RnnTrainReport report;
  const auto net = rnnlm_train(docs, lm.size(), cfg, &report);
  ASSERT_EQ(report.train_perplexity.size(), 5u);
  for (std::size_t e = 1; e < 5; ++e) EXPECT_LT(report.train_perplexity[e], report.train_perplexity[e - 1]);
  EXPECT_NEAR(perplexity(net, docs), report.train_perplexity.back(), 0.5);
}

TEST(RnnTrain, ClassifiesTwoGrammars) {
  const auto corpus = make_grammar_corpus(GrammarSynthConfig{});
  const auto [train, test] = split(corpus, 0.7, 7);
  RnnLmConfig cfg;
  cfg.epochs = 5;
  std::vector<RnnTrainReport> reports;
  const auto model = rnnlm_train_classes(train, build_vocab(train), cfg, 2, &reports);
  ASSERT_EQ(model.classes, (std::vector<std::string>{"a", "b"}));
  ASSERT_EQ(reports.size(), 2u);
  EXPECT_NEAR(model.priors[0] + model.priors[1], 1.0, 1e-12);
  double ok = 0;
  for (const auto& d : test) {
    const auto post = rnnlm_classify(model, d);
    EXPECT_NEAR(post[0] + post[1], 1.0, 1e-12);
    ok += model.classes[post[1] > post[0] ? 1 : 0] == d.label;
  }
  EXPECT_GE(ok / static_cast<double>(test.size()), 0.9);

  TempDir tmp;
  model.save(tmp / "lm.bin");
  const auto back = RnnLmModel::load(tmp / "lm.bin");
  EXPECT_EQ(back.classes, model.classes);
  EXPECT_EQ(back.vocab.terms(), model.vocab.terms());
  EXPECT_EQ(rnnlm_classify(back, test[0]), rnnlm_classify(model, test[0]));
}

TEST(RnnTrain, SeededAndThreadIndependent) {
  GrammarSynthConfig g;
  g.docs = 40;
  const auto corpus = make_grammar_corpus(g);
  RnnLmConfig cfg;
  cfg.epochs = 2;
  const auto vocab = build_vocab(corpus);
  const auto a = rnnlm_train_classes(corpus, vocab, cfg, 1);
  const auto b = rnnlm_train_classes(corpus, vocab, cfg, 2);
  EXPECT_EQ(a.networks[0].u, b.networks[0].u);
  EXPECT_EQ(a.networks[1].o, b.networks[1].o);
}

TEST(RnnConfig, Validation) {
  RnnLmConfig c;
  EXPECT_NO_THROW(c.validate());
  c.hidden = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.bptt = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.lr = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.validation_fraction = 1.0;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(ClassPosterior, SoftmaxWithPriorsIsStable) {
  const std::vector<double> lp{-1000.0, -1001.0};
  const std::vector<double> priors{0.5, 0.5};
  const auto p = class_posterior(lp, priors);
  EXPECT_NEAR(p[0], 1 / (1 + std::exp(-1.0)), 1e-12);
  EXPECT_NEAR(p[0] + p[1], 1.0, 1e-15);
  const auto skew = class_posterior(std::vector<double>{0.0, 0.0}, std::vector<double>{0.25, 0.75});
  EXPECT_NEAR(skew[1], 0.75, 1e-15);
}

TEST(RnnLmModel, LoadRejectsGarbage) {
  TempDir tmp;
  compvec::testing::write_text(tmp / "x.bin", "not a model");
  EXPECT_THROW(RnnLmModel::load(tmp / "x.bin"), DataError);
}
