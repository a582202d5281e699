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

#include "compvec/errors.hpp"
#include "compvec/experiment.hpp"
#include "test_util.hpp"

using namespace compvec;
using compvec::testing::TempDir;
using nlohmann::json;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.data.synthetic.docs = 160;
  c.data.synthetic.vocab = 200;
  c.data.synthetic.polar_rate = 0.3;
  c.data.test_fraction = 0.25;
  c.embeddings.dim = 16;
  c.embeddings.epochs = 2;
  c.paragraph.dim = 8;
  c.paragraph.epochs = 2;
  c.inference_epochs = 3;
  c.svm.epochs = 3;
  return c;
}

}  // namespace

TEST(Config, DefaultsRoundTripThroughJson) {
  const ExperimentConfig c;
  const auto j = c.to_json();
  EXPECT_EQ(ExperimentConfig::from_json(j).to_json(), j);
  EXPECT_EQ(j["composition"]["scheme"], "graded-idf");
  EXPECT_EQ(j["selection"]["k"], 4000);
  EXPECT_EQ(j["paragraph"]["model"], "pv-dbow");
}

TEST(Config, StrictParsing) {
  EXPECT_THROW(ExperimentConfig::from_json(json{{"svm", {{"lamda", 0.1}}}}), ConfigError);
  EXPECT_THROW(ExperimentConfig::from_json(json{{"svm", {{"lambda", "big"}}}}), ConfigError);
  EXPECT_THROW(ExperimentConfig::from_json(json{{"svm", 3}}), ConfigError);
  EXPECT_THROW(ExperimentConfig::from_json(json{{"data", {{"format", "xml"}}}}), ConfigError);
  EXPECT_THROW(ExperimentConfig::from_json(json{{"composition", {{"scheme", "max"}}}}), ConfigError);
  const auto c = ExperimentConfig::from_json(json{{"svm", {{"lambda", 0.01}}}, {"seed", 9}});
  EXPECT_EQ(c.svm.lambda, 0.01);
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.embeddings.dim, 100u);
}

TEST(Config, LoadReportsBadFiles) {
  TempDir tmp;
  compvec::testing::write_text(tmp / "bad.json", "{ not json");
  EXPECT_THROW(ExperimentConfig::load(tmp / "bad.json"), ConfigError);
  EXPECT_THROW(ExperimentConfig::load(tmp / "missing.json"), ConfigError);
  compvec::testing::write_text(tmp / "ok.json", R"({"threads": 2})");
  EXPECT_EQ(ExperimentConfig::load(tmp / "ok.json").threads, 2u);
}

TEST(Config, ValidateRanges) {
  auto c = ExperimentConfig{};
  EXPECT_NO_THROW(c.validate());
  c.data.test_fraction = 1.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.parts.wavg = c.parts.pv = c.parts.tfidf = false;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.data.format = DataFormat::kTsv;
  EXPECT_THROW(c.validate(), ConfigError);
  c.data.train = "/definitely/not/here.tsv";
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.paragraph.model = EmbeddingModel::kSkipGram;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.composition.delta = -1;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.ensemble.alpha = 2;
  EXPECT_THROW(c.validate(), RangeError);
}

TEST(Config, FlattenAndOverride) {
  auto j = ExperimentConfig{}.to_json();
  const auto flat = flatten_config(j);
  EXPECT_EQ(flat.at("svm.lambda"), 1e-4);
  EXPECT_EQ(flat.at("data.synthetic.docs"), 400);
  override_config(j, "svm.lambda", "0.5");
  override_config(j, "composition.scheme", "mean");
  override_config(j, "parts.pv", "false");
  const auto c = ExperimentConfig::from_json(j);
  EXPECT_EQ(c.svm.lambda, 0.5);
  EXPECT_EQ(c.composition.variant, CompositionVariant::kMean);
  EXPECT_FALSE(c.parts.pv);
  EXPECT_THROW(override_config(j, "svm.nope", "1"), ConfigError);
  EXPECT_THROW(override_config(j, "svm", "1"), ConfigError);
  override_config(j, "seed", "\"text\"");
  EXPECT_THROW(ExperimentConfig::from_json(j), ConfigError);
}

TEST(Metrics, ConfusionAndPerClass) {
  const std::vector<int> truth{1, 1, 1, -1, -1};
  const std::vector<int> pred{1, -1, 1, -1, 1};
  const auto r = score_predictions(truth, pred, "neg", "pos");
  EXPECT_DOUBLE_EQ(r.accuracy, 0.6);
  EXPECT_EQ(r.classes, (std::vector<std::string>{"neg", "pos"}));
  EXPECT_EQ(r.confusion, (std::vector<std::vector<std::size_t>>{{1, 1}, {1, 2}}));
  EXPECT_DOUBLE_EQ(r.per_class.at("pos").precision, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(r.per_class.at("pos").recall, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(r.per_class.at("neg").recall, 0.5);
  EXPECT_EQ(r.per_class.at("neg").support, 2u);
  EXPECT_EQ(r.test_size, 5u);
  EXPECT_THROW(score_predictions(truth, std::vector<int>{1}, "neg", "pos"), DataError);
  EXPECT_FALSE(r.to_json(false).contains("timings"));
  EXPECT_TRUE(r.to_json(true).contains("timings"));
}

TEST(Experiment, SyntheticRunIsDeterministicAndConsistent) {
  const auto cfg = small_config();
  TempDir tmp;
  const auto a = run_experiment(cfg, tmp.path());
  const auto b = run_experiment(cfg);
  EXPECT_EQ(a.to_json(false).dump(), b.to_json(false).dump());
  EXPECT_TRUE(std::filesystem::exists(tmp / "report.json"));
  std::size_t total = 0;
  for (const auto& row : a.confusion) total += row[0] + row[1];
  EXPECT_EQ(total, a.test_size);
  EXPECT_EQ(a.test_size, 40u);
  EXPECT_DOUBLE_EQ(a.accuracy, a.svm_accuracy);
  EXPECT_GT(a.accuracy, 0.6);
  EXPECT_EQ(a.feature_dim, 16u + 8u + prepare_data(cfg).vocab.size());
  EXPECT_FALSE(a.rnnlm_accuracy.has_value());
  auto expect = cfg.to_json();
  expect.erase("out");
  EXPECT_EQ(a.config, expect);
}

TEST(Experiment, SelectionAndEnsembleStages) {
  auto cfg = small_config();
  cfg.parts.pv = false;
  cfg.selection.method = SelectionMethod::kAnovaF;
  cfg.selection.k = 20;
  cfg.rnnlm.enabled = true;
  cfg.rnnlm.config.epochs = 1;
  cfg.rnnlm.config.hidden = 8;
  const auto r = run_experiment(cfg);
  EXPECT_EQ(r.feature_dim, 20u);
  ASSERT_TRUE(r.rnnlm_accuracy.has_value());
  ASSERT_TRUE(r.ensemble_accuracy.has_value());
  EXPECT_DOUBLE_EQ(r.accuracy, *r.ensemble_accuracy);

  cfg.selection.method = SelectionMethod::kPca;
  cfg.selection.n = 10;
  cfg.rnnlm.enabled = false;
  EXPECT_EQ(run_experiment(cfg).feature_dim, 10u);
}

TEST(Experiment, StageErrorsNameTheStage) {
  auto cfg = small_config();
  cfg.selection.method = SelectionMethod::kAnovaF;
  cfg.selection.k = 1'000'000;
  try {
    run_experiment(cfg);
    FAIL() << "expected a range error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kConfig);
    EXPECT_NE(std::string(e.what()).find("stage '"), std::string::npos);
  }
}

TEST(Experiment, TsvInputsWithSeparateTestFile) {
  TempDir tmp;
  std::string train, test;
  for (int i = 0; i < 40; ++i) {
    train += std::string(i % 2 ? "pos\tgreat lovely fun film " : "neg\tawful boring dull film ") + "n" +
             std::to_string(i) + "\n";
  }
  test = "pos\tlovely great film\nneg\tdull awful film\nneg\tboring film\npos\tfun film\n";
  compvec::testing::write_text(tmp / "train.tsv", train);
  compvec::testing::write_text(tmp / "test.tsv", test);
  auto cfg = small_config();
  cfg.data.format = DataFormat::kTsv;
  cfg.data.train = (tmp / "train.tsv").string();
  cfg.data.test = (tmp / "test.tsv").string();
  cfg.parts.pv = false;
  const auto r = run_experiment(cfg);
  EXPECT_EQ(r.test_size, 4u);
  EXPECT_EQ(r.accuracy, 1.0);
}

TEST(Compare, SinglePointMatchesDirectRun) {
  auto cfg = small_config();
  cfg.parts.pv = false;
  const auto rows = compare_models(cfg, CompareAxis::kDeltaSweep, {"0.5"});
  ASSERT_EQ(rows.size(), 1u);
  cfg.composition.delta = 0.5;
  EXPECT_DOUBLE_EQ(rows[0].accuracy, run_experiment(cfg).accuracy);
  const auto tsv = compare_table_tsv(CompareAxis::kDeltaSweep, rows);
  EXPECT_EQ(tsv.rfind("delta\taccuracy\n", 0), 0u);
  EXPECT_EQ(parse_compare_axis("scheme-sweep"), CompareAxis::kSchemeSweep);
  EXPECT_THROW(parse_compare_axis("everything"), ConfigError);
  EXPECT_THROW(compare_models(cfg, CompareAxis::kAlphaSweep), ConfigError);
}

TEST(Synth, GeneratorsAreSeededAndShaped) {
  SentimentSynthConfig s;
  s.docs = 50;
  s.unlabeled = 7;
  const auto a = make_sentiment_corpus(s);
  EXPECT_EQ(a.size(), 57u);
  EXPECT_EQ(a.labeled_only().size(), 50u);
  EXPECT_EQ(a.labelset(), (std::set<std::string>{"neg", "pos"}));
  for (const auto& d : a) {
    EXPECT_GE(d.tokens.size(), s.min_length);
    EXPECT_LE(d.tokens.size(), s.max_length);
  }
  EXPECT_EQ(make_sentiment_corpus(s)[3].tokens, a[3].tokens);
  const auto g = make_grammar_corpus(GrammarSynthConfig{});
  EXPECT_EQ(g.size(), 200u);
  EXPECT_EQ(g.labelset(), (std::set<std::string>{"a", "b"}));
}
