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

#include "compvec/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "compvec/errors.hpp"
#include "compvec/features.hpp"
#include "parallel.hpp"

namespace compvec {

using nlohmann::json;

namespace {

// Strict reader over one JSON object: every key must be consumed.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError("config " + where() + " must be an object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    if (!j_.contains(key)) return;
    seen_.insert(key);
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError("config key " + path_ + key + " has the wrong type");
    }
  }

  template <typename T, typename Parse>
  void get_enum(const char* key, T& out, Parse parse) {
    std::string s;
    if (!j_.contains(key)) return;
    get(key, s);
    out = parse(s);
  }

  bool has(const char* key) const { return j_.contains(key); }

  Reader child(const char* key) {
    seen_.insert(key);
    return Reader(j_.at(key), path_ + key + ".");
  }

  void finish() const {
    for (const auto& [k, v] : j_.items()) {
      if (!seen_.contains(k)) throw ConfigError("unknown config key " + path_ + k);
    }
  }

 private:
  std::string where() const { return path_.empty() ? "root" : path_.substr(0, path_.size() - 1); }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

DataFormat parse_data_format(std::string_view s) {
  if (s == "tsv") return DataFormat::kTsv;
  if (s == "dir" || s == "dir-per-class") return DataFormat::kDirPerClass;
  if (s == "synthetic") return DataFormat::kSynthetic;
  throw ConfigError("unknown data format '" + std::string(s) + "' (tsv|dir|synthetic)");
}

std::string to_string(DataFormat f) {
  switch (f) {
    case DataFormat::kTsv:
      return "tsv";
    case DataFormat::kDirPerClass:
      return "dir";
    case DataFormat::kSynthetic:
      return "synthetic";
  }
  return "?";
}

SelectionMethod parse_selection(std::string_view s) {
  if (s == "none") return SelectionMethod::kNone;
  if (s == "anova-f") return SelectionMethod::kAnovaF;
  if (s == "pca") return SelectionMethod::kPca;
  throw ConfigError("unknown selection method '" + std::string(s) + "' (none|anova-f|pca)");
}

std::string to_string(SelectionMethod m) {
  switch (m) {
    case SelectionMethod::kNone:
      return "none";
    case SelectionMethod::kAnovaF:
      return "anova-f";
    case SelectionMethod::kPca:
      return "pca";
  }
  return "?";
}

StopwordMode parse_stop_mode(std::string_view s) {
  if (s == "df-ratio") return StopwordMode::kDfRatio;
  if (s == "list") return StopwordMode::kExplicitList;
  throw ConfigError("unknown stopword mode '" + std::string(s) + "' (df-ratio|list)");
}

UnicodeMode parse_unicode(std::string_view s) {
  if (s == "alnum") return UnicodeMode::kUnicodeAlphanumeric;
  if (s == "ascii") return UnicodeMode::kAsciiLetters;
  throw ConfigError("unknown tokenizer unicode mode '" + std::string(s) + "' (alnum|ascii)");
}

void read_train_config(Reader r, TrainConfig& c, std::size_t* inference_epochs) {
  r.get_enum("model", c.model, parse_embedding_model);
  r.get("dim", c.dim);
  r.get("window", c.window);
  r.get("negatives", c.negatives);
  r.get("epochs", c.epochs);
  r.get("lr0", c.lr0);
  r.get("min_lr", c.min_lr);
  r.get("subsample", c.subsample_t);
  if (inference_epochs) r.get("inference_epochs", *inference_epochs);
  r.finish();
}

json train_config_json(const TrainConfig& c) {
  return {{"model", std::string(to_string(c.model))},
          {"dim", c.dim},
          {"window", c.window},
          {"negatives", c.negatives},
          {"epochs", c.epochs},
          {"lr0", c.lr0},
          {"min_lr", c.min_lr},
          {"subsample", c.subsample_t}};
}

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double lap() {
    const auto now = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(now - start_).count();
    start_ = now;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

/// Runs `fn`, prefixing any library error with the stage name.
template <typename F>
auto stage(const char* name, F&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.kind(), std::string("stage '") + name + "': " + e.what());
  }
}

Corpus as_unlabeled(const Corpus& c) {
  Corpus out;
  for (const auto& d : c) out.add("", d.tokens);
  return out;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  ExperimentConfig c;
  Reader root(j, "");
  if (root.has("data")) {
    auto r = root.child("data");
    r.get_enum("format", c.data.format, parse_data_format);
    r.get("train", c.data.train);
    r.get("test", c.data.test);
    r.get("unlabeled", c.data.unlabeled);
    r.get("test_fraction", c.data.test_fraction);
    r.get("positive_label", c.data.positive_label);
    if (r.has("synthetic")) {
      auto s = r.child("synthetic");
      auto& y = c.data.synthetic;
      s.get("docs", y.docs);
      s.get("vocab", y.vocab);
      s.get("function_words", y.function_words);
      s.get("polar_words", y.polar_words);
      s.get("topics", y.topics);
      s.get("min_length", y.min_length);
      s.get("max_length", y.max_length);
      s.get("function_rate", y.function_rate);
      s.get("polar_rate", y.polar_rate);
      s.get("polar_purity", y.polar_purity);
      s.get("off_topic_rate", y.off_topic_rate);
      s.get("unlabeled", y.unlabeled);
      s.get("seed", y.seed);
      s.finish();
    }
    r.finish();
  }
  if (root.has("tokenizer")) {
    auto r = root.child("tokenizer");
    r.get("lowercase", c.tokenizer.lowercase);
    r.get("strip_punctuation", c.tokenizer.strip_punctuation);
    r.get_enum("unicode", c.tokenizer.unicode_mode, parse_unicode);
    r.finish();
  }
  if (root.has("vocab")) {
    auto r = root.child("vocab");
    r.get("min_count", c.min_count);
    r.finish();
  }
  if (root.has("embeddings")) read_train_config(root.child("embeddings"), c.embeddings, nullptr);
  if (root.has("paragraph")) read_train_config(root.child("paragraph"), c.paragraph, &c.inference_epochs);
  if (root.has("composition")) {
    auto r = root.child("composition");
    r.get_enum("scheme", c.composition.variant, parse_composition_variant);
    r.get("delta", c.composition.delta);
    r.get("average", c.composition.average);
    r.get_enum("stopword_mode", c.composition.stopword_mode, parse_stop_mode);
    r.get("stopword_df_ratio", c.composition.stopword_df_ratio);
    r.get("stopword_list", c.composition.stopword_list);
    r.finish();
  }
  if (root.has("parts")) {
    auto r = root.child("parts");
    r.get("wavg", c.parts.wavg);
    r.get("pv", c.parts.pv);
    r.get("tfidf", c.parts.tfidf);
    r.get("tfidf_l2", c.parts.tfidf_l2);
    r.get("l2_normalize_dense", c.parts.l2_normalize_dense);
    r.get("standardize_dense", c.parts.standardize_dense);
    r.finish();
  }
  if (root.has("selection")) {
    auto r = root.child("selection");
    r.get_enum("method", c.selection.method, parse_selection);
    r.get("k", c.selection.k);
    r.get("n", c.selection.n);
    r.finish();
  }
  if (root.has("svm")) {
    auto r = root.child("svm");
    r.get("lambda", c.svm.lambda);
    r.get("epochs", c.svm.epochs);
    r.finish();
  }
  if (root.has("rnnlm")) {
    auto r = root.child("rnnlm");
    auto& q = c.rnnlm.config;
    r.get("enabled", c.rnnlm.enabled);
    r.get("hidden", q.hidden);
    r.get("bptt", q.bptt);
    r.get("epochs", q.epochs);
    r.get("lr", q.lr);
    r.get("max_vocab", q.max_vocab);
    r.get("validation_fraction", q.validation_fraction);
    r.finish();
  }
  if (root.has("ensemble")) {
    auto r = root.child("ensemble");
    r.get("alpha", c.ensemble.alpha);
    r.get_enum("mode", c.ensemble.mode, parse_vote_mode);
    r.get_enum("tie_break", c.ensemble.tie_break, parse_tie_break);
    r.finish();
  }
  root.get("seed", c.seed);
  root.get("threads", c.threads);
  root.get("out", c.out);
  root.finish();
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  try {
    return from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
}

json ExperimentConfig::to_json() const {
  const auto& y = data.synthetic;
  json paragraph_json = train_config_json(paragraph);
  paragraph_json["inference_epochs"] = inference_epochs;
  return {
      {"data",
       {{"format", to_string(data.format)},
        {"train", data.train},
        {"test", data.test},
        {"unlabeled", data.unlabeled},
        {"test_fraction", data.test_fraction},
        {"positive_label", data.positive_label},
        {"synthetic",
         {{"docs", y.docs},
          {"vocab", y.vocab},
          {"function_words", y.function_words},
          {"polar_words", y.polar_words},
          {"topics", y.topics},
          {"min_length", y.min_length},
          {"max_length", y.max_length},
          {"function_rate", y.function_rate},
          {"polar_rate", y.polar_rate},
          {"polar_purity", y.polar_purity},
          {"off_topic_rate", y.off_topic_rate},
          {"unlabeled", y.unlabeled},
          {"seed", y.seed}}}}},
      {"tokenizer",
       {{"lowercase", tokenizer.lowercase},
        {"strip_punctuation", tokenizer.strip_punctuation},
        {"unicode", tokenizer.unicode_mode == UnicodeMode::kAsciiLetters ? "ascii" : "alnum"}}},
      {"vocab", {{"min_count", min_count}}},
      {"embeddings", train_config_json(embeddings)},
      {"paragraph", paragraph_json},
      {"composition",
       {{"scheme", std::string(compvec::to_string(composition.variant))},
        {"delta", composition.delta},
        {"average", composition.average},
        {"stopword_mode", composition.stopword_mode == StopwordMode::kDfRatio ? "df-ratio" : "list"},
        {"stopword_df_ratio", composition.stopword_df_ratio},
        {"stopword_list", composition.stopword_list}}},
      {"parts",
       {{"wavg", parts.wavg},
        {"pv", parts.pv},
        {"tfidf", parts.tfidf},
        {"tfidf_l2", parts.tfidf_l2},
        {"l2_normalize_dense", parts.l2_normalize_dense},
        {"standardize_dense", parts.standardize_dense}}},
      {"selection", {{"method", to_string(selection.method)}, {"k", selection.k}, {"n", selection.n}}},
      {"svm", {{"lambda", svm.lambda}, {"epochs", svm.epochs}}},
      {"rnnlm",
       {{"enabled", rnnlm.enabled},
        {"hidden", rnnlm.config.hidden},
        {"bptt", rnnlm.config.bptt},
        {"epochs", rnnlm.config.epochs},
        {"lr", rnnlm.config.lr},
        {"max_vocab", rnnlm.config.max_vocab},
        {"validation_fraction", rnnlm.config.validation_fraction}}},
      {"ensemble",
       {{"alpha", ensemble.alpha},
        {"mode", std::string(compvec::to_string(ensemble.mode))},
        {"tie_break", std::string(compvec::to_string(ensemble.tie_break))}}},
      {"seed", seed},
      {"threads", threads},
      {"out", out},
  };
}

void ExperimentConfig::validate() const {
  namespace fs = std::filesystem;
  const auto must_exist = [](const std::string& p, const char* what) {
    if (!p.empty() && !fs::exists(p)) throw ConfigError(std::string(what) + " path does not exist: " + p);
  };
  if (data.format != DataFormat::kSynthetic) {
    if (data.train.empty()) throw ConfigError("data.train is required for format " + to_string(data.format));
    must_exist(data.train, "data.train");
    must_exist(data.test, "data.test");
  }
  must_exist(data.unlabeled, "data.unlabeled");
  if (data.test.empty() && !(data.test_fraction > 0.0 && data.test_fraction < 1.0)) {
    throw ConfigError("data.test_fraction must be in (0, 1)");
  }
  if (data.positive_label.empty()) throw ConfigError("data.positive_label must not be empty");
  if (min_count < 1) throw ConfigError("vocab.min_count must be >= 1");
  if (!parts.wavg && !parts.pv && !parts.tfidf) throw ConfigError("at least one composite part must be enabled");
  if (parts.wavg) embeddings.validate();
  if (parts.pv) {
    paragraph.validate();
    if (paragraph.model != EmbeddingModel::kPvDbow && paragraph.model != EmbeddingModel::kPvDm) {
      throw ConfigError("paragraph.model must be pv-dbow or pv-dm");
    }
  }
  if (parts.wavg && embeddings.model != EmbeddingModel::kSkipGram && embeddings.model != EmbeddingModel::kCbow) {
    throw ConfigError("embeddings.model must be skipgram or cbow");
  }
  if (composition.variant == CompositionVariant::kStopwordStep) {
    if (composition.stopword_mode == StopwordMode::kExplicitList) {
      if (composition.stopword_list.empty()) throw ConfigError("composition.stopword_list is required in list mode");
      must_exist(composition.stopword_list, "composition.stopword_list");
    } else if (!(composition.stopword_df_ratio > 0.0 && composition.stopword_df_ratio <= 1.0)) {
      throw ConfigError("composition.stopword_df_ratio must be in (0, 1]");
    }
  }
  if (!(composition.delta >= 0.0)) throw ConfigError("composition.delta must be >= 0");
  if (selection.method == SelectionMethod::kAnovaF && selection.k < 1) throw RangeError("selection.k must be >= 1");
  if (selection.method == SelectionMethod::kPca && selection.n < 1) throw RangeError("selection.n must be >= 1");
  if (!(svm.lambda > 0.0)) throw ConfigError("svm.lambda must be positive");
  if (svm.epochs < 1) throw ConfigError("svm.epochs must be >= 1");
  if (rnnlm.enabled) rnnlm.config.validate();
  ensemble.validate();
  if (threads < 1) throw ConfigError("threads must be >= 1");
}

CompositionScheme ExperimentConfig::make_scheme() const {
  switch (composition.variant) {
    case CompositionVariant::kSum:
      return CompositionScheme::sum();
    case CompositionVariant::kMean:
      return CompositionScheme::mean();
    case CompositionVariant::kMultiplicative:
      return CompositionScheme::multiplicative();
    case CompositionVariant::kGradedIdf:
      return CompositionScheme::graded_idf(composition.delta, composition.average);
    case CompositionVariant::kStopwordStep: {
      StopwordPolicy p;
      p.mode = composition.stopword_mode;
      p.df_ratio_threshold = composition.stopword_df_ratio;
      if (p.mode == StopwordMode::kExplicitList) {
        std::ifstream in(composition.stopword_list);
        if (!in) throw ConfigError("cannot open stopword list " + composition.stopword_list);
        std::set<std::string> words;
        std::string w;
        while (in >> w) words.insert(w);
        p.list = std::move(words);
      }
      return CompositionScheme::stopword_step(std::move(p), composition.average);
    }
  }
  throw ConfigError("unknown composition scheme");
}

std::map<std::string, json> flatten_config(const json& j) {
  std::map<std::string, json> out;
  const auto walk = [&](const auto& self, const json& node, const std::string& prefix) -> void {
    for (const auto& [k, v] : node.items()) {
      const auto key = prefix.empty() ? k : prefix + "." + k;
      if (v.is_object()) {
        self(self, v, key);
      } else {
        out.emplace(key, v);
      }
    }
  };
  walk(walk, j, "");
  return out;
}

void override_config(json& j, const std::string& dotted_key, const std::string& value) {
  json* node = &j;
  std::string rest = dotted_key;
  for (;;) {
    const auto dot = rest.find('.');
    const auto part = rest.substr(0, dot);
    if (!node->is_object()) throw ConfigError("config key " + dotted_key + " does not name a field");
    const auto existing = node->find(part);
    if (existing == node->end()) throw ConfigError("unknown config key " + dotted_key);
    if (dot == std::string::npos) {
      if (existing->is_object()) throw ConfigError("config key " + dotted_key + " names a section, not a field");
      json parsed = json::parse(value, nullptr, false);
      if (parsed.is_discarded()) parsed = value;
      // A string field keeps a numeric-looking value as text.
      if (existing->is_string() && !parsed.is_string()) parsed = value;
      *existing = std::move(parsed);
      return;
    }
    node = &*existing;
    rest = rest.substr(dot + 1);
  }
}

json MetricsReport::to_json(bool include_timings) const {
  json per;
  for (const auto& [label, m] : per_class) {
    per[label] = {{"precision", m.precision}, {"recall", m.recall}, {"support", m.support}};
  }
  json out = {
      {"accuracy", accuracy},
      {"classes", classes},
      {"confusion", confusion},
      {"per_class", per},
      {"test_size", test_size},
      {"zero_vector_docs", zero_vector_docs},
      {"feature_dim", feature_dim},
      {"svm_accuracy", svm_accuracy},
      {"rnnlm_accuracy", rnnlm_accuracy ? json(*rnnlm_accuracy) : json(nullptr)},
      {"ensemble_accuracy", ensemble_accuracy ? json(*ensemble_accuracy) : json(nullptr)},
      {"config", config},
  };
  if (include_timings) {
    json t = json::array();
    for (const auto& [name, s] : timings) t.push_back({{"stage", name}, {"seconds", s}});
    out["timings"] = t;
  }
  return out;
}

MetricsReport score_predictions(std::span<const int> truth, std::span<const int> predicted,
                                const std::string& negative_label, const std::string& positive_label) {
  if (truth.size() != predicted.size()) throw DataError("truth and prediction counts differ");
  MetricsReport r;
  r.classes = {negative_label, positive_label};
  r.confusion.assign(2, std::vector<std::size_t>(2, 0));
  std::size_t correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const std::size_t t = truth[i] > 0;
    const std::size_t p = predicted[i] > 0;
    ++r.confusion[t][p];
    correct += t == p;
  }
  r.test_size = truth.size();
  r.accuracy = truth.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(truth.size());
  for (std::size_t c = 0; c < 2; ++c) {
    const double tp = static_cast<double>(r.confusion[c][c]);
    const double predicted_c = static_cast<double>(r.confusion[0][c] + r.confusion[1][c]);
    const double actual_c = static_cast<double>(r.confusion[c][0] + r.confusion[c][1]);
    r.per_class[r.classes[c]] = {predicted_c > 0 ? tp / predicted_c : 0.0, actual_c > 0 ? tp / actual_c : 0.0,
                                 r.confusion[c][0] + r.confusion[c][1]};
  }
  return r;
}

PreparedData prepare_data(const ExperimentConfig& cfg) {
  cfg.validate();
  PreparedData d;
  Stopwatch sw;

  stage("load", [&] {
    Corpus all;
    if (cfg.data.format == DataFormat::kSynthetic) {
      all = make_sentiment_corpus(cfg.data.synthetic);
    } else {
      const auto fmt = cfg.data.format == DataFormat::kTsv ? CorpusFormat::kTsv : CorpusFormat::kDirPerClass;
      all = load_corpus(cfg.data.train, fmt, cfg.tokenizer);
      if (!cfg.data.test.empty()) d.test = load_corpus(cfg.data.test, fmt, cfg.tokenizer).labeled_only();
      if (!cfg.data.unlabeled.empty()) d.unlabeled = as_unlabeled(load_corpus(cfg.data.unlabeled, fmt, cfg.tokenizer));
    }
    Corpus labeled = all.labeled_only();
    Corpus extra;
    for (const auto& doc : all) {
      if (!doc.labeled()) extra.add("", doc.tokens);
    }
    extra.append(d.unlabeled);
    d.unlabeled = std::move(extra);
    if (cfg.data.test.empty()) {
      auto [train, test] = split(labeled, 1.0 - cfg.data.test_fraction, Rng::derive(cfg.seed, 1));
      d.train = std::move(train);
      d.test = std::move(test);
    } else {
      d.train = std::move(labeled);
    }
    const auto& labels = d.train.labelset();
    if (labels.size() != 2 || !labels.contains(cfg.data.positive_label)) {
      throw DataError("training data must have exactly two labels including '" + cfg.data.positive_label + "'");
    }
    for (const auto& l : labels) {
      if (l != cfg.data.positive_label) d.negative_label = l;
    }
    for (const auto& l : d.test.labelset()) {
      if (!labels.contains(l)) throw DataError("test label '" + l + "' does not occur in training data");
    }
    if (d.test.empty()) throw DataError("test set is empty");
  });
  d.timings.emplace_back("load", sw.lap());

  Corpus unsup = d.train;
  unsup.append(d.unlabeled);
  d.vocab = stage("vocab", [&] { return build_vocab(unsup, cfg.min_count); });
  d.timings.emplace_back("vocab", sw.lap());

  if (cfg.parts.wavg) {
    d.embeddings = stage("embeddings", [&] {
      TrainConfig tc = cfg.embeddings;
      tc.seed = Rng::derive(cfg.seed, 2);
      tc.workers = cfg.threads;
      return train_embeddings(unsup, d.vocab, tc);
    });
    d.timings.emplace_back("embeddings", sw.lap());
  }
  if (cfg.parts.pv) {
    d.paragraph = stage("paragraph-vectors", [&] {
      TrainConfig tc = cfg.paragraph;
      tc.seed = Rng::derive(cfg.seed, 3);
      tc.workers = cfg.threads;
      return train_paragraph_vectors(unsup, d.vocab, tc);
    });
    d.train_pv.resize(d.train.size());
    for (std::size_t i = 0; i < d.train.size(); ++i) {
      const auto row = d.paragraph->docs.row(i);
      d.train_pv[i].assign(row.begin(), row.end());
    }
    d.timings.emplace_back("paragraph-vectors", sw.lap());
    d.test_pv.resize(d.test.size());
    stage("infer", [&] {
      parallel_for(d.test.size(), cfg.threads, [&](std::size_t i) {
        try {
          d.test_pv[i] = infer_paragraph_vector(*d.paragraph, d.test[static_cast<DocId>(i)], cfg.inference_epochs,
                                                Rng::derive(cfg.seed, 1000 + i));
        } catch (const Error& e) {
          throw Error(e.kind(), "test document " + std::to_string(i) + ": " + e.what());
        }
      });
    });
    d.timings.emplace_back("infer", sw.lap());
  }
  return d;
}

namespace {

struct Features {
  std::vector<SparseVector> rows;
  std::size_t dim = 0;
  std::size_t zero_vectors = 0;
};

Features featurize(const ExperimentConfig& cfg, const PreparedData& d, const Corpus& docs,
                   const std::vector<std::vector<double>>& pv, const CompositionScheme& scheme,
                   CompositeLayout& layout) {
  if (cfg.parts.wavg && !d.embeddings) throw ConfigError("prepared data has no word embeddings");
  if (cfg.parts.pv && pv.size() != docs.size()) throw ConfigError("prepared data has no paragraph vectors");
  Features f;
  f.rows.resize(docs.size());
  std::vector<CompositeVector> composites(docs.size());
  std::vector<char> zero(docs.size(), 0);
  const CompositeOptions opts{cfg.parts.l2_normalize_dense};
  parallel_for(docs.size(), cfg.threads, [&](std::size_t i) {
    const auto& doc = docs[static_cast<DocId>(i)];
    std::optional<DocumentVector> wavg;
    std::optional<std::vector<double>> para;
    std::optional<SparseVector> tfidf;
    if (cfg.parts.wavg) {
      wavg = compose(doc, *d.embeddings, d.vocab, scheme);
      zero[i] = wavg->contributing == 0;
    }
    if (cfg.parts.pv) para = pv[i];
    if (cfg.parts.tfidf) tfidf = tfidf_vectorize(d.vocab, doc, cfg.parts.tfidf_l2);
    composites[i] = composite_vector(wavg, para, tfidf, opts);
  });
  if (!docs.empty() && layout.parts.empty()) layout = CompositeLayout::of(composites.front());
  for (std::size_t i = 0; i < docs.size(); ++i) {
    layout.check(composites[i]);
    f.rows[i] = composites[i].flatten();
    f.zero_vectors += static_cast<std::size_t>(zero[i]);
  }
  f.dim = layout.total_dim();
  return f;
}

std::size_t dense_width(const CompositeLayout& layout) {
  std::size_t w = 0;
  for (const auto& [name, d] : layout.parts) {
    if (name != "tfidf") w += d;
  }
  return w;
}

void standardize_dense(Features& fit, Features& other, std::size_t width) {
  if (width == 0 || fit.rows.empty()) return;
  const auto sc = ColumnScaler::fit(fit.rows, width);
  for (auto& r : fit.rows) r = sc.transform(r);
  for (auto& r : other.rows) r = sc.transform(r);
}

std::vector<std::string> labels_of(const Corpus& c) {
  std::vector<std::string> out;
  out.reserve(c.size());
  for (const auto& d : c) out.push_back(d.label);
  return out;
}

}  // namespace

ExperimentOutputs evaluate_pipeline(const ExperimentConfig& cfg, const PreparedData& d,
                                    const std::filesystem::path& out_dir) {
  cfg.validate();
  ExperimentOutputs out;
  auto timings = d.timings;
  Stopwatch sw;
  const auto& positive = cfg.data.positive_label;

  CompositeLayout layout;
  const auto scheme = stage("compose", [&] { return cfg.make_scheme(); });
  Features train_f = stage("compose", [&] { return featurize(cfg, d, d.train, d.train_pv, scheme, layout); });
  Features test_f = stage("compose", [&] { return featurize(cfg, d, d.test, d.test_pv, scheme, layout); });
  if (cfg.parts.standardize_dense) standardize_dense(train_f, test_f, dense_width(layout));
  timings.emplace_back("compose", sw.lap());

  const auto train_labels = labels_of(d.train);
  FeatureMatrix x_train = FeatureMatrix::sparse(std::move(train_f.rows), train_f.dim, train_labels);
  FeatureMatrix x_test = FeatureMatrix::sparse(std::move(test_f.rows), test_f.dim, labels_of(d.test));

  std::optional<SelectionModel> selection;
  if (cfg.selection.method != SelectionMethod::kNone) {
    selection = stage("select", [&] {
      if (cfg.selection.method == SelectionMethod::kAnovaF) {
        return select_top_k(anova_f_scores(x_train, train_labels), cfg.selection.k);
      }
      return pca_fit(x_train, cfg.selection.n);
    });
    x_train = apply(*selection, x_train);
    x_test = apply(*selection, x_test);
    timings.emplace_back("select", sw.lap());
  }

  const auto y_train = binary_targets(train_labels, positive);
  for (const auto& doc : d.test) out.truth.push_back(doc.label == positive ? 1 : -1);
  SvmParams sp = cfg.svm;
  sp.seed = Rng::derive(cfg.seed, 4);
  const LinearModel svm = stage("train-svm", [&] { return svm_train(x_train, y_train, sp); });
  timings.emplace_back("train-svm", sw.lap());

  const auto margins = svm_margins(svm, x_test);
  for (const double m : margins) {
    out.svm_predictions.push_back(m >= 0.0 ? 1 : -1);
    out.svm_probs.push_back(svm_proba(svm, m));
  }
  std::vector<int> final_pred = out.svm_predictions;
  const auto svm_scores = score_predictions(out.truth, out.svm_predictions, d.negative_label, positive);
  timings.emplace_back("predict", sw.lap());

  std::optional<RnnLmModel> rnn;
  std::optional<double> rnn_accuracy;
  std::optional<double> ens_accuracy;
  if (cfg.rnnlm.enabled) {
    rnn = stage("train-rnnlm", [&] {
      RnnLmConfig rc = cfg.rnnlm.config;
      rc.seed = Rng::derive(cfg.seed, 5);
      return rnnlm_train_classes(d.train, d.vocab, rc, cfg.threads);
    });
    timings.emplace_back("train-rnnlm", sw.lap());
    std::size_t pos_class = 0;
    while (rnn->classes[pos_class] != positive) ++pos_class;
    out.rnn_probs.resize(d.test.size());
    parallel_for(d.test.size(), cfg.threads, [&](std::size_t i) {
      // Extreme likelihood ratios round to exactly 0 or 1; keep them inside (0, 1).
      out.rnn_probs[i] = std::clamp(rnnlm_classify(*rnn, d.test[static_cast<DocId>(i)])[pos_class], 1e-15, 1.0 - 1e-15);
    });
    std::vector<int> rnn_pred;
    for (const double p : out.rnn_probs) rnn_pred.push_back(p >= 0.5 ? 1 : -1);
    rnn_accuracy = score_predictions(out.truth, rnn_pred, d.negative_label, positive).accuracy;
    const auto ens = stage("ensemble", [&] { return ensemble_eval(out.svm_probs, out.rnn_probs, out.truth, cfg.ensemble); });
    ens_accuracy = ens.accuracy;
    for (std::size_t i = 0; i < ens.decisions.size(); ++i) final_pred[i] = ens.decisions[i].positive ? 1 : -1;
    timings.emplace_back("rnnlm-ensemble", sw.lap());
  }

  out.report = score_predictions(out.truth, final_pred, d.negative_label, positive);
  out.report.svm_accuracy = svm_scores.accuracy;
  out.report.rnnlm_accuracy = rnn_accuracy;
  out.report.ensemble_accuracy = ens_accuracy;
  out.report.zero_vector_docs = train_f.zero_vectors + test_f.zero_vectors;
  out.report.feature_dim = x_train.cols();
  auto echo = cfg.to_json();
  echo.erase("out");
  out.report.config = std::move(echo);

  if (!out_dir.empty()) {
    stage("write", [&] {
      namespace fs = std::filesystem;
      fs::create_directories(out_dir);
      d.vocab.save(out_dir / "vocab.tsv");
      if (d.embeddings) save_embeddings(*d.embeddings, out_dir / "embeddings.w2v");
      if (d.paragraph) save_paragraph_vectors(*d.paragraph, out_dir / "paragraph");
      if (selection) selection->save(out_dir / "selection.model");
      svm.save(out_dir / "svm.model");
      std::vector<std::uint64_t> ids;
      for (const auto& doc : d.test) ids.push_back(doc.id);
      write_probabilities(out_dir / "svm_probs.tsv", ids, out.svm_probs);
      if (rnn) {
        rnn->save(out_dir / "rnnlm.model");
        write_probabilities(out_dir / "rnn_probs.tsv", ids, out.rnn_probs);
      }
      std::ofstream pred(out_dir / "predictions.tsv");
      for (std::size_t i = 0; i < ids.size(); ++i) {
        pred << ids[i] << '\t' << d.test[static_cast<DocId>(i)].label << '\t'
             << (final_pred[i] > 0 ? positive : d.negative_label) << '\n';
      }
    });
    timings.emplace_back("write", sw.lap());
  }
  out.report.timings = std::move(timings);
  if (!out_dir.empty()) {
    std::ofstream rep(out_dir / "report.json");
    rep << out.report.to_json().dump(2) << '\n';
    if (!rep) throw DataError("failed writing " + (out_dir / "report.json").string());
  }
  return out;
}

MetricsReport run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out_dir) {
  const auto data = prepare_data(cfg);
  return evaluate_pipeline(cfg, data, out_dir).report;
}

CompareAxis parse_compare_axis(std::string_view s) {
  if (s == "skipgram-vs-cbow") return CompareAxis::kSkipgramVsCbow;
  if (s == "scheme-sweep") return CompareAxis::kSchemeSweep;
  if (s == "delta-sweep") return CompareAxis::kDeltaSweep;
  if (s == "alpha-sweep") return CompareAxis::kAlphaSweep;
  throw ConfigError("unknown comparison axis '" + std::string(s) +
                    "' (skipgram-vs-cbow|scheme-sweep|delta-sweep|alpha-sweep)");
}

namespace {

double parse_number(const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::logic_error&) {
  }
  throw ConfigError("expected a number, got '" + s + "'");
}

}  // namespace

std::vector<CompareRow> compare_models(const ExperimentConfig& cfg, CompareAxis axis,
                                       const std::vector<std::string>& values) {
  std::vector<std::string> grid = values;
  if (grid.empty()) {
    switch (axis) {
      case CompareAxis::kSkipgramVsCbow:
        grid = {"skipgram", "cbow"};
        break;
      case CompareAxis::kSchemeSweep:
        grid = {"multiplicative", "mean", "graded-idf"};
        break;
      case CompareAxis::kDeltaSweep:
        grid = {"2", "2.5", "2.8", "3", "4", "5"};
        break;
      case CompareAxis::kAlphaSweep:
        grid = {"0", "0.25", "0.5", "0.75", "1"};
        break;
    }
  }
  std::vector<CompareRow> rows;
  if (axis == CompareAxis::kSkipgramVsCbow) {
    for (const auto& m : grid) {
      ExperimentConfig c = cfg;
      c.embeddings.model = parse_embedding_model(m);
      rows.push_back({m, run_experiment(c).accuracy});
    }
    return rows;
  }
  const auto data = prepare_data(cfg);
  if (axis == CompareAxis::kAlphaSweep) {
    if (!cfg.rnnlm.enabled) throw ConfigError("alpha-sweep needs rnnlm.enabled");
    const auto base = evaluate_pipeline(cfg, data);
    for (const auto& a : grid) {
      EnsembleConfig e = cfg.ensemble;
      e.alpha = parse_number(a);
      rows.push_back({a, ensemble_eval(base.svm_probs, base.rnn_probs, base.truth, e).accuracy});
    }
    return rows;
  }
  for (const auto& v : grid) {
    ExperimentConfig c = cfg;
    if (axis == CompareAxis::kSchemeSweep) {
      c.composition.variant = parse_composition_variant(v);
    } else {
      c.composition.variant = CompositionVariant::kGradedIdf;
      c.composition.delta = parse_number(v);
    }
    rows.push_back({v, evaluate_pipeline(c, data).report.accuracy});
  }
  return rows;
}

std::string compare_table_tsv(CompareAxis axis, const std::vector<CompareRow>& rows) {
  const char* head = "model";
  switch (axis) {
    case CompareAxis::kSkipgramVsCbow:
      head = "model";
      break;
    case CompareAxis::kSchemeSweep:
      head = "scheme";
      break;
    case CompareAxis::kDeltaSweep:
      head = "delta";
      break;
    case CompareAxis::kAlphaSweep:
      head = "alpha";
      break;
  }
  std::ostringstream out;
  out << head << "\taccuracy\n";
  char buf[32];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.6f", r.accuracy);
    out << r.setting << '\t' << buf << '\n';
  }
  return out.str();
}

}  // namespace compvec
