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

// compvec command-line front end.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "compvec/classify.hpp"
#include "compvec/compose.hpp"
#include "compvec/corpus.hpp"
#include "compvec/embeddings.hpp"
#include "compvec/ensemble.hpp"
#include "compvec/errors.hpp"
#include "compvec/experiment.hpp"
#include "compvec/features.hpp"
#include "compvec/rng.hpp"
#include "compvec/rnnlm.hpp"
#include "compvec/stats.hpp"
#include "compvec/synth.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace compvec;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitDivergence = 4;

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::kConfig:
      return kExitConfig;
    case ErrorKind::kData:
      return kExitData;
    case ErrorKind::kDivergence:
      return kExitDivergence;
  }
  return 1;
}

// Config file plus `--dotted.key value` overrides taken from the unparsed
// arguments of a subcommand.
struct ConfigSource {
  std::string path;
  std::vector<std::string> extras;

  ExperimentConfig load() const {
    ExperimentConfig base = path.empty() ? ExperimentConfig{} : ExperimentConfig::load(path);
    if (extras.empty()) return base;
    json j = base.to_json();
    for (std::size_t i = 0; i < extras.size(); ++i) {
      std::string arg = extras[i];
      if (arg.rfind("--", 0) != 0) throw ConfigError("unexpected argument '" + arg + "'");
      arg = arg.substr(2);
      std::string value;
      if (const auto eq = arg.find('='); eq != std::string::npos) {
        value = arg.substr(eq + 1);
        arg = arg.substr(0, eq);
      } else {
        if (i + 1 >= extras.size()) throw ConfigError("option --" + arg + " needs a value");
        value = extras[++i];
      }
      override_config(j, arg, value);
    }
    return ExperimentConfig::from_json(j);
  }
};

void add_config(CLI::App* cmd, ConfigSource& src) {
  cmd->add_option("--config", src.path, "JSON experiment config")->check(CLI::ExistingFile);
  cmd->allow_extras();
  cmd->footer("Any config field can be overridden with --<dotted.key> <value>, e.g. --svm.lambda 1e-3.");
}

Corpus read_corpus(const std::string& path, const ExperimentConfig& cfg) {
  return load_corpus(path, CorpusFormat::kTsv, cfg.tokenizer);
}

Corpus read_corpora(const std::vector<std::string>& paths, const ExperimentConfig& cfg) {
  Corpus all;
  for (const auto& p : paths) all.append(read_corpus(p, cfg));
  return all;
}

std::vector<std::uint64_t> row_ids(std::size_t n) {
  std::vector<std::uint64_t> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = i;
  return ids;
}

FeatureMatrix read_vectors(const std::string& path, std::size_t dim_hint) {
  auto rows = read_libsvm(path, dim_hint);
  if (rows.empty()) throw DataError(path + ": no vectors");
  const std::size_t dim = rows.front().vector.dim;
  std::vector<SparseVector> vs;
  std::vector<std::string> labels;
  for (auto& r : rows) {
    r.vector.dim = dim;
    vs.push_back(std::move(r.vector));
    labels.push_back(std::move(r.label));
  }
  return FeatureMatrix::sparse(std::move(vs), dim, std::move(labels));
}

void write_vectors(const std::string& path, const FeatureMatrix& x) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    SparseVector v;
    v.dim = x.cols();
    x.for_each_nonzero(i, [&](std::size_t j, double val) { v.entries.emplace_back(static_cast<std::uint32_t>(j), val); });
    write_libsvm(out, x.has_labels() ? x.labels()[i] : std::string{}, v);
  }
  if (!out) throw DataError("failed writing " + path);
}

void print_json(const json& j) { std::cout << j.dump(2) << '\n'; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"compvec: composite document vectors for text classification"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "compvec 1.0.0");

  // ingest
  ConfigSource ingest_cfg;
  std::string ingest_input, ingest_format = "tsv", ingest_out, ingest_test_out;
  auto* ingest = app.add_subcommand("ingest", "Tokenize a raw corpus into the token TSV format");
  ingest->add_option("--input", ingest_input, "tsv file or dir-per-class root")->required();
  ingest->add_option("--format", ingest_format, "tsv|dir")->check(CLI::IsMember({"tsv", "dir"}));
  ingest->add_option("--out", ingest_out, "output token TSV")->required();
  ingest->add_option("--test-out", ingest_test_out, "also split off a stratified test set (data.test_fraction)");
  add_config(ingest, ingest_cfg);

  // vocab
  ConfigSource vocab_cfg;
  std::vector<std::string> vocab_corpus;
  std::string vocab_out;
  auto* vocab = app.add_subcommand("vocab", "Build the vocabulary with document frequencies");
  vocab->add_option("--corpus", vocab_corpus, "token TSV (repeatable)")->required();
  vocab->add_option("--out", vocab_out)->required();
  add_config(vocab, vocab_cfg);

  // train-emb
  ConfigSource emb_cfg;
  std::vector<std::string> emb_corpus;
  std::string emb_vocab, emb_out;
  auto* emb = app.add_subcommand("train-emb", "Train skip-gram or CBOW word vectors");
  emb->add_option("--corpus", emb_corpus, "token TSV (repeatable)")->required();
  emb->add_option("--vocab", emb_vocab)->required()->check(CLI::ExistingFile);
  emb->add_option("--out", emb_out, "word2vec text file")->required();
  add_config(emb, emb_cfg);

  // train-pv
  ConfigSource pv_cfg;
  std::vector<std::string> pv_corpus;
  std::string pv_vocab, pv_out;
  auto* pv = app.add_subcommand("train-pv", "Train paragraph vectors (PV-DBOW or PV-DM)");
  pv->add_option("--corpus", pv_corpus, "token TSV (repeatable); row i is document i")->required();
  pv->add_option("--vocab", pv_vocab)->required()->check(CLI::ExistingFile);
  pv->add_option("--out", pv_out, "output directory")->required();
  add_config(pv, pv_cfg);

  // vectorize
  ConfigSource vec_cfg;
  std::string vec_corpus, vec_vocab, vec_emb, vec_pv, vec_out;
  bool vec_trained_pv = false;
  auto* vec = app.add_subcommand("vectorize", "Write composite document vectors (libsvm format)");
  vec->add_option("--corpus", vec_corpus)->required()->check(CLI::ExistingFile);
  vec->add_option("--vocab", vec_vocab)->required()->check(CLI::ExistingFile);
  vec->add_option("--embeddings", vec_emb, "needed when parts.wavg is on")->check(CLI::ExistingFile);
  vec->add_option("--paragraph", vec_pv, "needed when parts.pv is on")->check(CLI::ExistingDirectory);
  vec->add_flag("--trained-pv", vec_trained_pv, "corpus is the paragraph-vector training corpus; reuse its rows");
  vec->add_option("--out", vec_out)->required();
  add_config(vec, vec_cfg);

  // select
  ConfigSource sel_cfg;
  std::string sel_vectors, sel_fit, sel_model, sel_out;
  std::size_t sel_dim = 0;
  auto* sel = app.add_subcommand("select", "Fit (--fit) or apply (--model) ANOVA-F / PCA selection");
  sel->add_option("--vectors", sel_vectors)->required()->check(CLI::ExistingFile);
  auto* fit_opt = sel->add_option("--fit", sel_fit, "write a model fitted on --vectors (selection.method)");
  sel->add_option("--model", sel_model, "apply an existing model")->check(CLI::ExistingFile)->excludes(fit_opt);
  sel->add_option("--dim", sel_dim, "input width when the file does not reach it");
  sel->add_option("--out", sel_out, "transformed vectors")->required();
  add_config(sel, sel_cfg);

  // train-svm
  ConfigSource svm_cfg;
  std::string svm_vectors, svm_out;
  std::size_t svm_dim = 0, svm_standardize = 0;
  auto* svm = app.add_subcommand("train-svm", "Train the linear SVM");
  svm->add_option("--vectors", svm_vectors)->required()->check(CLI::ExistingFile);
  svm->add_option("--dim", svm_dim, "feature width when the file does not reach it");
  svm->add_option("--standardize-dense", svm_standardize,
                  "z-score the first N columns during training; the saved model takes raw vectors");
  svm->add_option("--out", svm_out)->required();
  add_config(svm, svm_cfg);

  // train-rnnlm
  ConfigSource rnn_cfg;
  std::string rnn_corpus, rnn_vocab, rnn_out;
  auto* rnn = app.add_subcommand("train-rnnlm", "Train one RNN language model per class");
  rnn->add_option("--corpus", rnn_corpus)->required()->check(CLI::ExistingFile);
  rnn->add_option("--vocab", rnn_vocab)->required()->check(CLI::ExistingFile);
  rnn->add_option("--out", rnn_out)->required();
  add_config(rnn, rnn_cfg);

  // predict
  ConfigSource pred_cfg;
  std::string pred_svm, pred_vectors, pred_rnn, pred_corpus, pred_out;
  auto* pred = app.add_subcommand("predict", "Write p(positive) per document from an SVM or RNNLM model");
  auto* ps = pred->add_option("--svm", pred_svm, "SVM model (with --vectors)")->check(CLI::ExistingFile);
  auto* pr = pred->add_option("--rnnlm", pred_rnn, "RNNLM model (with --corpus)")->check(CLI::ExistingFile);
  ps->excludes(pr);
  pred->add_option("--vectors", pred_vectors)->check(CLI::ExistingFile);
  pred->add_option("--corpus", pred_corpus)->check(CLI::ExistingFile);
  pred->add_option("--out", pred_out, "`id<TAB>p` file")->required();
  add_config(pred, pred_cfg);

  // ensemble
  ConfigSource ens_cfg;
  std::string ens_svm, ens_rnn, ens_out;
  auto* ens = app.add_subcommand("ensemble", "Combine SVM and RNNLM probabilities (ensemble.*)");
  ens->add_option("--svm-probs", ens_svm)->required()->check(CLI::ExistingFile);
  ens->add_option("--rnn-probs", ens_rnn)->required()->check(CLI::ExistingFile);
  ens->add_option("--out", ens_out, "`id<TAB>p<TAB>decision` file")->required();
  add_config(ens, ens_cfg);

  // eval
  ConfigSource eval_cfg;
  std::string eval_pred, eval_corpus, eval_out;
  auto* ev = app.add_subcommand("eval", "Score predictions against a labeled corpus");
  ev->add_option("--predictions", eval_pred, "probability or decision file")->required()->check(CLI::ExistingFile);
  ev->add_option("--corpus", eval_corpus, "labeled token TSV; row i is document i")->required()->check(CLI::ExistingFile);
  ev->add_option("--out", eval_out, "also write the metrics JSON here");
  add_config(ev, eval_cfg);

  // experiment
  ConfigSource exp_cfg;
  std::string exp_out;
  auto* exp = app.add_subcommand("experiment", "Run the full pipeline and write report.json");
  exp->add_option("--out", exp_out, "output directory (default: config `out`)");
  add_config(exp, exp_cfg);

  // compare
  ConfigSource cmp_cfg;
  std::string cmp_axis, cmp_out;
  std::vector<std::string> cmp_values;
  auto* cmp = app.add_subcommand("compare", "Vary one axis and print an accuracy table");
  cmp->add_option("--axis", cmp_axis, "skipgram-vs-cbow|scheme-sweep|delta-sweep|alpha-sweep")->required();
  cmp->add_option("--values", cmp_values, "grid (default: the reference grid for the axis)");
  cmp->add_option("--out", cmp_out, "also write the table here");
  add_config(cmp, cmp_cfg);

  // gen-synth
  ConfigSource gen_cfg;
  std::string gen_kind = "sentiment", gen_out;
  GrammarSynthConfig grammar;
  auto* gen = app.add_subcommand("gen-synth", "Generate a synthetic labeled corpus (tsv)");
  gen->add_option("--kind", gen_kind, "sentiment (data.synthetic.*) or grammar")
      ->check(CLI::IsMember({"sentiment", "grammar"}));
  gen->add_option("--grammar-docs", grammar.docs);
  gen->add_option("--grammar-vocab", grammar.vocab);
  gen->add_option("--grammar-seed", grammar.seed);
  gen->add_option("--out", gen_out)->required();
  add_config(gen, gen_cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    for (auto* sub : app.get_subcommands()) {
      const auto extras = sub->remaining();
      if (sub == ingest) ingest_cfg.extras = extras;
      if (sub == vocab) vocab_cfg.extras = extras;
      if (sub == emb) emb_cfg.extras = extras;
      if (sub == pv) pv_cfg.extras = extras;
      if (sub == vec) vec_cfg.extras = extras;
      if (sub == sel) sel_cfg.extras = extras;
      if (sub == svm) svm_cfg.extras = extras;
      if (sub == rnn) rnn_cfg.extras = extras;
      if (sub == pred) pred_cfg.extras = extras;
      if (sub == ens) ens_cfg.extras = extras;
      if (sub == ev) eval_cfg.extras = extras;
      if (sub == exp) exp_cfg.extras = extras;
      if (sub == cmp) cmp_cfg.extras = extras;
      if (sub == gen) gen_cfg.extras = extras;
    }

    if (*ingest) {
      const auto cfg = ingest_cfg.load();
      const auto fmt = parse_corpus_format(ingest_format);
      Corpus all = load_corpus(ingest_input, fmt, cfg.tokenizer);
      if (ingest_test_out.empty()) {
        save_corpus_tsv(all, ingest_out);
        std::fprintf(stderr, "%zu documents\n", all.size());
      } else {
        auto [train, test] = split(all, 1.0 - cfg.data.test_fraction, Rng::derive(cfg.seed, 1));
        Corpus test_labeled = test.labeled_only();
        for (const auto& d : test) {
          if (!d.labeled()) train.add("", d.tokens);
        }
        save_corpus_tsv(train, ingest_out);
        save_corpus_tsv(test_labeled, ingest_test_out);
        std::fprintf(stderr, "%zu train, %zu test documents\n", train.size(), test_labeled.size());
      }
    } else if (*vocab) {
      const auto cfg = vocab_cfg.load();
      const auto v = build_vocab(read_corpora(vocab_corpus, cfg), cfg.min_count);
      v.save(vocab_out);
      std::fprintf(stderr, "%zu terms\n", v.size());
    } else if (*emb) {
      const auto cfg = emb_cfg.load();
      TrainConfig tc = cfg.embeddings;
      tc.seed = Rng::derive(cfg.seed, 2);
      tc.workers = cfg.threads;
      TrainReport rep;
      const auto m = train_embeddings(read_corpora(emb_corpus, cfg), Vocabulary::load(emb_vocab), tc, &rep);
      save_embeddings(m, emb_out);
      for (std::size_t e = 0; e < rep.epoch_loss.size(); ++e) {
        std::fprintf(stderr, "epoch %zu loss %.6f\n", e + 1, rep.epoch_loss[e]);
      }
    } else if (*pv) {
      const auto cfg = pv_cfg.load();
      TrainConfig tc = cfg.paragraph;
      tc.seed = Rng::derive(cfg.seed, 3);
      tc.workers = cfg.threads;
      TrainReport rep;
      const auto m = train_paragraph_vectors(read_corpora(pv_corpus, cfg), Vocabulary::load(pv_vocab), tc, &rep);
      save_paragraph_vectors(m, pv_out);
      for (std::size_t e = 0; e < rep.epoch_loss.size(); ++e) {
        std::fprintf(stderr, "epoch %zu loss %.6f\n", e + 1, rep.epoch_loss[e]);
      }
    } else if (*vec) {
      const auto cfg = vec_cfg.load();
      const Corpus docs = read_corpus(vec_corpus, cfg);
      const auto voc = Vocabulary::load(vec_vocab);
      std::optional<EmbeddingMatrix> words;
      std::optional<ParagraphVectors> para;
      if (cfg.parts.wavg) {
        if (vec_emb.empty()) throw ConfigError("parts.wavg needs --embeddings");
        words = load_embeddings(vec_emb);
      }
      if (cfg.parts.pv) {
        if (vec_pv.empty()) throw ConfigError("parts.pv needs --paragraph");
        para = load_paragraph_vectors(vec_pv);
        if (vec_trained_pv && para->docs.rows() != docs.size()) {
          throw DataError("--trained-pv: corpus has " + std::to_string(docs.size()) + " documents, model has " +
                          std::to_string(para->docs.rows()));
        }
      }
      const auto scheme = cfg.make_scheme();
      const CompositeOptions opts{cfg.parts.l2_normalize_dense};
      CompositeLayout layout;
      std::ofstream out(vec_out);
      if (!out) throw DataError("cannot write " + vec_out);
      std::size_t zero = 0;
      for (std::size_t i = 0; i < docs.size(); ++i) {
        const auto& doc = docs[static_cast<DocId>(i)];
        std::optional<DocumentVector> wavg;
        std::optional<std::vector<double>> pvec;
        std::optional<SparseVector> tfidf;
        try {
          if (words) {
            wavg = compose(doc, *words, voc, scheme);
            zero += wavg->contributing == 0;
          }
          if (para) {
            if (vec_trained_pv) {
              const auto row = para->docs.row(i);
              pvec.emplace(row.begin(), row.end());
            } else {
              pvec = infer_paragraph_vector(*para, doc, cfg.inference_epochs, Rng::derive(cfg.seed, 1000 + i));
            }
          }
        } catch (const Error& e) {
          throw Error(e.kind(), "document " + std::to_string(i) + ": " + e.what());
        }
        if (cfg.parts.tfidf) tfidf = tfidf_vectorize(voc, doc, cfg.parts.tfidf_l2);
        const auto cv = composite_vector(wavg, pvec, tfidf, opts);
        if (layout.parts.empty()) layout = CompositeLayout::of(cv);
        layout.check(cv);
        write_libsvm(out, doc.label, cv.flatten());
      }
      if (!out) throw DataError("failed writing " + vec_out);
      std::string parts;
      std::size_t dense = 0;
      for (const auto& [name, d] : layout.parts) {
        parts += " " + name + ":" + std::to_string(d);
        if (name != "tfidf") dense += d;
      }
      std::fprintf(stderr, "%zu vectors, layout%s (dense width %zu), %zu zero word-vector averages\n", docs.size(),
                   parts.c_str(), dense, zero);
    } else if (*sel) {
      const auto cfg = sel_cfg.load();
      SelectionModel model;
      if (!sel_model.empty()) {
        model = SelectionModel::load(sel_model);
        if (sel_dim == 0) sel_dim = model.input_dim;
      }
      const auto x = read_vectors(sel_vectors, sel_dim);
      if (sel_model.empty()) {
        if (sel_fit.empty()) throw ConfigError("select needs --fit or --model");
        if (cfg.selection.method == SelectionMethod::kNone) throw ConfigError("selection.method is none");
        if (cfg.selection.method == SelectionMethod::kAnovaF) {
          model = select_top_k(anova_f_scores(x, x.labels()), cfg.selection.k);
          model.input_dim = x.cols();
        } else {
          model = pca_fit(x, cfg.selection.n);
        }
        model.save(sel_fit);
      }
      write_vectors(sel_out, apply(model, x));
    } else if (*svm) {
      const auto cfg = svm_cfg.load();
      const auto raw = read_vectors(svm_vectors, svm_dim);
      const auto y = binary_targets(raw.labels(), cfg.data.positive_label);
      SvmParams sp = cfg.svm;
      sp.seed = Rng::derive(cfg.seed, 4);
      SvmReport rep;
      LinearModel m;
      if (svm_standardize > 0) {
        if (svm_standardize > raw.cols()) throw RangeError("--standardize-dense exceeds the feature width");
        const auto sc = ColumnScaler::fit(raw.sparse_rows(), svm_standardize);
        std::vector<SparseVector> rows;
        for (const auto& r : raw.sparse_rows()) rows.push_back(sc.transform(r));
        m = svm_train(FeatureMatrix::sparse(std::move(rows), raw.cols(), raw.labels()), y, sp, &rep);
        unscale_model(m, sc);
      } else {
        m = svm_train(raw, y, sp, &rep);
      }
      m.save(svm_out);
      for (std::size_t e = 0; e < rep.epoch_objective.size(); ++e) {
        std::fprintf(stderr, "epoch %zu objective %.6f\n", e + 1, rep.epoch_objective[e]);
      }
    } else if (*rnn) {
      const auto cfg = rnn_cfg.load();
      RnnLmConfig rc = cfg.rnnlm.config;
      rc.seed = Rng::derive(cfg.seed, 5);
      std::vector<RnnTrainReport> reps;
      const auto m = rnnlm_train_classes(read_corpus(rnn_corpus, cfg).labeled_only(), Vocabulary::load(rnn_vocab), rc,
                                         cfg.threads, &reps);
      m.save(rnn_out);
      for (std::size_t c = 0; c < reps.size(); ++c) {
        for (std::size_t e = 0; e < reps[c].train_perplexity.size(); ++e) {
          std::fprintf(stderr, "class %s epoch %zu train ppl %.4f\n", m.classes[c].c_str(), e + 1,
                       reps[c].train_perplexity[e]);
        }
      }
    } else if (*pred) {
      const auto cfg = pred_cfg.load();
      std::vector<double> probs;
      if (!pred_svm.empty()) {
        if (pred_vectors.empty()) throw ConfigError("--svm needs --vectors");
        const auto m = LinearModel::load(pred_svm);
        const auto x = read_vectors(pred_vectors, m.dim());
        for (const double mg : svm_margins(m, x)) probs.push_back(svm_proba(m, mg));
      } else if (!pred_rnn.empty()) {
        if (pred_corpus.empty()) throw ConfigError("--rnnlm needs --corpus");
        const auto m = RnnLmModel::load(pred_rnn);
        std::size_t pos = m.classes.size();
        for (std::size_t c = 0; c < m.classes.size(); ++c) {
          if (m.classes[c] == cfg.data.positive_label) pos = c;
        }
        if (pos == m.classes.size() || m.classes.size() != 2) {
          throw DataError("RNNLM model must have two classes including '" + cfg.data.positive_label + "'");
        }
        for (const auto& d : read_corpus(pred_corpus, cfg)) {
          probs.push_back(std::clamp(rnnlm_classify(m, d)[pos], 1e-15, 1.0 - 1e-15));
        }
      } else {
        throw ConfigError("predict needs --svm or --rnnlm");
      }
      write_probabilities(pred_out, row_ids(probs.size()), probs);
    } else if (*ens) {
      const auto cfg = ens_cfg.load();
      const auto a = read_probabilities(ens_svm);
      const auto b = read_probabilities(ens_rnn);
      if (a.size() != b.size()) throw DataError("probability files have different lengths");
      std::ofstream out(ens_out);
      if (!out) throw DataError("cannot write " + ens_out);
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].first != b[i].first) throw DataError("document ids differ at line " + std::to_string(i + 1));
        const auto v = ensemble_vote(a[i].second, b[i].second, cfg.ensemble);
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", v.probability);
        out << a[i].first << '\t' << buf << '\t' << (v.positive ? 1 : -1) << '\n';
      }
      if (!out) throw DataError("failed writing " + ens_out);
    } else if (*ev) {
      const auto cfg = eval_cfg.load();
      const Corpus docs = read_corpus(eval_corpus, cfg);
      std::map<std::uint64_t, int> decided;
      {
        std::ifstream in(eval_pred);
        std::string line;
        std::size_t n = 0;
        while (std::getline(in, line)) {
          ++n;
          if (line.empty()) continue;
          std::istringstream ss(line);
          std::uint64_t id = 0;
          double p = 0.0;
          int decision = 0;
          if (!(ss >> id >> p)) throw ParseError(eval_pred, n, "expected `id<TAB>p[<TAB>decision]`");
          if (!(ss >> decision)) decision = p >= 0.5 ? 1 : -1;
          decided[id] = decision > 0 ? 1 : -1;
        }
      }
      std::string negative;
      for (const auto& l : docs.labelset()) {
        if (l != cfg.data.positive_label) negative = l;
      }
      std::vector<int> truth, predicted;
      for (const auto& d : docs) {
        const auto it = decided.find(d.id);
        if (it == decided.end()) throw DataError("no prediction for document " + std::to_string(d.id));
        truth.push_back(d.label == cfg.data.positive_label ? 1 : -1);
        predicted.push_back(it->second);
      }
      const auto report = score_predictions(truth, predicted, negative, cfg.data.positive_label);
      auto j = report.to_json(false);
      for (const char* key : {"feature_dim", "svm_accuracy", "rnnlm_accuracy", "ensemble_accuracy", "config",
                              "zero_vector_docs"}) {
        j.erase(key);
      }
      print_json(j);
      if (!eval_out.empty()) {
        std::ofstream out(eval_out);
        out << j.dump(2) << '\n';
        if (!out) throw DataError("failed writing " + eval_out);
      }
    } else if (*exp) {
      auto cfg = exp_cfg.load();
      if (!exp_out.empty()) cfg.out = exp_out;
      if (cfg.out.empty()) throw ConfigError("experiment needs --out or a config `out`");
      const auto report = run_experiment(cfg, cfg.out);
      std::fprintf(stderr, "accuracy %.4f (svm %.4f)", report.accuracy, report.svm_accuracy);
      if (report.rnnlm_accuracy) std::fprintf(stderr, " rnnlm %.4f", *report.rnnlm_accuracy);
      if (report.ensemble_accuracy) std::fprintf(stderr, " ensemble %.4f", *report.ensemble_accuracy);
      std::fprintf(stderr, "\nreport: %s\n", (fs::path(cfg.out) / "report.json").c_str());
    } else if (*cmp) {
      const auto cfg = cmp_cfg.load();
      const auto table = compare_table_tsv(parse_compare_axis(cmp_axis),
                                           compare_models(cfg, parse_compare_axis(cmp_axis), cmp_values));
      std::cout << table;
      if (!cmp_out.empty()) {
        std::ofstream out(cmp_out);
        out << table;
        if (!out) throw DataError("failed writing " + cmp_out);
      }
    } else if (*gen) {
      const auto cfg = gen_cfg.load();
      const Corpus c = gen_kind == "grammar" ? make_grammar_corpus(grammar) : make_sentiment_corpus(cfg.data.synthetic);
      save_corpus_tsv(c, gen_out);
      std::fprintf(stderr, "%zu documents\n", c.size());
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
