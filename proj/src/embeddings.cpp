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

#include "compvec/embeddings.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <thread>

#include "compvec/errors.hpp"
#include "compvec/simd.hpp"

namespace compvec {

EmbeddingModel parse_embedding_model(std::string_view name) {
  if (name == "skipgram" || name == "skip-gram") return EmbeddingModel::kSkipGram;
  if (name == "cbow") return EmbeddingModel::kCbow;
  if (name == "pv-dbow") return EmbeddingModel::kPvDbow;
  if (name == "pv-dm") return EmbeddingModel::kPvDm;
  throw ConfigError("unknown embedding model '" + std::string(name) + "'");
}

std::string_view to_string(EmbeddingModel m) {
  switch (m) {
    case EmbeddingModel::kSkipGram:
      return "skipgram";
    case EmbeddingModel::kCbow:
      return "cbow";
    case EmbeddingModel::kPvDbow:
      return "pv-dbow";
    case EmbeddingModel::kPvDm:
      return "pv-dm";
  }
  return "?";
}

TrainConfig TrainConfig::defaults_for(EmbeddingModel model) {
  TrainConfig cfg;
  cfg.model = model;
  if (model == EmbeddingModel::kPvDbow || model == EmbeddingModel::kPvDm) {
    cfg.window = 10;
    cfg.epochs = 20;
  }
  return cfg;
}

void TrainConfig::validate() const {
  if (dim < 1) throw ConfigError("dim must be >= 1");
  if (window < 1) throw ConfigError("window must be >= 1");
  if (negatives < 1) throw ConfigError("negatives must be >= 1");
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (!(lr0 > 0.0)) throw ConfigError("lr0 must be positive");
  if (!(min_lr >= 0.0 && min_lr <= lr0)) throw ConfigError("min_lr must lie in [0, lr0]");
  if (!(subsample_t >= 0.0)) throw ConfigError("subsample_t must be non-negative");
  if (workers < 1) throw ConfigError("workers must be >= 1");
}

EmbeddingMatrix::EmbeddingMatrix(std::vector<std::string> terms, std::size_t dim)
    : input(terms.size(), dim), context(terms.size(), dim), terms_(std::move(terms)) {
  index_.reserve(terms_.size());
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (!index_.emplace(terms_[i], static_cast<TermId>(i)).second) {
      throw FormatError("duplicate term '" + terms_[i] + "' in embedding matrix");
    }
  }
}

std::optional<TermId> EmbeddingMatrix::find(std::string_view term) const {
  const auto it = index_.find(std::string(term));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

TermId EmbeddingMatrix::id(std::string_view term) const {
  if (auto id = find(term)) return *id;
  throw LookupError("term not in embedding vocabulary: '" + std::string(term) + "'");
}

NegativeSampler::NegativeSampler(std::span<const std::uint64_t> counts, double power) {
  cdf_.resize(counts.size());
  double total = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    total += std::pow(static_cast<double>(counts[i]), power);
    cdf_[i] = total;
  }
  if (!(total > 0.0)) throw DataError("negative sampler: all term counts are zero");
  for (auto& c : cdf_) c /= total;
  cdf_.back() = 1.0;
}

double NegativeSampler::probability(TermId id) const {
  return id == 0 ? cdf_[0] : cdf_[id] - cdf_[id - 1];
}

TermId NegativeSampler::lookup(double u) const {
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  return static_cast<TermId>(std::min<std::size_t>(it - cdf_.begin(), cdf_.size() - 1));
}

std::vector<std::uint64_t> count_terms(const Corpus& corpus, const Vocabulary& vocab) {
  std::vector<std::uint64_t> counts(vocab.size(), 0);
  for (const auto& d : corpus) {
    for (const auto& t : d.tokens) {
      if (auto id = vocab.find(t)) ++counts[*id];
    }
  }
  return counts;
}

namespace {

inline double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

inline double log_sigmoid(double x) {
  return x >= 0.0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

// Loss and gradient of the negative-sampling objective for hidden vector h.
// coef[0] belongs to the target, coef[1..] to the negatives; each is
// dL/d(score). grad_hidden receives dL/dh.
double ns_score(std::span<const double> h, const Matrix& context, TermId target,
                std::span<const TermId> negatives, StepScratch& s) {
  const std::size_t d = h.size();
  s.grad_hidden.assign(d, 0.0);
  s.coef.resize(negatives.size() + 1);
  double loss = 0.0;
  for (std::size_t j = 0; j <= negatives.size(); ++j) {
    const TermId row = j == 0 ? target : negatives[j - 1];
    const auto out = context.row(row);
    const double x = simd::dot(h, out);
    double g;
    if (j == 0) {
      loss -= log_sigmoid(x);
      g = sigmoid(x) - 1.0;
    } else {
      loss -= log_sigmoid(-x);
      g = sigmoid(x);
    }
    s.coef[j] = g;
    simd::axpy(g, out, s.grad_hidden);
  }
  return loss;
}

void update_context(Matrix& context, std::span<const double> h, TermId target,
                    std::span<const TermId> negatives, const StepScratch& s, double lr) {
  for (std::size_t j = 0; j <= negatives.size(); ++j) {
    const TermId row = j == 0 ? target : negatives[j - 1];
    simd::axpy(-lr * s.coef[j], h, context.row(row));
  }
}

void mean_into(std::span<const double> first, const Matrix& input, std::span<const TermId> words,
               std::vector<double>& out) {
  const std::size_t d = input.cols();
  out.assign(d, 0.0);
  std::size_t n = 0;
  if (!first.empty()) {
    simd::axpy(1.0, first, out);
    ++n;
  }
  for (TermId w : words) {
    simd::axpy(1.0, input.row(w), out);
    ++n;
  }
  if (n > 1) simd::scale(1.0 / static_cast<double>(n), out);
}

}  // namespace

double skipgram_step(Matrix& input, Matrix& context, TermId center, TermId target,
                     std::span<const TermId> negatives, double lr, StepScratch& s) {
  const auto h = input.row(center);
  const double loss = ns_score(h, context, target, negatives, s);
  if (lr != 0.0) {
    update_context(context, h, target, negatives, s, lr);
    simd::axpy(-lr, s.grad_hidden, h);
  }
  return loss;
}

double cbow_step(Matrix& input, Matrix& context, std::span<const TermId> context_words, TermId target,
                 std::span<const TermId> negatives, double lr, StepScratch& s) {
  if (context_words.empty()) return 0.0;
  mean_into({}, input, context_words, s.hidden);
  const double loss = ns_score(s.hidden, context, target, negatives, s);
  if (lr != 0.0) {
    update_context(context, s.hidden, target, negatives, s, lr);
    const double step = -lr / static_cast<double>(context_words.size());
    for (TermId w : context_words) simd::axpy(step, s.grad_hidden, input.row(w));
  }
  return loss;
}

double pv_dbow_step(Matrix& docs, DocId doc, Matrix& context, TermId target,
                    std::span<const TermId> negatives, double lr, StepScratch& s) {
  const auto h = docs.row(doc);
  const double loss = ns_score(h, context, target, negatives, s);
  if (lr != 0.0) {
    update_context(context, h, target, negatives, s, lr);
    simd::axpy(-lr, s.grad_hidden, h);
  }
  return loss;
}

double pv_dm_step(Matrix& docs, DocId doc, Matrix& input, Matrix& context,
                  std::span<const TermId> context_words, TermId target, std::span<const TermId> negatives,
                  double lr, StepScratch& s) {
  mean_into(docs.row(doc), input, context_words, s.hidden);
  const double loss = ns_score(s.hidden, context, target, negatives, s);
  if (lr != 0.0) {
    update_context(context, s.hidden, target, negatives, s, lr);
    const double step = -lr / static_cast<double>(context_words.size() + 1);
    simd::axpy(step, s.grad_hidden, docs.row(doc));
    for (TermId w : context_words) simd::axpy(step, s.grad_hidden, input.row(w));
  }
  return loss;
}

double pv_dbow_infer_step(std::span<double> doc_vec, const Matrix& context, TermId target,
                          std::span<const TermId> negatives, double lr, StepScratch& s) {
  const double loss = ns_score(doc_vec, context, target, negatives, s);
  simd::axpy(-lr, s.grad_hidden, doc_vec);
  return loss;
}

double pv_dm_infer_step(std::span<double> doc_vec, const Matrix& input, const Matrix& context,
                        std::span<const TermId> context_words, TermId target,
                        std::span<const TermId> negatives, double lr, StepScratch& s) {
  mean_into(doc_vec, input, context_words, s.hidden);
  const double loss = ns_score(s.hidden, context, target, negatives, s);
  simd::axpy(-lr / static_cast<double>(context_words.size() + 1), s.grad_hidden, doc_vec);
  return loss;
}

namespace {

void init_uniform(Matrix& m, Rng& rng) {
  const double r = 0.5 / static_cast<double>(m.cols());
  for (auto& x : m.data()) x = rng.uniform(-r, r);
}

std::vector<std::vector<TermId>> to_ids(const Corpus& corpus, const Vocabulary& vocab) {
  std::vector<std::vector<TermId>> out;
  out.reserve(corpus.size());
  for (const auto& d : corpus) {
    std::vector<TermId> ids;
    ids.reserve(d.tokens.size());
    for (const auto& t : d.tokens) {
      if (auto id = vocab.find(t)) ids.push_back(*id);
    }
    out.push_back(std::move(ids));
  }
  return out;
}

struct WorkerState {
  Rng rng;
  NegativeSampler sampler;
  StepScratch scratch;
  std::vector<TermId> negatives;
  std::vector<TermId> sentence;
  std::vector<TermId> window_words;
  double loss = 0.0;
  std::uint64_t examples = 0;

  void draw_negatives(std::size_t k, TermId target) {
    negatives.clear();
    for (std::size_t i = 0; i < k; ++i) {
      const TermId t = sampler.next();
      if (t != target) negatives.push_back(t);
    }
  }
};

// Shared epoch/worker/learning-rate driver. `per_doc(state, doc_index, lr)`
// trains on state.sentence (the subsampled document).
template <typename PerDoc>
void drive(const std::vector<std::vector<TermId>>& docs, const std::vector<std::uint64_t>& counts,
           const TrainConfig& cfg, PerDoc&& per_doc, TrainReport* report) {
  std::uint64_t total_tokens = 0;
  for (auto c : counts) total_tokens += c;
  if (total_tokens == 0) throw DataError("training corpus has no in-vocabulary tokens");

  std::vector<double> keep(counts.size(), 1.0);
  if (cfg.subsample_t > 0.0) {
    const double thr = cfg.subsample_t * static_cast<double>(total_tokens);
    for (std::size_t i = 0; i < counts.size(); ++i) {
      if (counts[i] == 0) continue;
      const double f = static_cast<double>(counts[i]);
      keep[i] = std::min(1.0, (std::sqrt(f / thr) + 1.0) * thr / f);
    }
  }

  const NegativeSampler proto(counts);
  const std::size_t workers = std::min<std::size_t>(cfg.workers, std::max<std::size_t>(docs.size(), 1));
  std::vector<WorkerState> states;
  states.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    states.push_back(WorkerState{Rng(Rng::derive(cfg.seed, 100 + w)), proto, {}, {}, {}, {}});
    states.back().sampler.reseed(states.back().rng);
  }

  const double planned = static_cast<double>(cfg.epochs) * static_cast<double>(total_tokens);
  std::atomic<std::uint64_t> processed{0};
  const auto lr_now = [&] {
    const double progress = static_cast<double>(processed.load(std::memory_order_relaxed)) / planned;
    return std::max(cfg.min_lr, cfg.lr0 - (cfg.lr0 - cfg.min_lr) * progress);
  };

  if (report) report->epoch_loss.clear();
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto run = [&](std::size_t w) {
      WorkerState& st = states[w];
      st.loss = 0.0;
      st.examples = 0;
      const std::size_t lo = docs.size() * w / workers;
      const std::size_t hi = docs.size() * (w + 1) / workers;
      for (std::size_t d = lo; d < hi; ++d) {
        st.sentence.clear();
        for (TermId t : docs[d]) {
          if (keep[t] >= 1.0 || st.rng.uniform() < keep[t]) st.sentence.push_back(t);
        }
        const double before = st.loss;
        per_doc(st, d, lr_now());
        if (!std::isfinite(st.loss)) {
          throw DivergenceError("non-finite training loss at epoch " + std::to_string(epoch) +
                                ", document " + std::to_string(d) + " (loss before document " +
                                std::to_string(before) + ")");
        }
        processed.fetch_add(docs[d].size(), std::memory_order_relaxed);
      }
    };
    if (workers == 1) {
      run(0);
    } else {
      std::vector<std::thread> threads;
      std::vector<std::exception_ptr> errors(workers);
      for (std::size_t w = 0; w < workers; ++w) {
        threads.emplace_back([&, w] {
          try {
            run(w);
          } catch (...) {
            errors[w] = std::current_exception();
          }
        });
      }
      for (auto& t : threads) t.join();
      for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
      }
    }
    double loss = 0.0;
    std::uint64_t examples = 0;
    for (const auto& st : states) {
      loss += st.loss;
      examples += st.examples;
    }
    if (report) {
      report->epoch_loss.push_back(examples ? loss / static_cast<double>(examples) : 0.0);
      report->examples += examples;
    }
  }
}

void collect_window(const std::vector<TermId>& sentence, std::size_t pos, std::size_t reach,
                    std::vector<TermId>& out) {
  out.clear();
  const std::size_t lo = pos >= reach ? pos - reach : 0;
  const std::size_t hi = std::min(sentence.size(), pos + reach + 1);
  for (std::size_t j = lo; j < hi; ++j) {
    if (j != pos) out.push_back(sentence[j]);
  }
}

void check_inputs(const Corpus& corpus, const Vocabulary& vocab, const TrainConfig& cfg) {
  cfg.validate();
  if (corpus.empty()) throw DataError("cannot train on an empty corpus");
  if (vocab.empty()) throw DataError("cannot train with an empty vocabulary");
}

}  // namespace

EmbeddingMatrix train_embeddings(const Corpus& corpus, const Vocabulary& vocab, const TrainConfig& cfg,
                                 TrainReport* report) {
  check_inputs(corpus, vocab, cfg);
  if (cfg.model != EmbeddingModel::kSkipGram && cfg.model != EmbeddingModel::kCbow) {
    throw ConfigError("train_embeddings expects skipgram or cbow");
  }
  EmbeddingMatrix emb(vocab.terms(), cfg.dim);
  Rng init(cfg.seed);
  init_uniform(emb.input, init);

  const auto docs = to_ids(corpus, vocab);
  const auto counts = count_terms(corpus, vocab);
  const bool skipgram = cfg.model == EmbeddingModel::kSkipGram;

  drive(docs, counts, cfg,
        [&](WorkerState& st, std::size_t, double lr) {
          const auto& sent = st.sentence;
          for (std::size_t i = 0; i < sent.size(); ++i) {
            const std::size_t reach = 1 + st.rng.below(cfg.window);
            collect_window(sent, i, reach, st.window_words);
            if (skipgram) {
              for (TermId ctx : st.window_words) {
                st.draw_negatives(cfg.negatives, ctx);
                st.loss += skipgram_step(emb.input, emb.context, sent[i], ctx, st.negatives, lr, st.scratch);
                ++st.examples;
              }
            } else if (!st.window_words.empty()) {
              st.draw_negatives(cfg.negatives, sent[i]);
              st.loss += cbow_step(emb.input, emb.context, st.window_words, sent[i], st.negatives, lr, st.scratch);
              ++st.examples;
            }
          }
        },
        report);
  return emb;
}

ParagraphVectors train_paragraph_vectors(const Corpus& corpus, const Vocabulary& vocab,
                                         const TrainConfig& cfg, TrainReport* report) {
  check_inputs(corpus, vocab, cfg);
  if (cfg.model != EmbeddingModel::kPvDbow && cfg.model != EmbeddingModel::kPvDm) {
    throw ConfigError("train_paragraph_vectors expects pv-dbow or pv-dm");
  }
  ParagraphVectors pv{cfg, Matrix(corpus.size(), cfg.dim), EmbeddingMatrix(vocab.terms(), cfg.dim),
                      count_terms(corpus, vocab)};
  Rng init(cfg.seed);
  init_uniform(pv.docs, init);
  init_uniform(pv.words.input, init);

  const auto docs = to_ids(corpus, vocab);
  const bool dm = cfg.model == EmbeddingModel::kPvDm;

  drive(docs, pv.counts, cfg,
        [&](WorkerState& st, std::size_t d, double lr) {
          const auto& sent = st.sentence;
          const auto doc = static_cast<DocId>(d);
          for (std::size_t i = 0; i < sent.size(); ++i) {
            st.draw_negatives(cfg.negatives, sent[i]);
            if (dm) {
              collect_window(sent, i, 1 + st.rng.below(cfg.window), st.window_words);
              st.loss += pv_dm_step(pv.docs, doc, pv.words.input, pv.words.context, st.window_words, sent[i],
                                    st.negatives, lr, st.scratch);
            } else {
              st.loss += pv_dbow_step(pv.docs, doc, pv.words.context, sent[i], st.negatives, lr, st.scratch);
            }
            ++st.examples;
          }
        },
        report);
  return pv;
}

std::vector<double> infer_paragraph_vector(const ParagraphVectors& model, const Document& doc,
                                           std::size_t inference_epochs, std::uint64_t seed) {
  std::vector<TermId> ids;
  for (const auto& t : doc.tokens) {
    if (auto id = model.words.find(t)) ids.push_back(*id);
  }
  if (ids.empty()) throw DataError("cannot infer a paragraph vector: document has no in-vocabulary token");

  const std::size_t d = model.config.dim;
  Rng rng(Rng::derive(seed, 7));
  std::vector<double> vec(d);
  const double r = 0.5 / static_cast<double>(d);
  for (auto& x : vec) x = rng.uniform(-r, r);
  if (inference_epochs == 0) return vec;

  NegativeSampler sampler(model.counts);
  sampler.reseed(rng);
  StepScratch scratch;
  std::vector<TermId> negs;
  std::vector<TermId> window;
  const bool dm = model.config.model == EmbeddingModel::kPvDm;
  const double total = static_cast<double>(inference_epochs * ids.size());
  std::size_t step = 0;
  for (std::size_t e = 0; e < inference_epochs; ++e) {
    for (std::size_t i = 0; i < ids.size(); ++i, ++step) {
      const double lr = model.config.lr0 - (model.config.lr0 - model.config.min_lr) * static_cast<double>(step) / total;
      negs.clear();
      for (std::size_t k = 0; k < model.config.negatives; ++k) {
        const TermId t = sampler.next();
        if (t != ids[i]) negs.push_back(t);
      }
      double loss;
      if (dm) {
        collect_window(ids, i, 1 + rng.below(model.config.window), window);
        loss = pv_dm_infer_step(vec, model.words.input, model.words.context, window, ids[i], negs, lr, scratch);
      } else {
        loss = pv_dbow_infer_step(vec, model.words.context, ids[i], negs, lr, scratch);
      }
      if (!std::isfinite(loss)) {
        throw DivergenceError("non-finite loss while inferring a paragraph vector (epoch " + std::to_string(e) + ")");
      }
    }
  }
  return vec;
}

double cosine(std::span<const double> a, std::span<const double> b) {
  const double na = std::sqrt(simd::dot(a, a));
  const double nb = std::sqrt(simd::dot(b, b));
  if (na == 0.0 || nb == 0.0) return 0.0;
  return simd::dot(a, b) / (na * nb);
}

std::vector<std::pair<std::string, double>> nearest_neighbors(const EmbeddingMatrix& emb,
                                                              std::string_view term, std::size_t k) {
  const TermId q = emb.id(term);
  if (k >= emb.size()) throw RangeError("k must be smaller than the vocabulary size");
  std::vector<std::pair<double, TermId>> scored;
  scored.reserve(emb.size() - 1);
  const auto qv = emb.input.row(q);
  for (TermId r = 0; r < emb.size(); ++r) {
    if (r != q) scored.emplace_back(cosine(qv, emb.input.row(r)), r);
  }
  const auto better = [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  };
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(k), scored.end(), better);
  std::vector<std::pair<std::string, double>> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) out.emplace_back(emb.terms()[scored[i].second], scored[i].first);
  return out;
}

namespace {

void write_matrix(const std::vector<std::string>& names, const Matrix& m, const std::filesystem::path& path,
                  int precision) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << m.rows() << ' ' << m.cols() << '\n';
  char fmt[16];
  std::snprintf(fmt, sizeof fmt, precision <= 6 ? " %%.%df" : " %%.%dg", precision);
  char buf[64];
  std::string line;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    line = names[r];
    for (double x : m.row(r)) {
      std::snprintf(buf, sizeof buf, fmt, x);
      line += buf;
    }
    line += '\n';
    out << line;
  }
}

std::pair<std::vector<std::string>, Matrix> read_matrix(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::string line;
  std::size_t rows = 0;
  std::size_t cols = 0;
  {
    if (!std::getline(in, line)) throw FormatError(path.string() + ": missing '<V> <d>' header");
    std::istringstream hs(line);
    if (!(hs >> rows >> cols) || cols == 0) throw FormatError(path.string() + ": bad '<V> <d>' header");
  }
  std::vector<std::string> names;
  names.reserve(rows);
  Matrix m(rows, cols);
  std::size_t r = 0;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (r >= rows) throw FormatError(path.string() + ": more rows than the header's " + std::to_string(rows));
    const char* p = line.c_str();
    const char* sp = std::strchr(p, ' ');
    if (!sp) throw FormatError(path.string() + ":" + std::to_string(lineno) + ": row has no values");
    names.emplace_back(p, sp);
    p = sp;
    std::size_t c = 0;
    for (;;) {
      while (*p == ' ') ++p;
      if (*p == '\0') break;
      char* end = nullptr;
      const double v = std::strtod(p, &end);
      if (end == p) throw FormatError(path.string() + ":" + std::to_string(lineno) + ": bad number");
      if (c >= cols) break;
      m(r, c++) = v;
      p = end;
    }
    if (c != cols || *p != '\0') {
      throw FormatError(path.string() + ":" + std::to_string(lineno) + ": row width differs from d=" +
                        std::to_string(cols));
    }
    ++r;
  }
  if (r != rows) {
    throw FormatError(path.string() + ": header declares " + std::to_string(rows) + " rows, found " +
                      std::to_string(r));
  }
  return {std::move(names), std::move(m)};
}

}  // namespace

void save_embeddings(const EmbeddingMatrix& emb, const std::filesystem::path& path, int precision) {
  write_matrix(emb.terms(), emb.input, path, precision);
}

EmbeddingMatrix load_embeddings(const std::filesystem::path& path) {
  auto [names, m] = read_matrix(path);
  EmbeddingMatrix emb(std::move(names), m.cols());
  emb.input = std::move(m);
  return emb;
}

void save_paragraph_vectors(const ParagraphVectors& pv, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::string> ids;
  ids.reserve(pv.docs.rows());
  for (std::size_t i = 0; i < pv.docs.rows(); ++i) ids.push_back(std::to_string(i));
  write_matrix(ids, pv.docs, dir / "docs.w2v", 17);
  write_matrix(pv.words.terms(), pv.words.input, dir / "words.w2v", 17);
  write_matrix(pv.words.terms(), pv.words.context, dir / "context.w2v", 17);
  {
    std::ofstream out(dir / "counts.tsv", std::ios::binary);
    for (std::size_t i = 0; i < pv.counts.size(); ++i) out << pv.words.terms()[i] << '\t' << pv.counts[i] << '\n';
  }
  std::ofstream out(dir / "config.tsv", std::ios::binary);
  const auto& c = pv.config;
  char buf[160];
  out << "model\t" << to_string(c.model) << "\ndim\t" << c.dim << "\nwindow\t" << c.window << "\nnegatives\t"
      << c.negatives << "\nepochs\t" << c.epochs;
  std::snprintf(buf, sizeof buf, "\nlr0\t%.17g\nmin_lr\t%.17g\nsubsample_t\t%.17g", c.lr0, c.min_lr, c.subsample_t);
  out << buf << "\nseed\t" << c.seed << '\n';
}

ParagraphVectors load_paragraph_vectors(const std::filesystem::path& dir) {
  ParagraphVectors pv;
  {
    std::ifstream in(dir / "config.tsv");
    if (!in) throw DataError("cannot open " + (dir / "config.tsv").string());
    std::string key;
    std::string value;
    while (in >> key >> value) {
      if (key == "model") pv.config.model = parse_embedding_model(value);
      else if (key == "dim") pv.config.dim = std::stoul(value);
      else if (key == "window") pv.config.window = std::stoul(value);
      else if (key == "negatives") pv.config.negatives = std::stoul(value);
      else if (key == "epochs") pv.config.epochs = std::stoul(value);
      else if (key == "lr0") pv.config.lr0 = std::stod(value);
      else if (key == "min_lr") pv.config.min_lr = std::stod(value);
      else if (key == "subsample_t") pv.config.subsample_t = std::stod(value);
      else if (key == "seed") pv.config.seed = std::stoull(value);
    }
  }
  pv.docs = read_matrix(dir / "docs.w2v").second;
  auto [terms, input] = read_matrix(dir / "words.w2v");
  auto context = read_matrix(dir / "context.w2v").second;
  if (context.rows() != input.rows() || context.cols() != input.cols() || input.cols() != pv.docs.cols()) {
    throw FormatError(dir.string() + ": paragraph-vector matrices disagree in shape");
  }
  pv.words = EmbeddingMatrix(std::move(terms), input.cols());
  pv.words.input = std::move(input);
  pv.words.context = std::move(context);
  pv.counts.assign(pv.words.size(), 0);
  std::ifstream in(dir / "counts.tsv");
  std::string term;
  std::uint64_t count = 0;
  while (in >> term >> count) {
    if (auto id = pv.words.find(term)) pv.counts[*id] = count;
  }
  return pv;
}

}  // namespace compvec
