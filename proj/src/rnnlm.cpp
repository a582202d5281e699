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

#include "compvec/rnnlm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <thread>

#include "compvec/errors.hpp"
#include "compvec/simd.hpp"

namespace compvec {

namespace {

constexpr std::string_view kBoundaryToken = "</s>";
constexpr std::string_view kUnknownToken = "<unk>";

double logistic(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

void softmax_into(const Matrix& o, std::span<const double> s, std::span<double> probs) {
  double hi = -INFINITY;
  for (std::size_t v = 0; v < probs.size(); ++v) {
    probs[v] = simd::dot(o.row(v), s);
    hi = std::max(hi, probs[v]);
  }
  double z = 0.0;
  for (auto& p : probs) {
    p = std::exp(p - hi);
    z += p;
  }
  simd::scale(1.0 / z, probs);
}

}  // namespace

LmVocab::LmVocab(std::vector<std::string> terms) {
  terms_.reserve(terms.size() + 2);
  terms_.emplace_back(kBoundaryToken);
  terms_.emplace_back(kUnknownToken);
  for (auto& t : terms) {
    if (t == kBoundaryToken || t == kUnknownToken) throw ConfigError("reserved token '" + t + "' in LM vocabulary");
    terms_.push_back(std::move(t));
  }
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (!index_.emplace(terms_[i], static_cast<TermId>(i)).second) {
      throw DataError("duplicate LM vocabulary term '" + terms_[i] + "'");
    }
  }
}

LmVocab LmVocab::from(const Vocabulary& vocab, std::size_t max_terms) {
  std::vector<std::string> terms;
  for (const auto& t : vocab.terms()) {
    if (terms.size() >= max_terms) break;
    if (t == kBoundaryToken || t == kUnknownToken) continue;
    terms.push_back(t);
  }
  return LmVocab(std::move(terms));
}

TermId LmVocab::map(std::string_view term) const {
  const auto it = index_.find(std::string(term));
  return it == index_.end() ? kUnknown : it->second;
}

std::vector<TermId> LmVocab::encode(const Document& doc) const {
  std::vector<TermId> out;
  out.reserve(doc.tokens.size());
  for (const auto& t : doc.tokens) out.push_back(map(t));
  return out;
}

ElmanNetwork::ElmanNetwork(std::size_t vocab, std::size_t hidden, Rng& rng, double init_range)
    : u(vocab, hidden), w(hidden, hidden), o(vocab, hidden) {
  for (auto* m : {&u, &w, &o}) {
    for (auto& x : m->data()) x = rng.uniform(-init_range, init_range);
  }
}

RnnGrads ElmanNetwork::zero_grads() const {
  return {Matrix(u.rows(), u.cols()), Matrix(w.rows(), w.cols()), Matrix(o.rows(), o.cols())};
}

void ElmanNetwork::step(TermId input, std::span<const double> prev, std::span<double> next,
                        std::span<double> probs) const {
  const auto in = u.row(input);
  for (std::size_t i = 0; i < next.size(); ++i) next[i] = logistic(in[i] + simd::dot(w.row(i), prev));
  softmax_into(o, next, probs);
}

double ElmanNetwork::logprob(std::span<const TermId> tokens) const {
  if (tokens.empty()) return 0.0;
  std::vector<double> s(hidden(), kInitialState);
  std::vector<double> next(hidden());
  std::vector<double> probs(vocab_size());
  double lp = 0.0;
  TermId input = LmVocab::kBoundary;
  for (const TermId t : tokens) {
    step(input, s, next, probs);
    lp += std::log(probs[t]);
    s.swap(next);
    input = t;
  }
  return lp;
}

double ElmanNetwork::segment_loss(std::span<const TermId> inputs, std::span<const TermId> targets,
                                  std::vector<double>& state, RnnGrads* grads) const {
  const std::size_t n = inputs.size();
  const std::size_t h = hidden();
  const std::size_t v = vocab_size();
  Matrix states(n + 1, h);
  std::copy(state.begin(), state.end(), states.row(0).begin());
  Matrix probs(grads ? n : 1, v);
  std::vector<double> scratch(v);
  double loss = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    auto p = grads ? probs.row(t) : std::span<double>(scratch);
    step(inputs[t], states.row(t), states.row(t + 1), p);
    loss -= std::log(p[targets[t]]);
  }
  std::copy(states.row(n).begin(), states.row(n).end(), state.begin());
  if (!grads) return loss;

  std::vector<double> ds(h);
  std::vector<double> ds_next(h, 0.0);
  std::vector<double> da(h);
  for (std::size_t t = n; t-- > 0;) {
    auto dz = probs.row(t);
    dz[targets[t]] -= 1.0;
    const auto s = states.row(t + 1);
    const auto prev = states.row(t);
    ds = ds_next;
    for (std::size_t k = 0; k < v; ++k) {
      simd::axpy(dz[k], s, grads->o.row(k));
      simd::axpy(dz[k], o.row(k), ds);
    }
    for (std::size_t i = 0; i < h; ++i) da[i] = ds[i] * s[i] * (1.0 - s[i]);
    simd::axpy(1.0, da, grads->u.row(inputs[t]));
    std::fill(ds_next.begin(), ds_next.end(), 0.0);
    for (std::size_t i = 0; i < h; ++i) {
      simd::axpy(da[i], prev, grads->w.row(i));
      simd::axpy(da[i], w.row(i), ds_next);
    }
  }
  return loss;
}

void RnnLmConfig::validate() const {
  if (hidden < 1) throw ConfigError("rnnlm hidden size must be >= 1");
  if (bptt < 1) throw ConfigError("rnnlm bptt must be >= 1");
  if (epochs < 1) throw ConfigError("rnnlm epochs must be >= 1");
  if (!(lr > 0.0) || !std::isfinite(lr)) throw ConfigError("rnnlm lr must be positive");
  if (max_vocab < 1) throw ConfigError("rnnlm max_vocab must be >= 1");
  if (!(init_range > 0.0)) throw ConfigError("rnnlm init_range must be positive");
  if (!(validation_fraction >= 0.0 && validation_fraction < 1.0)) {
    throw ConfigError("rnnlm validation_fraction must be in [0, 1)");
  }
}

double perplexity(const ElmanNetwork& net, const std::vector<std::vector<TermId>>& docs) {
  double lp = 0.0;
  std::size_t tokens = 0;
  for (const auto& d : docs) {
    lp += net.logprob(d);
    tokens += d.size();
  }
  return tokens ? std::exp(-lp / static_cast<double>(tokens)) : 1.0;
}

ElmanNetwork rnnlm_train(const std::vector<std::vector<TermId>>& docs, std::size_t vocab_size,
                         const RnnLmConfig& cfg, RnnTrainReport* report) {
  cfg.validate();
  std::vector<std::vector<TermId>> train;
  for (const auto& d : docs) {
    if (d.empty()) continue;
    for (const TermId t : d) {
      if (t >= vocab_size) throw DataError("token id out of LM vocabulary range");
    }
    train.push_back(d);
  }
  if (train.empty()) throw DataError("rnnlm class corpus has no tokens");
  std::vector<std::vector<TermId>> valid;
  if (train.size() >= 10 && cfg.validation_fraction > 0.0) {
    const auto k = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(cfg.validation_fraction * train.size())));
    valid.assign(train.end() - static_cast<std::ptrdiff_t>(k), train.end());
    train.resize(train.size() - k);
  }

  Rng rng(cfg.seed);
  ElmanNetwork net(vocab_size, cfg.hidden, rng, cfg.init_range);
  auto grads = net.zero_grads();
  std::vector<TermId> touched;
  double lr = cfg.lr;
  double best = INFINITY;
  std::vector<double> state(cfg.hidden);
  std::vector<TermId> inputs;
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    double loss = 0.0;
    for (const auto& doc : train) {
      inputs.assign(1, LmVocab::kBoundary);
      inputs.insert(inputs.end(), doc.begin(), doc.end() - 1);
      std::fill(state.begin(), state.end(), ElmanNetwork::kInitialState);
      for (std::size_t start = 0; start < doc.size(); start += cfg.bptt) {
        const std::size_t len = std::min(cfg.bptt, doc.size() - start);
        const std::span<const TermId> in(inputs.data() + start, len);
        const std::span<const TermId> out(doc.data() + start, len);
        std::fill(grads.w.data().begin(), grads.w.data().end(), 0.0);
        std::fill(grads.o.data().begin(), grads.o.data().end(), 0.0);
        loss += net.segment_loss(in, out, state, &grads);
        simd::axpy(-lr, grads.w.data(), net.w.data());
        simd::axpy(-lr, grads.o.data(), net.o.data());
        touched.assign(in.begin(), in.end());
        std::sort(touched.begin(), touched.end());
        touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
        for (const TermId t : touched) {
          auto g = grads.u.row(t);
          simd::axpy(-lr, g, net.u.row(t));
          std::fill(g.begin(), g.end(), 0.0);
        }
      }
      if (!std::isfinite(loss)) {
        throw DivergenceError("rnnlm training diverged (non-finite loss) in epoch " + std::to_string(epoch));
      }
    }
    const double train_ppl = perplexity(net, train);
    const double valid_ppl = valid.empty() ? train_ppl : perplexity(net, valid);
    if (!std::isfinite(train_ppl) || !std::isfinite(valid_ppl)) {
      throw DivergenceError("rnnlm perplexity became non-finite in epoch " + std::to_string(epoch));
    }
    if (report) {
      report->train_perplexity.push_back(train_ppl);
      report->valid_perplexity.push_back(valid_ppl);
      report->lr.push_back(lr);
    }
    if (valid_ppl < best) {
      best = valid_ppl;
    } else {
      lr *= 0.5;
    }
  }
  return net;
}

RnnLmModel rnnlm_train_classes(const Corpus& corpus, const Vocabulary& vocab, const RnnLmConfig& cfg,
                               std::size_t threads, std::vector<RnnTrainReport>* reports) {
  cfg.validate();
  RnnLmModel model;
  model.vocab = LmVocab::from(vocab, cfg.max_vocab);
  std::map<std::string, std::vector<std::vector<TermId>>> by_class;
  std::size_t labeled = 0;
  for (const auto& d : corpus) {
    if (!d.labeled()) continue;
    by_class[d.label].push_back(model.vocab.encode(d));
    ++labeled;
  }
  if (by_class.size() < 2) throw DataError("rnnlm classification needs at least two labeled classes");
  std::vector<const std::vector<std::vector<TermId>>*> class_docs;
  for (const auto& [label, docs] : by_class) {
    model.classes.push_back(label);
    model.priors.push_back(static_cast<double>(docs.size()) / static_cast<double>(labeled));
    class_docs.push_back(&docs);
  }
  const std::size_t k = model.classes.size();
  model.networks.resize(k);
  std::vector<RnnTrainReport> local(k);
  std::vector<std::exception_ptr> errors(k);
  const auto train_one = [&](std::size_t c) {
    try {
      RnnLmConfig cc = cfg;
      cc.seed = Rng::derive(cfg.seed, c);
      model.networks[c] = rnnlm_train(*class_docs[c], model.vocab.size(), cc, &local[c]);
    } catch (...) {
      errors[c] = std::current_exception();
    }
  };
  const std::size_t workers = std::clamp<std::size_t>(threads, 1, k);
  if (workers == 1) {
    for (std::size_t c = 0; c < k; ++c) train_one(c);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t c = w; c < k; c += workers) train_one(c);
      });
    }
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  if (reports) *reports = std::move(local);
  return model;
}

double rnnlm_logprob(const RnnLmModel& model, std::size_t cls, const Document& doc) {
  return model.networks.at(cls).logprob(model.vocab.encode(doc));
}

std::vector<double> class_posterior(std::span<const double> logprobs, std::span<const double> priors) {
  if (logprobs.size() != priors.size()) throw DataError("class log-likelihood and prior counts differ");
  std::vector<double> z(logprobs.size());
  double hi = -INFINITY;
  for (std::size_t c = 0; c < z.size(); ++c) {
    z[c] = logprobs[c] + std::log(priors[c]);
    hi = std::max(hi, z[c]);
  }
  double total = 0.0;
  for (auto& v : z) {
    v = std::exp(v - hi);
    total += v;
  }
  for (auto& v : z) v /= total;
  return z;
}

std::vector<double> rnnlm_classify(const RnnLmModel& model, const Document& doc) {
  if (model.networks.size() < 2) throw ConfigError("rnnlm model needs at least two class networks");
  std::vector<double> lp(model.networks.size());
  const auto ids = model.vocab.encode(doc);
  for (std::size_t c = 0; c < lp.size(); ++c) lp[c] = model.networks[c].logprob(ids);
  return class_posterior(lp, model.priors);
}

void RnnLmModel::save(const std::filesystem::path& path) const {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw DataError("cannot write " + path.string());
  const std::size_t h = networks.empty() ? 0 : networks.front().hidden();
  std::fprintf(f, "rnnlm %zu %zu %zu\n", vocab.size(), classes.size(), h);
  for (const auto& t : vocab.terms()) std::fprintf(f, "%s\n", t.c_str());
  for (std::size_t c = 0; c < classes.size(); ++c) std::fprintf(f, "%s\t%.17g\n", classes[c].c_str(), priors[c]);
  for (const auto& net : networks) {
    for (const auto* m : {&net.u, &net.w, &net.o}) {
      for (std::size_t r = 0; r < m->rows(); ++r) {
        const auto row = m->row(r);
        for (std::size_t i = 0; i < row.size(); ++i) std::fprintf(f, i ? " %.17g" : "%.17g", row[i]);
        std::fputc('\n', f);
      }
    }
  }
  const bool ok = std::ferror(f) == 0;
  std::fclose(f);
  if (!ok) throw DataError("failed writing " + path.string());
}

RnnLmModel RnnLmModel::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::string magic;
  std::size_t v = 0, k = 0, h = 0;
  if (!(in >> magic >> v >> k >> h) || magic != "rnnlm" || v < 2) {
    throw FormatError(path.string() + ": not an rnnlm model file");
  }
  std::string line;
  std::getline(in, line);
  std::vector<std::string> terms(v);
  for (auto& t : terms) {
    if (!std::getline(in, t)) throw FormatError(path.string() + ": truncated vocabulary");
  }
  if (terms[0] != kBoundaryToken || terms[1] != kUnknownToken) {
    throw FormatError(path.string() + ": reserved tokens missing");
  }
  RnnLmModel m;
  m.vocab = LmVocab(std::vector<std::string>(terms.begin() + 2, terms.end()));
  for (std::size_t c = 0; c < k; ++c) {
    if (!std::getline(in, line)) throw FormatError(path.string() + ": truncated class table");
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw FormatError(path.string() + ": bad class line");
    m.classes.push_back(line.substr(0, tab));
    m.priors.push_back(std::stod(line.substr(tab + 1)));
  }
  for (std::size_t c = 0; c < k; ++c) {
    ElmanNetwork net;
    net.u = Matrix(v, h);
    net.w = Matrix(h, h);
    net.o = Matrix(v, h);
    for (auto* mat : {&net.u, &net.w, &net.o}) {
      for (auto& x : mat->data()) {
        if (!(in >> x)) throw FormatError(path.string() + ": truncated weights");
      }
    }
    m.networks.push_back(std::move(net));
  }
  return m;
}

}  // namespace compvec
