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

#include "compvec/ensemble.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "compvec/errors.hpp"

namespace compvec {

VoteMode parse_vote_mode(std::string_view s) {
  if (s == "soft") return VoteMode::kSoft;
  if (s == "hard") return VoteMode::kHard;
  throw ConfigError("unknown vote mode '" + std::string(s) + "' (soft|hard)");
}

TieBreak parse_tie_break(std::string_view s) {
  if (s == "svm") return TieBreak::kSvm;
  if (s == "positive") return TieBreak::kPositive;
  throw ConfigError("unknown tie break '" + std::string(s) + "' (svm|positive)");
}

std::string_view to_string(VoteMode m) { return m == VoteMode::kSoft ? "soft" : "hard"; }
std::string_view to_string(TieBreak t) { return t == TieBreak::kSvm ? "svm" : "positive"; }

void EnsembleConfig::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw RangeError("ensemble alpha must be in [0, 1]");
}

Vote ensemble_vote(double p_svm, double p_rnn, const EnsembleConfig& cfg) {
  cfg.validate();
  const auto check = [](double p, const char* who) {
    if (!(p > 0.0 && p < 1.0)) {
      throw RangeError(std::string(who) + " probability " + std::to_string(p) + " is outside (0, 1)");
    }
  };
  check(p_svm, "svm");
  check(p_rnn, "rnn");
  const bool svm_vote = p_svm >= 0.5;
  const bool rnn_vote = p_rnn >= 0.5;
  const auto tie = [&] { return cfg.tie_break == TieBreak::kPositive || svm_vote; };

  if (cfg.mode == VoteMode::kSoft) {
    const double p = cfg.alpha * p_svm + (1.0 - cfg.alpha) * p_rnn;
    return {p > 0.5 || (p == 0.5 && tie()), p};
  }
  const double share = cfg.alpha * static_cast<double>(svm_vote) + (1.0 - cfg.alpha) * static_cast<double>(rnn_vote);
  return {share > 0.5 || (share == 0.5 && tie()), share};
}

EnsembleResult ensemble_eval(std::span<const double> svm_probs, std::span<const double> rnn_probs,
                             std::span<const int> labels, const EnsembleConfig& cfg) {
  if (svm_probs.size() != rnn_probs.size() || svm_probs.size() != labels.size()) {
    throw DataError("ensemble inputs are not aligned: " + std::to_string(svm_probs.size()) + " svm, " +
                    std::to_string(rnn_probs.size()) + " rnn, " + std::to_string(labels.size()) + " labels");
  }
  EnsembleResult r;
  r.decisions.reserve(labels.size());
  std::size_t correct = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto v = ensemble_vote(svm_probs[i], rnn_probs[i], cfg);
    correct += (v.positive ? 1 : -1) == labels[i];
    r.decisions.push_back(v);
  }
  r.accuracy = labels.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(labels.size());
  return r;
}

void write_probabilities(const std::filesystem::path& path, std::span<const std::uint64_t> ids,
                         std::span<const double> probs) {
  if (ids.size() != probs.size()) throw DataError("id and probability counts differ");
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw DataError("cannot write " + path.string());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    std::fprintf(f, "%llu\t%.17g\n", static_cast<unsigned long long>(ids[i]), probs[i]);
  }
  const bool ok = std::ferror(f) == 0;
  std::fclose(f);
  if (!ok) throw DataError("failed writing " + path.string());
}

std::vector<std::pair<std::uint64_t, double>> read_probabilities(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<std::pair<std::uint64_t, double>> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError(path.string(), n, "expected <doc_id>\\t<p_positive>");
    try {
      std::size_t used = 0;
      const auto id = std::stoull(line.substr(0, tab), &used);
      if (used != tab) throw std::invalid_argument("id");
      const auto rest = line.substr(tab + 1);
      const double p = std::stod(rest, &used);
      if (used != rest.size()) throw std::invalid_argument("p");
      out.emplace_back(id, p);
    } catch (const std::logic_error&) {
      throw ParseError(path.string(), n, "bad id or probability");
    }
  }
  return out;
}

}  // namespace compvec
