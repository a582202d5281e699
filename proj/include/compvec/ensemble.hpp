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

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace compvec {

enum class VoteMode { kSoft, kHard };
enum class TieBreak { kSvm, kPositive };

VoteMode parse_vote_mode(std::string_view s);
TieBreak parse_tie_break(std::string_view s);
std::string_view to_string(VoteMode m);
std::string_view to_string(TieBreak t);

struct EnsembleConfig {
  double alpha = 0.5;  // weight on the SVM probability
  VoteMode mode = VoteMode::kSoft;
  TieBreak tie_break = TieBreak::kSvm;

  /// Throws RangeError unless alpha is in [0, 1].
  void validate() const;
};

struct Vote {
  bool positive = false;
  /// Soft: alpha p_svm + (1 - alpha) p_rnn. Hard: alpha-weighted share of
  /// positive votes.
  double probability = 0.0;
};

/// Both probabilities are p(positive), strictly inside (0, 1).
/// Soft: positive iff p > 0.5; p == 0.5 goes to the tie-break. Hard: each
/// model votes positive when its p >= 0.5 (the SVM's margin-0 rule) and the
/// weighted share decides the same way, so an even split at alpha = 0.5 goes
/// to the tie-break.
Vote ensemble_vote(double p_svm, double p_rnn, const EnsembleConfig& cfg);

struct EnsembleResult {
  double accuracy = 0.0;
  std::vector<Vote> decisions;
};

/// `labels` are +1 / -1. Throws DataError when the lengths differ.
EnsembleResult ensemble_eval(std::span<const double> svm_probs, std::span<const double> rnn_probs,
                             std::span<const int> labels, const EnsembleConfig& cfg);

/// Probability file: `<doc_id>\t<p_positive>` per line.
void write_probabilities(const std::filesystem::path& path, std::span<const std::uint64_t> ids,
                         std::span<const double> probs);
std::vector<std::pair<std::uint64_t, double>> read_probabilities(const std::filesystem::path& path);

}  // namespace compvec
