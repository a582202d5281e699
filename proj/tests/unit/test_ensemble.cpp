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

#include "compvec/ensemble.hpp"
#include "compvec/errors.hpp"
#include "compvec/rng.hpp"
#include "test_util.hpp"

using namespace compvec;
using compvec::testing::TempDir;

namespace {

std::vector<std::pair<double, double>> random_pairs(std::uint64_t seed, std::size_t n) {
  Rng rng(seed);
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 0; i < n; ++i) out.emplace_back(rng.uniform(1e-6, 1 - 1e-6), rng.uniform(1e-6, 1 - 1e-6));
  return out;
}

EnsembleConfig cfg(double alpha, VoteMode mode = VoteMode::kSoft, TieBreak tb = TieBreak::kSvm) {
  EnsembleConfig c;
  c.alpha = alpha;
  c.mode = mode;
  c.tie_break = tb;
  return c;
}

}  // namespace

TEST(Ensemble, NamesRoundTrip) {
  EXPECT_EQ(parse_vote_mode(to_string(VoteMode::kHard)), VoteMode::kHard);
  EXPECT_EQ(parse_tie_break(to_string(TieBreak::kPositive)), TieBreak::kPositive);
  EXPECT_THROW(parse_vote_mode("median"), ConfigError);
  EXPECT_THROW(parse_tie_break("coin"), ConfigError);
}

TEST(Ensemble, WorkedExamples) {
  const auto v = ensemble_vote(0.8, 0.3, cfg(0.5));
  EXPECT_NEAR(v.probability, 0.55, 1e-15);
  EXPECT_TRUE(v.positive);
  EXPECT_FALSE(ensemble_vote(0.8, 0.1, cfg(0.5)).positive);
  EXPECT_TRUE(ensemble_vote(0.8, 0.1, cfg(0.9)).positive);
}

TEST(Ensemble, DegenerateWeightsReproduceSingleModels) {
  for (auto mode : {VoteMode::kSoft, VoteMode::kHard}) {
    for (const auto& [ps, pr] : random_pairs(1, 1000)) {
      ASSERT_EQ(ensemble_vote(ps, pr, cfg(1.0, mode)).positive, ps >= 0.5);
      ASSERT_EQ(ensemble_vote(ps, pr, cfg(0.0, mode)).positive, pr >= 0.5);
    }
  }
  EXPECT_EQ(ensemble_vote(0.5, 0.2, cfg(1.0)).positive, true);
}

TEST(Ensemble, SoftVoteIsAffineInAlpha) {
  for (double alpha : {0.2, 0.5, 0.85}) {
    for (const auto& [ps, pr] : random_pairs(2, 200)) {
      const auto v = ensemble_vote(ps, pr, cfg(alpha));
      ASSERT_NEAR(v.probability, alpha * ps + (1 - alpha) * pr, 1e-15);
      const auto lo = ensemble_vote(ps, pr, cfg(0.0)).probability;
      const auto hi = ensemble_vote(ps, pr, cfg(1.0)).probability;
      ASSERT_NEAR(v.probability, lo + alpha * (hi - lo), 1e-15);
    }
  }
}

TEST(Ensemble, DecisionsInvariantUnderSharedMonotoneRecalibration) {
  const auto f = [](double p) { return p * p / (p * p + (1 - p) * (1 - p)); };
  for (double alpha : {0.0, 1.0}) {
    for (const auto& [ps, pr] : random_pairs(3, 500)) {
      ASSERT_EQ(ensemble_vote(ps, pr, cfg(alpha)).positive, ensemble_vote(f(ps), f(pr), cfg(alpha)).positive);
    }
  }
}

TEST(Ensemble, TieBreaks) {
  // Soft: exact 0.5 average.
  EXPECT_TRUE(ensemble_vote(0.75, 0.25, cfg(0.5)).positive);
  EXPECT_FALSE(ensemble_vote(0.25, 0.75, cfg(0.5)).positive);
  EXPECT_TRUE(ensemble_vote(0.25, 0.75, cfg(0.5, VoteMode::kSoft, TieBreak::kPositive)).positive);
  // Hard: split vote at alpha 0.5.
  EXPECT_TRUE(ensemble_vote(0.9, 0.1, cfg(0.5, VoteMode::kHard)).positive);
  EXPECT_FALSE(ensemble_vote(0.1, 0.9, cfg(0.5, VoteMode::kHard)).positive);
  EXPECT_TRUE(ensemble_vote(0.1, 0.9, cfg(0.5, VoteMode::kHard, TieBreak::kPositive)).positive);
  EXPECT_EQ(ensemble_vote(0.1, 0.9, cfg(0.3, VoteMode::kHard)).probability, 0.7);
}

TEST(Ensemble, RangeErrors) {
  EXPECT_THROW(ensemble_vote(0.5, 0.5, cfg(1.5)), RangeError);
  EXPECT_THROW(ensemble_vote(0.5, 0.5, cfg(-0.1)), RangeError);
  EXPECT_THROW(ensemble_vote(0.0, 0.5, cfg(0.5)), RangeError);
  EXPECT_THROW(ensemble_vote(0.5, 1.0, cfg(0.5)), RangeError);
  EXPECT_THROW(ensemble_vote(std::nan(""), 0.5, cfg(0.5)), RangeError);
}

TEST(Ensemble, EvalAccuracyAndBestOfBoth) {
  const std::vector<double> ps{0.9, 0.8, 0.4, 0.3};
  const std::vector<double> pr{0.2, 0.9, 0.7, 0.1};
  const std::vector<int> y{1, 1, 1, -1};
  EXPECT_EQ(ensemble_eval(ps, pr, y, cfg(1.0)).accuracy, 0.75);
  EXPECT_EQ(ensemble_eval(ps, pr, y, cfg(0.0)).accuracy, 0.75);
  EXPECT_EQ(ensemble_eval(ps, pr, y, cfg(0.5)).accuracy, 1.0);
  EXPECT_EQ(ensemble_eval(ps, pr, y, cfg(0.5)).decisions.size(), 4u);
  EXPECT_THROW(ensemble_eval(ps, pr, std::vector<int>{1}, cfg(0.5)), DataError);
}

TEST(ProbabilityFiles, RoundTripExactly) {
  TempDir tmp;
  const std::vector<std::uint64_t> ids{4, 0, 17};
  const std::vector<double> p{0.1, 1.0 / 3.0, 0.999999999999};
  write_probabilities(tmp / "p.tsv", ids, p);
  const auto back = read_probabilities(tmp / "p.tsv");
  ASSERT_EQ(back.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(back[i].first, ids[i]);
    EXPECT_EQ(back[i].second, p[i]);
  }
  EXPECT_THROW(write_probabilities(tmp / "q.tsv", ids, std::vector<double>{0.5}), DataError);
  compvec::testing::write_text(tmp / "bad.tsv", "1\t0.5\n2 0.5\n");
  EXPECT_THROW(read_probabilities(tmp / "bad.tsv"), ParseError);
  compvec::testing::write_text(tmp / "bad2.tsv", "x\t0.5\n");
  EXPECT_THROW(read_probabilities(tmp / "bad2.tsv"), ParseError);
}
