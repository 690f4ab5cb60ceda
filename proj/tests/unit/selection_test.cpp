// Copyright 2026 The stamp Authors
// SPDX-License-Identifier: Apache-2.0

#include "stamp/selection.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>

namespace stamp::po {
namespace {

// Candidates whose aggregate under unit weights is exactly `r` (tss = r).
CandidatePool PoolWithRewards(const std::vector<double>& r, const std::vector<double>& m = {}) {
  CandidatePool pool;
  for (std::size_t i = 0; i < r.size(); ++i)
    pool.push_back({{"t" + std::to_string(i)}, m.empty() ? 1.0 : m[i], {r[i], 1.0, 1.0}});
  return pool;
}

const rewards::AggWeights kUnit{1, 1, 1, 6};

TEST(SelectPairTest, RewardOnly) {
  const PairChoice c = SelectPair(PoolWithRewards({0.2, 0.8, 0.1}), {}, kUnit);
  EXPECT_EQ(c.winner, 1u);
  EXPECT_EQ(c.loser, 2u);
  EXPECT_TRUE(c.kept);
}

TEST(SelectPairTest, WithModelScore) {
  SelectorConfig cfg;
  cfg.use_model_score = true;
  cfg.tau_m = 1.0;
  const PairChoice c = SelectPair(PoolWithRewards({0.2, 0.8, 0.1}, {0.9, 0.5, 0.7}), cfg, kUnit);
  EXPECT_EQ(c.winner, 1u);  // [1.1, 1.3, 0.8]
  EXPECT_EQ(c.loser, 0u);   // [0.7, -0.3, 0.6]
  EXPECT_TRUE(c.kept);
}

TEST(SelectPairTest, EqualRewardsTieBreakAndDrop) {
  // Ties go to the lowest index; without a strict reward gap the pair is not
  // a preference and is dropped.
  const PairChoice c = SelectPair(PoolWithRewards({0.5, 0.5}), {}, kUnit);
  EXPECT_EQ(c.winner, 0u);
  EXPECT_EQ(c.loser, 1u);
  EXPECT_FALSE(c.kept);
}

TEST(SelectPairTest, ModelScoreSameRewriteDropped) {
  SelectorConfig cfg;
  cfg.use_model_score = true;
  cfg.tau_m = 1.0;
  // Candidate 0 has by far the highest m, so it wins both criteria.
  const PairChoice c = SelectPair(PoolWithRewards({0.3, 0.2}, {1.0, 0.01}), cfg, kUnit);
  EXPECT_EQ(c.winner, 0u);
  EXPECT_EQ(c.loser, 0u);
  EXPECT_FALSE(c.kept);
}

TEST(SelectPairTest, DegeneratePool) {
  CandidatePool pool = PoolWithRewards({0.1, 0.2});
  pool[1].text = pool[0].text;
  try {
    SelectPair(pool, {}, kUnit);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegeneratePool);
  }
}

TEST(SelectPairTest, HighLoserIsRunnerUp) {
  SelectorConfig cfg;
  cfg.loser_rule = LoserRule::kHigh;
  const PairChoice c = SelectPair(PoolWithRewards({0.2, 0.8, 0.1, 0.7, 0.7}), cfg, kUnit);
  EXPECT_EQ(c.winner, 1u);
  EXPECT_EQ(c.loser, 3u);
  EXPECT_TRUE(c.kept);
}

TEST(SelectPairTest, RandomLoserIsUniformOverNonWinners) {
  SelectorConfig cfg;
  cfg.loser_rule = LoserRule::kRandom;
  const CandidatePool pool = PoolWithRewards({0.2, 0.1, 0.9, 0.3, 0.05});
  std::map<std::size_t, int> hits;
  const int n = 8000;
  for (int s = 0; s < n; ++s) {
    const PairChoice c = SelectPair(pool, cfg, kUnit, DeriveSeed(17, {static_cast<std::uint64_t>(s)}));
    ASSERT_EQ(c.winner, 2u);
    ASSERT_NE(c.loser, 2u);
    ASSERT_EQ(c.loser, static_cast<std::size_t>(c.random_draw) + (c.random_draw >= 2 ? 1 : 0));
    ++hits[c.loser];
  }
  ASSERT_EQ(hits.size(), 4u);
  // Each of four outcomes: expected n/4, sd sqrt(n * 1/4 * 3/4).
  const double sd = std::sqrt(n * 0.25 * 0.75);
  for (const auto& [idx, k] : hits) EXPECT_NEAR(k, n / 4.0, 4 * sd) << idx;
}

TEST(SelectPairTest, RandomPoolsDominance) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + rng() % 9;
    std::vector<double> r(n), m(n);
    for (std::size_t i = 0; i < n; ++i) {
      // Coarse grid to force ties.
      r[i] = std::round(u(rng) * 5) / 5;
      m[i] = 0.05 + std::round(u(rng) * 4) / 5;
    }
    for (bool enabled : {false, true}) {
      SelectorConfig cfg;
      cfg.use_model_score = enabled;
      cfg.tau_m = 0.5;
      const PairChoice c = SelectPair(PoolWithRewards(r, m), cfg, kUnit);
      auto win = [&](std::size_t i) { return (enabled ? std::pow(m[i], 0.5) : 0.0) + r[i]; };
      auto lose = [&](std::size_t i) { return (enabled ? std::pow(m[i], 0.5) : 0.0) - r[i]; };
      for (std::size_t i = 0; i < n; ++i) {
        EXPECT_LE(win(i), win(c.winner));
        if (i < c.winner) EXPECT_LT(win(i), win(c.winner));
        if (enabled || i != c.winner) {
          EXPECT_LE(lose(i), lose(c.loser));
          if (i < c.loser && (enabled || i != c.winner)) EXPECT_LT(lose(i), lose(c.loser));
        }
      }
      if (!enabled) {
        EXPECT_NE(c.winner, c.loser);
        EXPECT_EQ(c.kept, r[c.winner] > r[c.loser]);
      }
    }
  }
}

}  // namespace
}  // namespace stamp::po
