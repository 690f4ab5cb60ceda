// Copyright 2026 The stamp Authors
// SPDX-License-Identifier: Apache-2.0

#include "stamp/rewards.hpp"

#include <gtest/gtest.h>

#include <random>

namespace stamp::rewards {
namespace {

using world::World;

World TestWorld() {
  world::Lexicon lex({{"cat", "kitten"}, {"runs", "sprints"}, {"sits", "rests"}, {"dog", "hound"}, {"sun", "star"}});
  return World(std::move(lex),
               {{0, "shout", world::Renderer::kUppercase},
                {1, "mirror", world::Renderer::kReverse},
                {2, "kiss", world::Renderer::kSuffix}},
               {{"core", {0, 1, 2, 3, 4}, {0, 1, 2}}});
}

TEST(TssTest, Examples) {
  const World w = TestWorld();
  const auto& up = w.style(0);
  EXPECT_EQ(TssScore(world::RenderStyle({"cat", "runs"}, up, w.lexicon()).tokens, up, w.lexicon()), 1.0);
  EXPECT_EQ(TssScore({"CAT", "runs"}, up, w.lexicon()), 0.5);
  EXPECT_EQ(TssScore({}, up, w.lexicon()), 0.0);
  EXPECT_EQ(TssScore({"CAT", "zzz", "tac", "RUNS"}, up, w.lexicon()), 0.5);
}

TEST(MsTest, Examples) {
  const World w = TestWorld();
  EXPECT_EQ(MsScore({"cat", "runs"}, {"cat", "runs"}, w), 1.0);
  // Full synonym substitution, rendered.
  EXPECT_EQ(MsScore({"cat", "runs"}, {"nettik", "stnirps"}, w), 1.0);
  EXPECT_EQ(MsScore({"cat", "runs"}, {"cat", "sits"}, w), 0.5);
  EXPECT_EQ(MsScore({"cat"}, {}, w), 0.0);
  EXPECT_EQ(MsScore({"zzz"}, {"cat"}, w), 0.0);
  // Multisets: {cat:2, runs:1} vs {cat:1, dog:1} -> 2*1/(3+2).
  EXPECT_DOUBLE_EQ(MsScore({"cat", "kitten", "runs"}, {"CAT", "dog"}, w), 2.0 / 5.0);
}

TEST(MsTest, SymmetricAndBounded) {
  const World w = TestWorld();
  std::mt19937_64 rng(5);
  const Tokens pool{"cat", "KITTEN", "tac", "runsxo", "sits", "zzz", "DOG", "nus", "star", "qq"};
  for (int trial = 0; trial < 2000; ++trial) {
    Tokens a, b;
    for (std::size_t i = 0, n = rng() % 6; i < n; ++i) a.push_back(pool[rng() % pool.size()]);
    for (std::size_t i = 0, n = rng() % 6; i < n; ++i) b.push_back(pool[rng() % pool.size()]);
    const double ab = MsScore(a, b, w);
    EXPECT_EQ(ab, MsScore(b, a, w));
    EXPECT_GE(ab, 0.0);
    EXPECT_LE(ab, 1.0);
  }
}

TEST(FluencyTest, Examples) {
  const World w = TestWorld();
  EXPECT_EQ(FScore({"cat", "runs", "dog", "sun"}, w), 1.0);
  EXPECT_EQ(FScore({"cat", "cat", "cat", "cat"}, w), 0.25);
  EXPECT_DOUBLE_EQ(FScore({"cat", "zzz", "runs"}, w), 2.0 / 3.0);
  EXPECT_EQ(FScore({}, w), 0.0);
  // Outside [3, 12] the score is halved.
  EXPECT_EQ(FScore({"cat", "runs"}, w), 0.5);
  Tokens long_text;
  for (int i = 0; i < 13; ++i) long_text.push_back(i % 2 ? "CAT" : "cat");
  EXPECT_DOUBLE_EQ(FScore(long_text, w), 0.5 * (2.0 / 13.0));
}

TEST(AggregateTest, Examples) {
  EXPECT_EQ(Aggregate({1, 1, 1}, {3, 5, 2, 6}), 1.0);
  EXPECT_EQ(Aggregate({0.5, 1, 1}, {2, 1, 1, 6}), 0.25);
  EXPECT_EQ(Aggregate({0.8, 0.9, 0.7}, {1, 1, 1, 6}), 0.8 * 0.9 * 0.7);
  EXPECT_NEAR(Aggregate({0.8, 0.9, 0.7}, {1, 1, 1, 6}), 0.504, 1e-12);
  EXPECT_EQ(Aggregate({0.8, 0.9, 0.7}, {2, 3, 1, 6}), 0.8 * 0.8 * (0.9 * 0.9 * 0.9) * 0.7);
}

TEST(AggregateTest, MonotoneInEachReward) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const RewardVector a{u(rng), u(rng), u(rng)};
    RewardVector b = a;
    b.ms = std::min(1.0, a.ms + u(rng) * 0.1);
    const AggWeights w{1 + static_cast<int>(rng() % 6), 1 + static_cast<int>(rng() % 6),
                       1 + static_cast<int>(rng() % 6), 6};
    EXPECT_LE(Aggregate(a, w), Aggregate(b, w));
  }
}

TEST(ReversedTest, Examples) {
  using P = std::pair<RewardVector, RewardVector>;
  const std::vector<P> one{{{.9, .2, .5}, {.1, .8, .5}}};
  EXPECT_EQ(CountReversed(one), (ReversedCounts{0, 1, 0}));
  EXPECT_EQ(CountReversed(std::vector<P>{}), (ReversedCounts{0, 0, 0}));
  const std::vector<P> tie{{{.5, .5, .5}, {.5, .5, .5}}};
  EXPECT_EQ(CountReversed(tie), (ReversedCounts{0, 0, 0}));
  const std::vector<P> many{{{.1, .2, .3}, {.2, .3, .4}}, {{.5, .5, .5}, {.4, .6, .5}}};
  EXPECT_EQ(CountReversed(many), (ReversedCounts{1, 2, 1}));
}

TEST(ScoreTest, CombinesOracles) {
  const World w = TestWorld();
  const Tokens src{"cat", "runs", "dog"};
  const Tokens out{"tac", "snur", "zzz"};
  const RewardVector rv = Score(src, out, 1, w);
  EXPECT_DOUBLE_EQ(rv.tss, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(rv.ms, 2.0 * 2 / 5.0);
  EXPECT_DOUBLE_EQ(rv.f, 2.0 / 3.0);
}

TEST(WeightsTest, Validity) {
  EXPECT_TRUE((AggWeights{1, 1, 1, 6}.Valid()));
  EXPECT_TRUE((AggWeights{6, 6, 6, 6}.Valid()));
  EXPECT_FALSE((AggWeights{0, 1, 1, 6}.Valid()));
  EXPECT_FALSE((AggWeights{1, 7, 1, 6}.Valid()));
}

}  // namespace
}  // namespace stamp::rewards
