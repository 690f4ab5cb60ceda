// Copyright 2026 The stamp Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>

#include "stamp/lm/tokenizer.hpp"
#include "stamp/lm/trainer.hpp"
#include "support/gradcheck.hpp"

namespace stamp::lm {
namespace {

TEST(Losses, CrossEntropyIsTokenMeanNll) {
  const GroupLoss ce = CrossEntropyLoss();
  const double lp[] = {-6.0};
  const int n[] = {3};
  double d[1];
  EXPECT_DOUBLE_EQ(ce(lp, n, d), 2.0);
  EXPECT_DOUBLE_EQ(d[0], -1.0 / 3.0);
}

TEST(Losses, CpoPreferenceTermAtZeroMarginIsLog2) {
  EXPECT_DOUBLE_EQ(CpoPreferenceTerm(0.0, 0.1), std::log(2.0));
}

TEST(Losses, CpoPreferenceTermClosedForm) {
  // -log sigmoid(1) = log(1 + e^-1)
  EXPECT_NEAR(CpoPreferenceTerm(10.0, 0.1), std::log1p(std::exp(-1.0)), 1e-15);
  EXPECT_NEAR(CpoPreferenceTerm(10.0, 0.1), 0.3133, 5e-5);
}

TEST(Losses, CpoPreferenceTermStrictlyDecreasing) {
  double prev = CpoPreferenceTerm(-50.0, 0.1);
  for (double m = -49.5; m <= 50.0; m += 0.5) {
    const double v = CpoPreferenceTerm(m, 0.1);
    EXPECT_LT(v, prev) << m;
    prev = v;
  }
}

TEST(Losses, CpoClosureMatchesFormulaAndDerivative) {
  const GroupLoss cpo = CpoLoss(0.1, 1.0);
  const double lp[] = {-4.0, -9.0};
  const int n[] = {4, 6};
  double d[2];
  const double v = cpo(lp, n, d);
  const double z = 0.1 * 5.0;
  EXPECT_NEAR(v, -std::log(1.0 / (1.0 + std::exp(-z))) + 1.0, 1e-15);
  const double h = 1e-6;
  for (int k = 0; k < 2; ++k) {
    double up[] = {lp[0], lp[1]}, dn[] = {lp[0], lp[1]}, tmp[2];
    up[k] += h;
    dn[k] -= h;
    EXPECT_NEAR(d[k], (cpo(up, n, tmp) - cpo(dn, n, tmp)) / (2 * h), 1e-8);
  }
}

TEST(Gradient, FrozenInputQuadraticMatchesAnalytic) {
  // L = 0.5 * lp^2 as a function of the sequence log-prob alone; its
  // derivative reported by the closure is exactly lp.
  const GroupLoss quad = [](std::span<const double> lp, std::span<const int>, std::span<double> d) {
    d[0] = lp[0];
    return 0.5 * lp[0] * lp[0];
  };
  const double lp[] = {-3.5};
  const int n[] = {2};
  double d[1];
  EXPECT_DOUBLE_EQ(quad(lp, n, d), 0.5 * 3.5 * 3.5);
  EXPECT_DOUBLE_EQ(d[0], -3.5);
}

TEST(Gradient, CrossEntropyMatchesFiniteDifferences) {
  std::mt19937_64 rng(11);
  const auto model = testing::RandomModel(12, 3);
  std::vector<Group> groups;
  for (int i = 0; i < 2; ++i)
    groups.push_back({{testing::RandomIds(12, 3, rng), testing::RandomIds(12, 4, rng)}});
  const auto r = testing::CheckGradient(model, groups, CrossEntropyLoss());
  EXPECT_LE(r.max_rel_error, 1e-4);
  EXPECT_GT(r.max_abs_grad, 1e-3);
}

TEST(Gradient, CpoMatchesFiniteDifferences) {
  std::mt19937_64 rng(12);
  const auto model = testing::RandomModel(12, 4);
  const auto prompt = testing::RandomIds(12, 3, rng);
  std::vector<Group> groups{{{prompt, testing::RandomIds(12, 4, rng)}, {prompt, testing::RandomIds(12, 2, rng)}}};
  const auto r = testing::CheckGradient(model, groups, CpoLoss(0.1, 1.0));
  EXPECT_LE(r.max_rel_error, 1e-4);
}

TEST(Gradient, NonFiniteLossRaisesNumericalFailure) {
  const auto model = testing::RandomModel(12, 5);
  const GroupLoss bad = [](std::span<const double>, std::span<const int>, std::span<double> d) {
    d[0] = 0.0;
    return std::nan("");
  };
  const Group g{{{5, 6}, {7, 2}}};
  std::vector<double> grad(model.num_params());
  try {
    GroupLossGrad(model, g, bad, std::span<double>(grad));
    FAIL() << "expected NumericalFailure";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNumericalFailure);
  }
}

ModelConfig ToyConfig(int vocab) {
  ModelConfig c;
  c.layers = 2;
  c.model_dim = 32;
  c.heads = 2;
  c.context_len = 24;
  c.vocab_size = vocab;
  return c;
}

std::vector<Group> ToyCopyTask(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Group> out;
  for (int i = 0; i < n; ++i) {
    auto x = testing::RandomIds(20, 4, rng);
    auto y = x;
    std::reverse(y.begin(), y.end());
    y.push_back(Tokenizer::kEos);
    out.push_back({{x, y}});
  }
  return out;
}

TEST(Training, LossDecreasesOnToyTask) {
  Model model(ToyConfig(20), 0);
  Adam adam(model.num_params());
  const auto data = ToyCopyTask(50, 1);
  const auto h = TrainGroups(model, adam, data, data, CrossEntropyLoss(), {10, 8, 3e-3}, 0);
  ASSERT_EQ(h.train_loss.size(), 10u);
  EXPECT_LE(h.valid_loss.back(), 0.5 * h.initial_valid_loss);
}

TEST(Training, DeterministicUnderSeed) {
  const auto data = ToyCopyTask(20, 2);
  auto run = [&] {
    Model model(ToyConfig(20), 7);
    Adam adam(model.num_params());
    TrainGroups(model, adam, data, {}, CrossEntropyLoss(), {2, 4, 1e-3}, 9);
    return std::vector<float>(model.params().begin(), model.params().end());
  };
  EXPECT_EQ(run(), run());
}

TEST(Training, JobsDoNotChangeResult) {
  const auto data = ToyCopyTask(12, 3);
  auto run = [&](int jobs) {
    Model model(ToyConfig(20), 7);
    Adam adam(model.num_params());
    TrainGroups(model, adam, data, {}, CrossEntropyLoss(), {1, 6, 1e-3}, 9, jobs);
    return std::vector<float>(model.params().begin(), model.params().end());
  };
  EXPECT_EQ(run(1), run(3));
}

TEST(Training, ZeroEpochsIsNoOp) {
  Model model(ToyConfig(20), 7);
  const std::vector<float> before(model.params().begin(), model.params().end());
  Adam adam(model.num_params());
  TrainGroups(model, adam, ToyCopyTask(5, 4), {}, CrossEntropyLoss(), {0, 4, 1e-3}, 9);
  EXPECT_EQ(before, std::vector<float>(model.params().begin(), model.params().end()));
}

TEST(Adam, ZeroGradientLeavesParametersUnchanged) {
  std::vector<float> p{0.5f, -1.0f, 2.0f};
  std::vector<float> g(3, 0.0f);
  Adam adam(3);
  adam.Step(p, g, 0.1);
  EXPECT_EQ(p, (std::vector<float>{0.5f, -1.0f, 2.0f}));
}

TEST(Adam, FirstStepMovesByLearningRate) {
  // With bias correction the first update is lr * g / (|g| + eps).
  std::vector<float> p{1.0f, 1.0f};
  std::vector<float> g{0.3f, -0.2f};
  Adam adam(2, {0.9, 0.999, 1e-8, 0.0});
  adam.Step(p, g, 0.01);
  EXPECT_NEAR(p[0], 0.99f, 1e-6);
  EXPECT_NEAR(p[1], 1.01f, 1e-6);
}

TEST(Adam, ClipsGlobalNorm) {
  std::vector<float> p{0.0f, 0.0f};
  std::vector<float> g{3.0f, 4.0f};
  Adam adam(2);
  const double norm = adam.Step(p, g, 0.0);
  EXPECT_DOUBLE_EQ(norm, 5.0);
  EXPECT_NEAR(g[0], 0.6f, 1e-7);
  EXPECT_NEAR(g[1], 0.8f, 1e-7);
}

}  // namespace
}  // namespace stamp::lm
