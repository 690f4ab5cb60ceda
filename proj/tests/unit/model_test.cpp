// Copyright 2026 The stamp Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <numeric>

#include "stamp/lm/model.hpp"

namespace stamp::lm {
namespace {

ModelConfig Small(int vocab = 40) {
  ModelConfig c;
  c.layers = 2;
  c.model_dim = 16;
  c.heads = 2;
  c.context_len = 20;
  c.vocab_size = vocab;
  return c;
}

TEST(ModelConfig, RejectsIndivisibleHeads) {
  ModelConfig c = Small();
  c.heads = 3;
  EXPECT_THROW(c.Validate(), Error);
}

TEST(Layout, TensorsAreAlignedAndDisjoint) {
  const auto layout = ParameterLayout(Small());
  std::size_t end = 0;
  for (const auto& t : layout) {
    EXPECT_EQ(t.offset % kTensorAlign, 0u) << t.name;
    EXPECT_GE(t.offset, end) << t.name;
    end = t.offset + t.size();
  }
  EXPECT_LE(end, ParameterCount(Small()));
}

TEST(Forward, DeterministicBitwise) {
  Model m(Small(), 1);
  const std::vector<int> ids{1, 7, 9, 3, 12};
  const auto a = m.Logits(ids);
  const auto b = m.Logits(ids);
  EXPECT_TRUE((a.array() == b.array()).all());
}

TEST(Forward, PerturbingTokenLeavesEarlierPositionsUnchanged) {
  Model m(Small(), 2);
  std::vector<int> ids{1, 7, 9, 3, 12, 30, 5};
  const auto base = m.Logits(ids);
  for (std::size_t j = 0; j < ids.size(); ++j) {
    auto other = ids;
    other[j] = (other[j] + 11) % 40;
    const auto pert = m.Logits(other);
    for (std::size_t i = 0; i < j; ++i)
      EXPECT_TRUE((base.row(i).array() == pert.row(i).array()).all()) << "i=" << i << " j=" << j;
    EXPECT_FALSE((base.row(j).array() == pert.row(j).array()).all());
  }
}

TEST(Forward, AppendingSuffixLeavesPrefixLogits) {
  Model m(Small(), 3);
  const std::vector<int> ids{1, 7, 9, 3};
  std::vector<int> longer = ids;
  longer.push_back(22);
  const auto a = m.Logits(ids);
  const auto b = m.Logits(longer);
  EXPECT_LT((a - b.topRows(4)).cwiseAbs().maxCoeff(), 1e-6f);
}

TEST(Forward, FreshModelIsNearUniform) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Model m(Small(64), seed);
    const auto logits = m.Logits(std::vector<int>{1, 10, 20, 30, 3});
    for (Eigen::Index r = 0; r < logits.rows(); ++r) {
      const auto e = (logits.row(r).array() - logits.row(r).maxCoeff()).exp();
      EXPECT_LT(e.maxCoeff() / e.sum(), 0.1f);
    }
  }
}

TEST(Forward, SoftmaxRowsSumToOne) {
  Model m(Small(), 4);
  const auto logits = m.Logits(std::vector<int>{1, 2, 3, 4, 5, 6});
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    const auto e = (logits.row(r).cast<double>().array() - logits.row(r).cast<double>().maxCoeff()).exp();
    EXPECT_NEAR((e / e.sum()).sum(), 1.0, 1e-6);
    EXPECT_TRUE(logits.row(r).allFinite());
  }
}

TEST(Forward, OverlongInputRaisesContextOverflow) {
  Model m(Small(), 5);
  std::vector<int> ids(21, 5);
  try {
    m.Logits(ids);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kContextOverflow);
  }
}

TEST(Decoder, IncrementalLogitsMatchFullForward) {
  Model m(Small(), 6);
  const std::vector<int> prompt{1, 8, 9, 3};
  const std::vector<std::vector<int>> conts{{11, 12, 13}, {14, 15, 16}, {17, 18, 19}};
  auto dec = m.MakeDecoder();
  const auto first = dec.Prefill(prompt, 3);
  EXPECT_LT((first - m.Logits(prompt).row(3)).cwiseAbs().maxCoeff(), 1e-5f);
  for (int step = 0; step < 3; ++step) {
    std::vector<int> toks;
    for (const auto& c : conts) toks.push_back(c[step]);
    const auto logits = dec.Step(toks);
    for (int b = 0; b < 3; ++b) {
      std::vector<int> full = prompt;
      full.insert(full.end(), conts[b].begin(), conts[b].begin() + step + 1);
      EXPECT_LT((logits.row(b) - m.Logits(full).bottomRows(1)).cwiseAbs().maxCoeff(), 1e-5f) << b << " " << step;
    }
  }
}

TEST(Decoder, RetainKeepsSelectedSequences) {
  Model m(Small(), 7);
  const std::vector<int> prompt{1, 8, 3};
  auto dec = m.MakeDecoder();
  dec.Prefill(prompt, 3);
  dec.Step(std::vector<int>{20, 21, 22});
  const std::vector<int> keep{2};
  dec.Retain(keep);
  EXPECT_EQ(dec.live(), 1);
  const auto logits = dec.Step(std::vector<int>{25});
  const auto full = m.Logits(std::vector<int>{1, 8, 3, 22, 25});
  EXPECT_LT((logits.row(0) - full.bottomRows(1)).cwiseAbs().maxCoeff(), 1e-5f);
}

TEST(Decoder, StopsAtContextLimit) {
  Model m(Small(), 8);
  auto dec = m.MakeDecoder();
  dec.Prefill(std::vector<int>(20, 5), 1);
  EXPECT_THROW(dec.Step(std::vector<int>{5}), Error);
}

TEST(Cast, FloatDoubleFloatRoundTripIsExact) {
  Model m(Small(), 9);
  const Model back = m.Cast<double>().Cast<float>();
  EXPECT_TRUE(std::equal(m.params().begin(), m.params().end(), back.params().begin()));
}

}  // namespace
}  // namespace stamp::lm
