// Copyright 2026 The stamp Authors
// SPDX-License-Identifier: Apache-2.0

// Decoding and scoring. A prompt is laid out as [BOS] prompt [SEP] and the
// output follows it; generation stops at [EOS], which is not returned.

#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "stamp/lm/model.hpp"
#include "stamp/lm/tokenizer.hpp"

namespace stamp::lm {

struct SampleParams {
  double temperature = 1.0;
  double top_p = 1.0;
  int max_len = 14;
};

/// [BOS] prompt [SEP].
std::vector<int> Prefix(std::span<const int> prompt);

/// Draws one id from `logits` by nucleus sampling: scale by 1/temperature,
/// keep the smallest descending-probability prefix whose mass reaches top_p
/// (ties ordered by id), renormalize.
int NucleusDraw(std::span<const float> logits, double temperature, double top_p, std::mt19937_64& rng);

/// Output ids sampled after the prompt. Throws Error(kContextOverflow) when
/// the prompt leaves no room for output; generation is otherwise truncated at
/// the context limit.
std::vector<int> Sample(const Model& model, std::span<const int> prompt, const SampleParams& params,
                        std::uint64_t seed);

/// `n` independent samples sharing one prompt pass. Sample i uses a stream
/// seeded with DeriveSeed(seed, {i}).
std::vector<std::vector<int>> SampleMany(const Model& model, std::span<const int> prompt, int n,
                                         const SampleParams& params, std::uint64_t seed);

struct SequenceScore {
  double logprob = 0.0;
  int count = 0;
};

/// Sum of log p(output[i] | prefix, output[<i]). Throws kContextOverflow.
template <typename T>
SequenceScore SequenceLogprob(const Transformer<T>& model, std::span<const int> prompt,
                              std::span<const int> output);

/// exp(logprob / count), the geometric mean token probability. Throws
/// Error(kEmptyOutput) on an empty output.
double ModelScore(const Model& model, std::span<const int> prompt, std::span<const int> output);

}  // namespace stamp::lm
