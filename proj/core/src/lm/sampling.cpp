// Copyright 2026 The stamp Authors
// SPDX-License-Identifier: Apache-2.0

#include "stamp/lm/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace stamp::lm {

std::vector<int> Prefix(std::span<const int> prompt) {
  std::vector<int> ids;
  ids.reserve(prompt.size() + 2);
  ids.push_back(Tokenizer::kBos);
  ids.insert(ids.end(), prompt.begin(), prompt.end());
  ids.push_back(Tokenizer::kSep);
  return ids;
}

int NucleusDraw(std::span<const float> logits, double temperature, double top_p, std::mt19937_64& rng) {
  if (!(temperature > 0.0)) throw Error(ErrorCode::kConfigError, "temperature must be > 0");
  if (!(top_p > 0.0 && top_p <= 1.0)) throw Error(ErrorCode::kConfigError, "top_p must be in (0, 1]");
  const int n = static_cast<int>(logits.size());
  std::vector<double> prob(n);
  double mx = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) mx = std::max(mx, static_cast<double>(logits[i]) / temperature);
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    prob[i] = std::exp(static_cast<double>(logits[i]) / temperature - mx);
    total += prob[i];
  }
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  if (top_p >= 1.0) {
    // The full distribution; id order is equivalent to sorted order here.
    const double u = unif(rng) * total;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      acc += prob[i];
      if (u < acc) return i;
    }
    for (int i = n - 1; i >= 0; --i)
      if (prob[i] > 0.0) return i;
    return n - 1;
  }
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return prob[a] > prob[b]; });
  const double need = top_p * total;
  double kept = 0.0;
  int cut = 0;
  while (cut < n) {
    kept += prob[order[cut]];
    ++cut;
    if (kept >= need) break;
  }
  const double u = unif(rng) * kept;
  double acc = 0.0;
  for (int i = 0; i < cut; ++i) {
    acc += prob[order[i]];
    if (u < acc) return order[i];
  }
  return order[cut - 1];
}

std::vector<int> Sample(const Model& model, std::span<const int> prompt, const SampleParams& params,
                        std::uint64_t seed) {
  return SampleMany(model, prompt, 1, params, seed).front();
}

std::vector<std::vector<int>> SampleMany(const Model& model, std::span<const int> prompt, int n,
                                         const SampleParams& params, std::uint64_t seed) {
  const std::vector<int> prefix = Prefix(prompt);
  const int ctx = model.config().context_len;
  if (static_cast<int>(prefix.size()) >= ctx)
    throw Error(ErrorCode::kContextOverflow, "prompt of " + std::to_string(prompt.size()) +
                                                 " tokens leaves no room in context " + std::to_string(ctx));
  std::vector<std::vector<int>> out(n);
  if (n <= 0) return out;
  const int max_len = std::min(params.max_len, ctx - static_cast<int>(prefix.size()));
  std::vector<std::mt19937_64> rngs;
  rngs.reserve(n);
  for (int i = 0; i < n; ++i) rngs.emplace_back(DeriveSeed(seed, {static_cast<std::uint64_t>(i)}));

  auto dec = model.MakeDecoder();
  const Model::RowVector first = dec.Prefill(prefix, n);
  std::vector<int> live(n);
  std::iota(live.begin(), live.end(), 0);
  std::vector<int> next(n);
  const std::span<const float> first_row(first.data(), static_cast<std::size_t>(first.size()));
  for (int i = 0; i < n; ++i) next[i] = NucleusDraw(first_row, params.temperature, params.top_p, rngs[i]);

  for (int step = 0;; ++step) {
    std::vector<int> keep_rows, keep_seqs, tokens;
    for (std::size_t r = 0; r < live.size(); ++r) {
      const int seq = live[r];
      if (next[r] == Tokenizer::kEos) continue;
      out[seq].push_back(next[r]);
      if (static_cast<int>(out[seq].size()) >= max_len) continue;
      keep_rows.push_back(static_cast<int>(r));
      keep_seqs.push_back(seq);
      tokens.push_back(next[r]);
    }
    if (keep_rows.empty()) break;
    if (keep_rows.size() != live.size()) dec.Retain(keep_rows);
    live = std::move(keep_seqs);
    const Model::Matrix logits = dec.Step(tokens);
    next.resize(live.size());
    for (std::size_t r = 0; r < live.size(); ++r)
      next[r] = NucleusDraw({logits.data() + r * logits.cols(), static_cast<std::size_t>(logits.cols())},
                            params.temperature, params.top_p, rngs[live[r]]);
  }
  return out;
}

template <typename T>
SequenceScore SequenceLogprob(const Transformer<T>& model, std::span<const int> prompt,
                              std::span<const int> output) {
  SequenceScore s;
  s.count = static_cast<int>(output.size());
  if (output.empty()) return s;
  std::vector<int> ids = Prefix(prompt);
  const std::size_t start = ids.size() - 1;
  ids.insert(ids.end(), output.begin(), output.end());
  ids.pop_back();  // the last output token is never an input
  const auto logits = model.Logits(ids);
  for (std::size_t i = 0; i < output.size(); ++i) {
    const auto row = logits.row(static_cast<Eigen::Index>(start + i));
    double mx = -std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < row.size(); ++j) mx = std::max(mx, static_cast<double>(row(j)));
    double z = 0.0;
    for (Eigen::Index j = 0; j < row.size(); ++j) z += std::exp(static_cast<double>(row(j)) - mx);
    s.logprob += static_cast<double>(row(output[i])) - mx - std::log(z);
  }
  return s;
}

template SequenceScore SequenceLogprob(const Transformer<float>&, std::span<const int>, std::span<const int>);
template SequenceScore SequenceLogprob(const Transformer<double>&, std::span<const int>, std::span<const int>);

double ModelScore(const Model& model, std::span<const int> prompt, std::span<const int> output) {
  if (output.empty()) throw Error(ErrorCode::kEmptyOutput, "model score of an empty output");
  const SequenceScore s = SequenceLogprob(model, prompt, output);
  return std::exp(s.logprob / s.count);
}

}  // namespace stamp::lm
