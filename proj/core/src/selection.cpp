// Copyright 2026 The stamp Authors
// SPDX-License-Identifier: Apache-2.0

#include "stamp/selection.hpp"

#include <cmath>
#include <random>
#include <set>

namespace stamp::po {

std::size_t DistinctCount(const CandidatePool& pool) {
  std::set<Tokens> texts;
  for (const auto& c : pool) texts.insert(c.text);
  return texts.size();
}

namespace {

// First index maximizing score(i) over i != skip.
template <typename Score>
std::size_t ArgMax(std::size_t n, Score&& score, std::size_t skip = static_cast<std::size_t>(-1)) {
  std::size_t best = static_cast<std::size_t>(-1);
  double best_score = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i == skip) continue;
    const double s = score(i);
    if (best == static_cast<std::size_t>(-1) || s > best_score) {
      best = i;
      best_score = s;
    }
  }
  return best;
}

}  // namespace

PairChoice SelectPair(const CandidatePool& pool, const SelectorConfig& config,
                      const rewards::AggWeights& weights, std::uint64_t pool_seed) {
  if (DistinctCount(pool) < 2)
    throw Error(ErrorCode::kDegeneratePool, "pool has fewer than two distinct candidates");
  const std::size_t n = pool.size();
  std::vector<double> reward(n);
  std::vector<double> prior(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    reward[i] = rewards::Aggregate(pool[i].rewards, weights);
    if (config.use_model_score) prior[i] = std::pow(pool[i].m, config.tau_m);
  }

  PairChoice choice;
  choice.winner = ArgMax(n, [&](std::size_t i) { return prior[i] + reward[i]; });

  switch (config.loser_rule) {
    case LoserRule::kHopeFear:
      if (config.use_model_score) {
        choice.loser = ArgMax(n, [&](std::size_t i) { return prior[i] - reward[i]; });
      } else {
        choice.loser = ArgMax(n, [&](std::size_t i) { return -reward[i]; }, choice.winner);
      }
      break;
    case LoserRule::kHigh:
      choice.loser = ArgMax(n, [&](std::size_t i) { return reward[i]; }, choice.winner);
      break;
    case LoserRule::kRandom: {
      std::mt19937_64 rng(pool_seed);
      const auto draw = std::uniform_int_distribution<std::size_t>(0, n - 2)(rng);
      choice.random_draw = static_cast<long>(draw);
      choice.loser = draw < choice.winner ? draw : draw + 1;
      break;
    }
  }

  if (config.use_model_score && config.loser_rule == LoserRule::kHopeFear) {
    choice.kept = choice.winner != choice.loser && pool[choice.winner].text != pool[choice.loser].text;
  } else {
    choice.kept = reward[choice.loser] < reward[choice.winner];
  }
  return choice;
}

}  // namespace stamp::po
