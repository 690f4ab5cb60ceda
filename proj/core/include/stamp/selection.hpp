// Copyright 2026 The stamp Authors
// SPDX-License-Identifier: Apache-2.0

// Candidate pools and hope-and-fear preference pair selection.

#pragma once

#include <cstdint>
#include <vector>

#include "stamp/rewards.hpp"

namespace stamp::po {

/// One sampled rewrite with its reference-model score M and reward vector.
struct Candidate {
  Tokens text;
  double m = 1.0;
  rewards::RewardVector rewards;
};

using CandidatePool = std::vector<Candidate>;

/// How the losing rewrite is chosen. kHopeFear is the default; the other two
/// exist for ablations.
enum class LoserRule { kHopeFear, kRandom, kHigh };

struct SelectorConfig {
  bool use_model_score = false;
  double tau_m = 0.1;
  int k_po = 10;
  LoserRule loser_rule = LoserRule::kHopeFear;
};

struct PairChoice {
  std::size_t winner = 0;
  std::size_t loser = 0;
  bool kept = false;
  /// Raw draw for LoserRule::kRandom (index among non-winners), else -1.
  long random_draw = -1;
};

/// Number of distinct texts in the pool.
std::size_t DistinctCount(const CandidatePool& pool);

/// Picks (winner, loser) from a pool.
///
/// Reward only: winner is the first argmax of R, loser the first argmin of R
/// among the other candidates; the pair is kept only when R strictly
/// separates them. With the model score enabled: winner maximizes
/// M^tau + R, loser maximizes M^tau - R, and the pair is dropped when both
/// criteria pick the same rewrite. `pool_seed` drives LoserRule::kRandom.
///
/// Throws Error(kDegeneratePool) if the pool has fewer than two distinct texts.
PairChoice SelectPair(const CandidatePool& pool, const SelectorConfig& config,
                      const rewards::AggWeights& weights, std::uint64_t pool_seed = 0);

}  // namespace stamp::po
