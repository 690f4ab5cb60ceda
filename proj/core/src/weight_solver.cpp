// Copyright 2026 The stamp Authors
// SPDX-License-Identifier: Apache-2.0

#include "stamp/weight_solver.hpp"

#include <optional>

namespace stamp::rewards {

ReversedCounts CountReversedUnder(std::span<const po::CandidatePool> pools, const AggWeights& w,
                                  const PairSelector& select, int jobs) {
  std::vector<std::optional<std::pair<RewardVector, RewardVector>>> slots(pools.size());
  ParallelFor(pools.size(), jobs, [&](std::size_t i) {
    const po::PairChoice c = select(i, pools[i], w);
    if (c.kept) slots[i] = std::make_pair(pools[i][c.winner].rewards, pools[i][c.loser].rewards);
  });
  std::vector<std::pair<RewardVector, RewardVector>> pairs;
  for (auto& s : slots)
    if (s) pairs.push_back(*s);
  return CountReversed(pairs);
}

AggWeights SolveWeights(std::span<const po::CandidatePool> pools, int tau_max, const PairSelector& select,
                        SolveTrace* trace, int jobs) {
  if (tau_max < 1) throw Error(ErrorCode::kConfigError, "tau_max must be >= 1");
  for (std::size_t i = 0; i < pools.size(); ++i)
    if (po::DistinctCount(pools[i]) < 2)
      throw Error(ErrorCode::kDegeneratePool, "pool " + std::to_string(i) + " has fewer than two distinct candidates");

  auto counts = [&](const AggWeights& w) {
    ReversedCounts r = CountReversedUnder(pools, w, select, jobs);
    if (trace) trace->trials.push_back({w, r});
    return r;
  };

  AggWeights w{1, 1, 1, tau_max};

  // Phase 1: smallest alpha that makes TSS the least-reversed objective.
  bool found = false;
  int best_alpha = 1;
  int best_r = -1;
  for (int a = 1; a <= tau_max; ++a) {
    const ReversedCounts r = counts({a, 1, 1, tau_max});
    if (r.r_tss < r.r_ms && r.r_tss < r.r_f) {
      w.alpha = a;
      found = true;
      break;
    }
    if (best_r < 0 || r.r_tss < best_r) {
      best_r = r.r_tss;
      best_alpha = a;
    }
  }
  if (!found) w.alpha = best_alpha;
  if (trace) trace->alpha_feasible = found;

  // Phase 2: largest beta keeping r_ms above r_tss.
  found = false;
  for (int b = tau_max; b >= 1; --b) {
    const ReversedCounts r = counts({w.alpha, b, 1, tau_max});
    if (r.r_ms > r.r_tss) {
      w.beta = b;
      found = true;
      break;
    }
  }
  if (!found) w.beta = 1;
  if (trace) trace->beta_feasible = found;

  // Phase 3: largest gamma keeping r_f above both.
  found = false;
  for (int g = tau_max; g >= 1; --g) {
    const ReversedCounts r = counts({w.alpha, w.beta, g, tau_max});
    if (r.r_f > r.r_tss && r.r_f > r.r_ms) {
      w.gamma = g;
      found = true;
      break;
    }
  }
  if (!found) w.gamma = 1;
  if (trace) trace->gamma_feasible = found;
  return w;
}

}  // namespace stamp::rewards
