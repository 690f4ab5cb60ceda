// Copyright 2026 The stamp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <span>
#include <vector>

#include "stamp/rewards.hpp"
#include "stamp/selection.hpp"

namespace stamp::rewards {

/// Re-selects the pair of pool `index` under trial weights.
using PairSelector =
    std::function<po::PairChoice(std::size_t index, const po::CandidatePool& pool, const AggWeights& w)>;

/// Every (weights, counts) evaluation the solver made, in order.
struct SolveTrace {
  struct Trial {
    AggWeights weights;
    ReversedCounts counts;
  };
  std::vector<Trial> trials;
  bool alpha_feasible = false;
  bool beta_feasible = false;
  bool gamma_feasible = false;
};

/// Reversal counts of the kept pairs selected under `w`.
ReversedCounts CountReversedUnder(std::span<const po::CandidatePool> pools, const AggWeights& w,
                                  const PairSelector& select, int jobs = 1);

/// Three-phase search for (alpha, beta, gamma) in [1, tau_max]:
///   1. beta = gamma = 1; alpha is the smallest value with r_tss < r_ms and
///      r_tss < r_f (else the argmin of r_tss, smallest on ties);
///   2. gamma = 1; beta is the largest value with r_ms > r_tss (else 1);
///   3. gamma is the largest value with r_f > r_tss and r_f > r_ms (else 1).
/// Pairs are re-selected for every trial.
///
/// Throws Error(kDegeneratePool) if any pool has fewer than two distinct texts.
AggWeights SolveWeights(std::span<const po::CandidatePool> pools, int tau_max, const PairSelector& select,
                        SolveTrace* trace = nullptr, int jobs = 1);

}  // namespace stamp::rewards
