// Copyright 2026 The stamp Authors
// SPDX-License-Identifier: Apache-2.0

// Exact reward oracles over the synthetic world and the weighted-product
// aggregation used to rank rewrites.

#pragma once

#include <span>
#include <utility>
#include <vector>

#include "stamp/world.hpp"

namespace stamp::rewards {

struct RewardVector {
  double tss = 0.0;
  double ms = 0.0;
  double f = 0.0;

  bool operator==(const RewardVector&) const = default;
};

/// Integer temperatures of the weighted product, each in [1, tau_max].
struct AggWeights {
  int alpha = 1;
  int beta = 1;
  int gamma = 1;
  int tau_max = 6;

  bool operator==(const AggWeights&) const = default;
  bool Valid() const;
};

struct ReversedCounts {
  int r_tss = 0;
  int r_ms = 0;
  int r_f = 0;

  bool operator==(const ReversedCounts&) const = default;
  ReversedCounts& operator+=(const ReversedCounts& o);
};

/// Fraction of tokens that are the rendering of some lexicon word under
/// `style`. Empty text scores 0.
double TssScore(const Tokens& text, const world::StyleSpec& style, const world::Lexicon& lex);

/// Dice coefficient over synonym-class multisets of the canonicalized texts,
/// unknown tokens excluded. 0 when either side is empty. Symmetric.
double MsScore(const Tokens& x, const Tokens& t, const world::World& w);

/// (valid/total) * (distinct/total), halved when the length is outside [3, 12].
double FScore(const Tokens& t, const world::World& w);

/// All three oracles for a rewrite `output` of `source` aimed at `target_style`.
RewardVector Score(const Tokens& source, const Tokens& output, int target_style, const world::World& w);

/// tss^alpha * ms^beta * f^gamma, evaluated left to right so that unit
/// weights reproduce tss * ms * f exactly.
double Aggregate(const RewardVector& rv, const AggWeights& w);

/// Product tss * ms * f (the evaluation metric).
inline double Agg(const RewardVector& rv) { return rv.tss * rv.ms * rv.f; }

/// r_O counts pairs whose winner scores strictly below its loser on O.
ReversedCounts CountReversed(std::span<const std::pair<RewardVector, RewardVector>> pairs);

inline constexpr int kMinLength = 3;
inline constexpr int kMaxLength = 12;

}  // namespace stamp::rewards
