// Copyright 2026 The stamp Authors
// SPDX-License-Identifier: Apache-2.0

#include "stamp/rewards.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace stamp::rewards {

bool AggWeights::Valid() const {
  return tau_max >= 1 && alpha >= 1 && beta >= 1 && gamma >= 1 && alpha <= tau_max &&
         beta <= tau_max && gamma <= tau_max;
}

ReversedCounts& ReversedCounts::operator+=(const ReversedCounts& o) {
  r_tss += o.r_tss;
  r_ms += o.r_ms;
  r_f += o.r_f;
  return *this;
}

double TssScore(const Tokens& text, const world::StyleSpec& style, const world::Lexicon& lex) {
  if (text.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto& tok : text)
    if (world::InvertWord(tok, style, lex)) ++hits;
  return static_cast<double>(hits) / static_cast<double>(text.size());
}

namespace {

std::map<int, int> ClassMultiset(const Tokens& text, const world::World& w) {
  std::map<int, int> counts;
  for (const auto& word : world::Canonicalize(text, w.lexicon(), w.styles())) {
    const int c = w.lexicon().ClassOf(word);
    if (c >= 0) ++counts[c];
  }
  return counts;
}

int Total(const std::map<int, int>& m) {
  int n = 0;
  for (const auto& [_, k] : m) n += k;
  return n;
}

}  // namespace

double MsScore(const Tokens& x, const Tokens& t, const world::World& w) {
  const auto a = ClassMultiset(x, w);
  const auto b = ClassMultiset(t, w);
  const int na = Total(a);
  const int nb = Total(b);
  if (na == 0 || nb == 0) return 0.0;
  int common = 0;
  for (const auto& [c, k] : a) {
    auto it = b.find(c);
    if (it != b.end()) common += std::min(k, it->second);
  }
  return 2.0 * common / static_cast<double>(na + nb);
}

double FScore(const Tokens& t, const world::World& w) {
  if (t.empty()) return 0.0;
  const auto canon = world::Canonicalize(t, w.lexicon(), w.styles());
  const auto valid = std::count_if(canon.begin(), canon.end(),
                                   [](const std::string& s) { return s != world::kUnknown; });
  const std::set<std::string> distinct(t.begin(), t.end());
  const double total = static_cast<double>(t.size());
  double score = (static_cast<double>(valid) / total) * (static_cast<double>(distinct.size()) / total);
  const int len = static_cast<int>(t.size());
  if (len < kMinLength || len > kMaxLength) score *= 0.5;
  return score;
}

RewardVector Score(const Tokens& source, const Tokens& output, int target_style, const world::World& w) {
  return {TssScore(output, w.style(target_style), w.lexicon()), MsScore(source, output, w), FScore(output, w)};
}

namespace {

double IntPow(double x, int n) {
  double r = x;
  for (int i = 1; i < n; ++i) r *= x;
  return r;
}

}  // namespace

double Aggregate(const RewardVector& rv, const AggWeights& w) {
  return IntPow(rv.tss, w.alpha) * IntPow(rv.ms, w.beta) * IntPow(rv.f, w.gamma);
}

ReversedCounts CountReversed(std::span<const std::pair<RewardVector, RewardVector>> pairs) {
  ReversedCounts r;
  for (const auto& [win, lose] : pairs) {
    if (win.tss < lose.tss) ++r.r_tss;
    if (win.ms < lose.ms) ++r.r_ms;
    if (win.f < lose.f) ++r.r_f;
  }
  return r;
}

}  // namespace stamp::rewards
