// Copyright 2026 The stamp Authors
// SPDX-License-Identifier: Apache-2.0

// Evaluation protocol: one sampled transfer per (text, other target style),
// oracle scores, per-style and overall means, and the resampling paired
// t-test used for system comparisons.

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "stamp/context.hpp"
#include "stamp/rewards.hpp"

namespace stamp::eval {

/// Produces one rewrite of `x` toward `target_style`.
using TransferFn = std::function<Tokens(const world::StyledText& x, int target_style, std::uint64_t seed)>;

struct Means {
  double tss = 0.0;
  double ms = 0.0;
  double f = 0.0;
  double agg = 0.0;
};

struct PairScore {
  Tokens src;
  int style_src = 0;
  int style_tgt = 0;
  Tokens output;
  rewards::RewardVector rv;
  double agg = 0.0;
};

struct EvalReport {
  std::map<int, Means> per_style;  // keyed by target style
  Means total;
  std::size_t n_pairs = 0;
  std::string fingerprint;
  std::string domain;
  std::vector<PairScore> pairs;
};

/// Transfers every text to every target style other than its own. Pair j
/// (in text order, then ascending target) uses DeriveSeed(seed, {j}).
EvalReport Evaluate(const RunContext& ctx, const std::vector<world::StyledText>& texts,
                    const std::vector<int>& target_styles, const TransferFn& transfer, std::uint64_t seed,
                    const std::string& fingerprint, const std::string& domain = "in");

/// Evaluate with out-of-domain inputs; the domain name is appended to the
/// fingerprint.
EvalReport OutOfDomainEvaluate(const RunContext& ctx, const std::vector<world::StyledText>& ood_texts,
                               const std::vector<int>& target_styles, const TransferFn& transfer,
                               std::uint64_t seed, const std::string& fingerprint, const std::string& domain);

/// Per-style and total means recomputed from `pairs`.
void Summarize(EvalReport& report);

/// Header src,style_src,style_tgt,output,tss,ms,f,agg; reals as %.17g.
std::string ReportToCsv(const EvalReport& report);
std::vector<PairScore> PairsFromCsv(std::string_view csv);
std::string ReportToJson(const EvalReport& report);

std::vector<double> Column(const EvalReport& report, const std::string& metric);

/// Resampling paired t-test: n_subsets index subsets of subset_size drawn
/// without replacement (independently per subset), the per-subset mean
/// difference A - B, and a two-sided one-sample t-test on those differences.
/// All-zero differences give p = 1; constant nonzero differences give the
/// smallest positive double. Throws Error(kAlignmentError) on mismatched or
/// too-short inputs.
double ResamplingTest(std::span<const double> a, std::span<const double> b, int n_subsets = 10,
                      int subset_size = 100, std::uint64_t seed = 0);

/// The index subsets ResamplingTest draws: subset k is a partial
/// Fisher-Yates shuffle of [0, n) under DeriveSeed(seed, {k}).
std::vector<std::vector<std::size_t>> ResamplingSubsets(std::size_t n, int n_subsets, int subset_size,
                                                        std::uint64_t seed);

/// Two-sided p-value of a one-sample t-test of mean zero, with the
/// zero-variance conventions above.
double PairedTTestPValue(std::span<const double> differences);

struct Comparison {
  Means a, b, delta;  // delta = a - b
  Means p_value;
};

/// Both reports must cover the same (source, target) pairs in order.
Comparison CompareBaseline(const EvalReport& a, const EvalReport& b, std::uint64_t seed, int n_subsets = 10,
                           int subset_size = 100);
std::string ComparisonToJson(const Comparison& c);

}  // namespace stamp::eval
