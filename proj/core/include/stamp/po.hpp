// Copyright 2026 The stamp Authors
// SPDX-License-Identifier: Apache-2.0

// Multi-iteration preference optimization: candidate pools from the current
// reference model, per-iteration weight solving, hope-and-fear pairs, CPO
// training and the validation-TSS stopping rule.

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "stamp/context.hpp"
#include "stamp/lm/model.hpp"
#include "stamp/lm/sampling.hpp"
#include "stamp/lm/trainer.hpp"
#include "stamp/selection.hpp"
#include "stamp/weight_solver.hpp"

namespace stamp::po {

struct PoConfig {
  SelectorConfig selector;
  int tau_max = 6;
  /// false fixes (alpha, beta, gamma) = (1, 1, 1) instead of solving.
  bool weighted = true;
  double cpo_beta = 0.1;
  double lambda_nll = 1.0;
  int n_iter = 10;
  lm::TrainParams train{4, 16, 2e-4};
  double temperature = 1.0;
  double top_p = 1.0;
  int max_len = 14;
  /// Train sources drawn per style for each iteration.
  int sources_per_style = 100;
  /// Valid sources per style scored for the stopping rule.
  int valid_sources_per_style = 100;
  double valid_temperature = 0.7;
  /// An iteration aborts when fewer pools than this share yield a pair.
  double min_pool_yield = 0.5;
  /// false runs all n_iter iterations and keeps the last model; validation
  /// TSS is still recorded.
  bool stop_on_valid_tss = true;
};

struct PreferencePair {
  world::StyledText source;
  int target_style = 0;
  Tokens winner;
  Tokens loser;
};

/// k samples toward `target_style`, deduplicated by text (first occurrence
/// kept), each with m = ModelScore(ref, prompt, text + [EOS]) and rewards.
/// Throws Error(kDegeneratePool) with fewer than two distinct texts.
CandidatePool GenerateCandidates(const RunContext& ctx, const lm::Model& ref, const world::StyledText& x,
                                 int target_style, int k, const lm::SampleParams& params, std::uint64_t seed);

enum class PoolOutcome { kKept, kDropped, kDegenerate };
std::string_view ToString(PoolOutcome o);

struct PoolLog {
  std::size_t source_index = 0;
  int target_style = 0;
  PoolOutcome outcome = PoolOutcome::kKept;
  std::size_t candidates = 0;
  std::size_t winner = 0;
  std::size_t loser = 0;
  long random_draw = -1;
  std::vector<double> agg;  // R of each candidate under the solved weights
  std::uint64_t select_seed = 0;  // seed handed to SelectPair
};

struct PoDataset {
  std::vector<PreferencePair> pairs;
  rewards::AggWeights weights;
  rewards::SolveTrace trace;
  std::vector<PoolLog> logs;
  std::size_t pools = 0;
  std::size_t degenerate = 0;
  std::size_t dropped = 0;
};

/// Pools for every (source, target style != source style), weights solved
/// over all pools (or fixed when unweighted), pairs re-selected under them.
/// Throws Error(kEmptyPreferenceData) when no pool survives or the yield is
/// below cfg.min_pool_yield.
PoDataset BuildPoDataset(const RunContext& ctx, const lm::Model& ref, const std::vector<world::StyledText>& sources,
                         const std::vector<int>& style_ids, const PoConfig& cfg, std::uint64_t seed);

/// Winner/loser groups conditioned on [S_s] x.
std::vector<lm::Group> PairGroups(const lm::Tokenizer& tok, const std::vector<PreferencePair>& pairs);

/// Mean CPO loss over pairs.
double CpoLossValue(const RunContext& ctx, const lm::Model& model, const std::vector<PreferencePair>& pairs,
                    const PoConfig& cfg);

/// Copies the reference and minimizes mean CPO loss. Throws
/// Error(kEmptyPreferenceData) on an empty pair set.
lm::Model TrainPoIteration(const RunContext& ctx, const lm::Model& ref, const std::vector<PreferencePair>& pairs,
                           const PoConfig& cfg, std::uint64_t seed, lm::TrainHistory* history = nullptr);

/// Mean TSS of one sampled transfer per (source, other style).
double ValidationTss(const RunContext& ctx, const lm::Model& model, const std::vector<world::StyledText>& sources,
                     const std::vector<int>& style_ids, const lm::SampleParams& params, std::uint64_t seed);

/// The stopping rule over a stream of validation TSS values: iteration i runs
/// while i <= n_iter; if TSS_i < TSS_{i-1} (TSS_0 = tss0) the loop stops and
/// iteration i-1 is selected, else the last iteration is selected. With
/// stop_early false every iteration runs and the last is selected.
struct StopDecision {
  int selected = 0;  // 0 means the starting model
  int iterations_run = 0;
  bool stopped_early = false;
  std::vector<double> tss;  // TSS_1..TSS_run
};
StopDecision RunIterations(double tss0, int n_iter, const std::function<double(int)>& run_iteration,
                           bool stop_early = true);

struct IterationState {
  int iteration = 0;
  rewards::AggWeights weights;
  double valid_tss = 0.0;
  std::size_t pair_count = 0;
  std::size_t pool_count = 0;
  std::size_t degenerate = 0;
  std::size_t dropped = 0;
  double train_loss_first = 0.0;
  double train_loss_last = 0.0;
  std::string reference_sha;
  std::string model_sha;
};

struct MultiIterationResult {
  lm::Model final_model;
  double tss0 = 0.0;
  StopDecision decision;
  std::vector<IterationState> history;
};

struct IterationHooks {
  /// Called after D_PO of iteration i is built.
  std::function<void(int, const PoDataset&)> on_dataset;
  /// Called after model i is trained and scored.
  std::function<void(int, const lm::Model&, const IterationState&)> on_iteration;
  /// Fingerprint of a model as persisted (checkpoint sha-256).
  std::function<std::string(const lm::Model&)> sha;
};

/// Ref_1 = f_sft; Ref_{i+1} = model_i. Each iteration draws fresh train
/// sources, builds D_PO, trains, and scores validation TSS for the stopping
/// rule. Errors propagate after the hooks have seen the completed iterations.
MultiIterationResult RunMultiIteration(const RunContext& ctx, const lm::Model& f_sft,
                                       const std::vector<world::StyledText>& train,
                                       const std::vector<world::StyledText>& valid,
                                       const std::vector<int>& style_ids, const PoConfig& cfg, std::uint64_t seed,
                                       const IterationHooks& hooks = {});

/// D_PO as {"src", "src_style", "style", "winner", "loser"} lines.
std::string PairsToJsonl(const std::vector<PreferencePair>& pairs);
std::vector<PreferencePair> PairsFromJsonl(std::string_view jsonl);
std::string PoolLogsToJsonl(const std::vector<PoolLog>& logs);

}  // namespace stamp::po
