// Copyright 2026 The stamp Authors
// SPDX-License-Identifier: Apache-2.0

// Supervised stage: paraphraser, paraphrase over-generation, per-style inverse
// models, pseudo-parallel transfer data and the unified control-code model.

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "stamp/context.hpp"
#include "stamp/lm/model.hpp"
#include "stamp/lm/sampling.hpp"
#include "stamp/lm/trainer.hpp"
#include "stamp/rewards.hpp"

namespace stamp::sft {

struct SftConfig {
  lm::ModelConfig arch;  // vocab_size is taken from the tokenizer
  lm::TrainParams paraphraser{15, 16, 1e-3};
  lm::TrainParams inverse{20, 8, 1e-3};
  lm::TrainParams unified{20, 16, 1e-3};
  int k_para = 20;
  double para_temperature = 0.5;
  int k_sft = 16;
  double sft_temperature = 0.7;
  int tau_ms = 8;
  double top_p = 1.0;
  int max_len = 14;
  /// Sources per (source style, target style) cell.
  int train_sources = 500;
  int valid_sources = 20;
  /// Held-out share of paraphrase pairs for validation loss.
  double para_valid_fraction = 0.05;
};

struct TrainedModel {
  lm::Model model;
  lm::TrainHistory history;
};

struct ParaphraseRecord {
  world::StyledText source;
  Tokens paraphrase;
  double ms = 0.0;
};

struct TransferRecord {
  world::StyledText source;
  int target_style = 0;
  Tokens transfer;
  rewards::RewardVector rewards;
};

/// Every candidate considered for one selected record (debug provenance).
struct CandidateLog {
  world::StyledText source;
  int target_style = -1;  // -1 for paraphrases
  std::vector<Tokens> texts;
  std::vector<double> scores;
  std::size_t selected = 0;
};

/// A fresh model for this tokenizer.
lm::Model NewModel(const RunContext& ctx, const SftConfig& cfg, std::uint64_t seed);

/// [S_s] x.
std::vector<int> UnifiedPrompt(const lm::Tokenizer& tok, const Tokens& x, int target_style);

/// Cross-entropy on src [SEP] tgt, loss on tgt. Throws Error(kEmptyDataset).
TrainedModel TrainParaphraser(const RunContext& ctx, const std::vector<world::ParaphrasePair>& pairs,
                              const SftConfig& cfg, std::uint64_t seed);

/// k samples per text; keeps the first argmax of MS(x, sample). Texts whose
/// samples are all empty are dropped with a warning.
std::vector<ParaphraseRecord> GenParaphrases(const RunContext& ctx, const lm::Model& f_para,
                                             const std::vector<world::StyledText>& texts, int k,
                                             const lm::SampleParams& params, std::uint64_t seed,
                                             std::vector<CandidateLog>* log = nullptr);

/// Cross-entropy on paraphrase [SEP] x for records of `style`. Throws
/// Error(kEmptyDataset) when the training slice is empty.
TrainedModel TrainInverse(const RunContext& ctx, int style, const std::vector<ParaphraseRecord>& train,
                          const std::vector<ParaphraseRecord>& valid, const SftConfig& cfg, std::uint64_t seed);

/// k two-step rewrites f_inv(f_para(x)): k paraphrase samples, one inverse
/// sample for each.
std::vector<Tokens> TwoStepCandidates(const RunContext& ctx, const lm::Model& f_para, const lm::Model& f_inv,
                                      const Tokens& x, int k, const lm::SampleParams& params, std::uint64_t seed);

Tokens TwoStepTransfer(const RunContext& ctx, const lm::Model& f_para, const lm::Model& f_inv, const Tokens& x,
                       const lm::SampleParams& params, std::uint64_t seed);

/// F * MS^tau_ms * TSS; 0 for an empty candidate.
double SelectionScore(const rewards::RewardVector& rv, int tau_ms, bool empty = false);

/// For each target style and each other style in `style_ids`, draws up to
/// `sources_per_cell` sources of that style from `texts`, generates k_sft
/// two-step candidates each and keeps the first argmax of SelectionScore.
std::vector<TransferRecord> BuildDtrf(const RunContext& ctx, const std::vector<world::StyledText>& texts,
                                      const std::vector<int>& style_ids, const lm::Model& f_para,
                                      const std::map<int, lm::Model>& inverses, int sources_per_cell,
                                      const SftConfig& cfg, std::uint64_t seed,
                                      std::vector<CandidateLog>* log = nullptr);

/// Cross-entropy on [S_s] x [SEP] t. Throws Error(kMissingStyle) when a style
/// in `style_ids` has no training record.
TrainedModel TrainSftUnified(const RunContext& ctx, const std::vector<TransferRecord>& train,
                             const std::vector<TransferRecord>& valid, const std::vector<int>& style_ids,
                             const SftConfig& cfg, std::uint64_t seed);

/// One sample from the unified model toward `target_style`.
Tokens UnifiedTransfer(const RunContext& ctx, const lm::Model& model, const Tokens& x, int target_style,
                       const lm::SampleParams& params, std::uint64_t seed);

std::string ParaphrasesToJsonl(const std::vector<ParaphraseRecord>& records);
std::vector<ParaphraseRecord> ParaphrasesFromJsonl(std::string_view jsonl);
std::string TransfersToJsonl(const std::vector<TransferRecord>& records);
std::vector<TransferRecord> TransfersFromJsonl(std::string_view jsonl);
std::string CandidateLogsToJsonl(const std::vector<CandidateLog>& logs);

}  // namespace stamp::sft
