// Copyright 2026 The stamp Authors
// SPDX-License-Identifier: Apache-2.0

// Stage orchestration over a run directory:
//
//   corpus/    world.json corpus.jsonl paraphrase_pairs.jsonl manifest.json
//   sft/       paraphraser.ckpt d_para*.jsonl inverse_s<k>.ckpt d_trf*.jsonl
//              f_sft.ckpt manifest.json
//   po/        iter_<i>/{d_po.jsonl,pairs_log.jsonl,model.ckpt} final.ckpt
//              manifest.json
//   eval/<name>/       pairs.csv report.json [comparison.json]
//   ablations/<name>/  same layout as po/, plus eval/
//
// A stage whose manifest is complete and carries the current fingerprint is a
// no-op unless forced. A manifest with another fingerprint is an error: the
// caller must pass force to overwrite it.

#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stamp/config.hpp"
#include "stamp/eval.hpp"
#include "stamp/lm/checkpoint.hpp"
#include "stamp/lm/tokenizer.hpp"
#include "stamp/world.hpp"

namespace stamp::pipeline {

namespace fs = std::filesystem;

struct EvalRequest {
  /// "sft", "po", "baseline" (two-step paraphrase + inverse) or a checkpoint
  /// path.
  std::string model = "po";
  world::Split split = world::Split::kTest;
  /// "in" or the name of an out-of-domain profile.
  std::string domain = "in";
  /// Output directory name under eval/; derived from the other fields when
  /// empty.
  std::string name;
  /// Name of an existing evaluation to compare against with the resampling
  /// test; must cover the same pairs.
  std::string compare_to;
};

/// The ablations known to Ablate().
const std::vector<std::string>& AblationNames();
/// The PO config of a named ablation. Throws Error(kConfigError).
po::PoConfig AblationConfig(const po::PoConfig& base, std::string_view name);

class Pipeline {
 public:
  explicit Pipeline(RunConfig cfg);

  const RunConfig& config() const { return cfg_; }
  const fs::path& root() const { return root_; }
  fs::path CorpusDir() const { return root_ / "corpus"; }
  fs::path SftDir() const { return root_ / "sft"; }
  fs::path PoDir() const { return root_ / "po"; }
  fs::path EvalDir(std::string_view name) const { return root_ / "eval" / std::string(name); }
  fs::path AblationDir(std::string_view name) const { return root_ / "ablations" / std::string(name); }

  /// Returns false when the stage was already complete.
  bool GenCorpus(bool force = false);
  bool TrainSft(bool force = false);
  bool TrainPo(bool force = false);
  /// Runs PO under the named variant and evaluates its final model on the
  /// in-domain test split.
  bool Ablate(std::string_view name, bool force = false);
  /// Writes eval/<name>/ and returns the report (loaded when up to date).
  eval::EvalReport Evaluate(const EvalRequest& request, bool force = false);

  std::string CorpusFingerprint() const;
  std::string SftFingerprint() const;
  std::string PoFingerprint(const po::PoConfig& po) const;

  static std::string DefaultEvalName(const EvalRequest& request);

 private:
  void LoadCorpus();
  bool RunPo(const fs::path& dir, const po::PoConfig& po, bool force);
  eval::EvalReport EvaluateInto(const fs::path& dir, const EvalRequest& request, bool force);
  RunContext Context() const { return {world_.get(), tokenizer_.get(), cfg_.jobs}; }
  void SaveModel(const fs::path& path, const lm::Model& model) const;
  lm::Model LoadModel(const fs::path& path) const;

  RunConfig cfg_;
  fs::path root_;
  std::unique_ptr<world::World> world_;
  std::unique_ptr<lm::Tokenizer> tokenizer_;
  std::vector<world::StyledText> texts_;
  std::vector<world::ParaphrasePair> pairs_;
};

/// Pretty-prints a checkpoint header, a JSON document, a JSON-lines file
/// summary, or a directory's manifest.json.
std::string Inspect(const std::string& path);

}  // namespace stamp::pipeline
