// Copyright 2026 The stamp Authors
// SPDX-License-Identifier: Apache-2.0

// Run configuration: one JSON document with sections model, corpus, sft, po
// and eval. Every section and key is optional and falls back to the default
// below; unknown keys are rejected. See configs/default.json for the schema.

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "stamp/lm/model.hpp"
#include "stamp/po.hpp"
#include "stamp/sft.hpp"
#include "stamp/world.hpp"

namespace stamp {

struct EvalConfig {
  double temperature = 0.7;
  double top_p = 1.0;
  int max_len = 14;
  std::uint64_t seed = 1234;
  int n_subsets = 10;
  int subset_size = 100;
};

struct RunConfig {
  std::uint64_t seed = 7;
  int jobs = 1;
  std::string run_dir = "runs/default";
  bool debug = false;
  /// Path to a world JSON document; empty selects the built-in world.
  std::string world;
  lm::ModelConfig model;
  world::CorpusConfig corpus;
  sft::SftConfig sft;
  po::PoConfig po;
  EvalConfig eval;
};

/// Parses and validates. Throws Error(kConfigError) naming the offending
/// field.
RunConfig ParseConfig(std::string_view json_text);
RunConfig LoadConfig(const std::string& path);

/// Applies "section.key=value" overrides (value parsed as JSON, else taken as
/// a string) to a config document before parsing.
std::string ApplyOverrides(std::string_view json_text, const std::vector<std::string>& overrides);

/// Range checks; throws Error(kConfigError) naming the field.
void Validate(const RunConfig& cfg);

/// Canonical JSON with every field spelled out.
std::string ConfigToJson(const RunConfig& cfg);

std::string_view ToString(po::LoserRule rule);
po::LoserRule LoserRuleFromString(std::string_view name);

}  // namespace stamp
