// Copyright 2026 The stamp Authors
// SPDX-License-Identifier: Apache-2.0

// Binary checkpoint: one line of compact JSON (config, tensor manifest,
// vocabulary, format_version, seed record, optional optimizer moments)
// terminated by '\n', then little-endian float32 arrays in manifest order.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "stamp/lm/model.hpp"
#include "stamp/lm/optimizer.hpp"
#include "stamp/lm/tokenizer.hpp"

namespace stamp::lm {

inline constexpr int kCheckpointFormatVersion = 1;

struct Checkpoint {
  Model model;
  Tokenizer tokenizer;
  std::uint64_t seed = 0;
  std::optional<Adam> optimizer;
};

std::string SerializeCheckpoint(const Checkpoint& ckpt);
/// Throws Error(kFormatError) on malformed input or an unknown version.
Checkpoint DeserializeCheckpoint(std::string_view bytes);

void SaveCheckpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint LoadCheckpoint(const std::string& path);

/// The JSON header only, for inspection.
std::string CheckpointHeader(std::string_view bytes);

}  // namespace stamp::lm
