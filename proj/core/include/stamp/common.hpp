// Copyright 2026 The stamp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace stamp {

/// Every failure the library reports carries one of these codes. The CLI maps
/// them to exit statuses; tests match on them.
enum class ErrorCode {
  kInvalidContent,
  kCapacityExceeded,
  kCollision,
  kDegeneratePool,
  kContextOverflow,
  kEmptyOutput,
  kNumericalFailure,
  kEmptyDataset,
  kMissingStyle,
  kEmptyPreferenceData,
  kAlignmentError,
  kConfigError,
  kFormatError,
  kIoError,
};

std::string_view ToString(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(ToString(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

using Tokens = std::vector<std::string>;

/// Mixes a base seed with a stream of integers (splitmix64 finalizer). All
/// sub-seeds in the pipeline are derived this way so that results do not
/// depend on evaluation order.
std::uint64_t DeriveSeed(std::uint64_t base, std::initializer_list<std::uint64_t> parts);

/// Runs fn(i) for i in [0, n) on up to `jobs` threads. Work is split into
/// contiguous blocks; fn must only write to slot i of its outputs.
void ParallelFor(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

std::string Join(const Tokens& tokens, std::string_view sep = " ");
Tokens SplitWords(std::string_view text);

/// Lower-case hex SHA-256 of a byte string.
std::string Sha256Hex(std::string_view bytes);
std::string Sha256File(const std::string& path);

std::string ReadFile(const std::string& path);
/// Writes via a temporary sibling and rename; creates parent directories.
void WriteFile(const std::string& path, std::string_view content);

/// Logging goes to stderr; `SetVerbose(false)` silences info lines.
void SetVerbose(bool verbose);
void LogInfo(const std::string& msg);
void LogWarn(const std::string& msg);

}  // namespace stamp
