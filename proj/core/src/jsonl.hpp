// Copyright 2026 The stamp Authors
// SPDX-License-Identifier: Apache-2.0

// Internal JSON-lines helpers.

#pragma once

#include <sstream>
#include <string>
#include <string_view>

#include "json.hpp"
#include "stamp/common.hpp"

namespace stamp::detail {

/// Calls fn(json) for each non-empty line; parse and schema errors become
/// Error(kFormatError) with the line number.
template <typename Fn>
void ForEachJsonLine(std::string_view jsonl, Fn&& fn) {
  std::size_t line_no = 0;
  std::istringstream in{std::string(jsonl)};
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      fn(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kFormatError, "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
}

}  // namespace stamp::detail
