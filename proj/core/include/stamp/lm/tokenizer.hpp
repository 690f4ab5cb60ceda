// Copyright 2026 The stamp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "stamp/common.hpp"
#include "stamp/world.hpp"

namespace stamp::lm {

/// Word-level vocabulary. Layout: [PAD] [BOS] [EOS] [SEP] [UNK], one control
/// code [S<id>] per style, lexicon words, then each style's renderings in
/// style order. Bracketed tokens are special and never decoded.
class Tokenizer {
 public:
  static constexpr int kPad = 0;
  static constexpr int kBos = 1;
  static constexpr int kEos = 2;
  static constexpr int kSep = 3;
  static constexpr int kUnk = 4;

  Tokenizer() = default;
  explicit Tokenizer(const world::World& world);
  /// Restores a vocabulary saved with a checkpoint.
  explicit Tokenizer(std::vector<std::string> vocab);

  int size() const { return static_cast<int>(vocab_.size()); }
  const std::vector<std::string>& vocab() const { return vocab_; }
  const std::string& Token(int id) const { return vocab_.at(static_cast<std::size_t>(id)); }
  /// kUnk when absent.
  int Id(std::string_view token) const;
  /// Throws Error(kMissingStyle) when the style has no control code.
  int StyleCode(int style_id) const;
  bool IsSpecial(int id) const;

  std::vector<int> Encode(const Tokens& tokens) const;
  Tokens Decode(std::span<const int> ids) const;

 private:
  void Index();
  std::vector<std::string> vocab_;
  std::unordered_map<std::string, int> ids_;
};

}  // namespace stamp::lm
