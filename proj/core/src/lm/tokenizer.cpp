// Copyright 2026 The stamp Authors
// SPDX-License-Identifier: Apache-2.0

#include "stamp/lm/tokenizer.hpp"

namespace stamp::lm {

Tokenizer::Tokenizer(const world::World& world) {
  vocab_ = {"[PAD]", "[BOS]", "[EOS]", "[SEP]", "[UNK]"};
  for (const auto& s : world.styles()) vocab_.push_back("[S" + std::to_string(s.id) + "]");
  for (const auto& w : world.lexicon().words()) vocab_.push_back(w);
  for (const auto& s : world.styles())
    for (const auto& w : world.lexicon().words()) vocab_.push_back(world::RenderWord(w, s.renderer));
  Index();
}

Tokenizer::Tokenizer(std::vector<std::string> vocab) : vocab_(std::move(vocab)) {
  if (vocab_.size() < 5 || vocab_[kPad] != "[PAD]" || vocab_[kBos] != "[BOS]" || vocab_[kEos] != "[EOS]" ||
      vocab_[kSep] != "[SEP]" || vocab_[kUnk] != "[UNK]")
    throw Error(ErrorCode::kFormatError, "vocabulary does not start with the reserved markers");
  Index();
}

void Tokenizer::Index() {
  ids_.clear();
  for (std::size_t i = 0; i < vocab_.size(); ++i)
    if (!ids_.emplace(vocab_[i], static_cast<int>(i)).second)
      throw Error(ErrorCode::kFormatError, "duplicate vocabulary entry '" + vocab_[i] + "'");
}

int Tokenizer::Id(std::string_view token) const {
  auto it = ids_.find(std::string(token));
  return it == ids_.end() ? kUnk : it->second;
}

int Tokenizer::StyleCode(int style_id) const {
  auto it = ids_.find("[S" + std::to_string(style_id) + "]");
  if (it == ids_.end()) throw Error(ErrorCode::kMissingStyle, "no control code for style " + std::to_string(style_id));
  return it->second;
}

bool Tokenizer::IsSpecial(int id) const {
  const std::string& t = Token(id);
  return !t.empty() && t.front() == '[' && t.back() == ']';
}

std::vector<int> Tokenizer::Encode(const Tokens& tokens) const {
  std::vector<int> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(Id(t));
  return out;
}

Tokens Tokenizer::Decode(std::span<const int> ids) const {
  Tokens out;
  for (int id : ids)
    if (id >= 0 && id < size() && !IsSpecial(id)) out.push_back(vocab_[static_cast<std::size_t>(id)]);
  return out;
}

}  // namespace stamp::lm
