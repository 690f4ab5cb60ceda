// Copyright 2026 The stamp Authors
// SPDX-License-Identifier: Apache-2.0

// Synthetic style world: a lexicon of synonym classes, a set of deterministic
// word renderers (the "styles"), their exact inverses, and a corpus generator.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "stamp/common.hpp"

namespace stamp::world {

/// Marker emitted by Canonicalize for tokens that invert to no lexicon word.
inline constexpr std::string_view kUnknown = "<unk>";

enum class Renderer { kUppercase, kReverse, kSuffix, kDoubleVowel, kPrefix, kLeet };

std::string_view ToString(Renderer r);
Renderer RendererFromString(std::string_view name);

struct StyleSpec {
  int id = 0;
  std::string name;
  Renderer renderer = Renderer::kUppercase;
};

class Lexicon {
 public:
  Lexicon() = default;
  /// Validates: lowercase ASCII words, unique, every class of size >= 2.
  explicit Lexicon(std::vector<std::vector<std::string>> synonym_classes);

  bool Contains(std::string_view word) const;
  /// Synonym class id of `word`, or -1.
  int ClassOf(std::string_view word) const;

  const std::vector<std::string>& words() const { return words_; }
  const std::vector<std::vector<std::string>>& classes() const { return classes_; }
  std::size_t num_classes() const { return classes_.size(); }

 private:
  std::vector<std::vector<std::string>> classes_;
  std::vector<std::string> words_;
  std::unordered_map<std::string, int> class_of_;
};

enum class Split { kTrain, kValid, kTest };

std::string_view ToString(Split s);
Split SplitFromString(std::string_view name);

struct StyledText {
  Tokens tokens;
  int style_id = 0;
  Split split = Split::kTrain;

  bool operator==(const StyledText&) const = default;
};

struct DomainProfile {
  std::string name;
  std::vector<int> classes;  // indices into Lexicon::classes()
  std::vector<int> style_ids;
};

/// Lexicon + styles + domain profiles. The first domain is the in-domain
/// profile used for training; others are out-of-domain test profiles.
class World {
 public:
  World() = default;
  /// Throws Error(kCollision) if any two (word, style) renderings coincide or a
  /// rendering lands on a lexicon word; throws kConfigError on malformed
  /// domains.
  World(Lexicon lexicon, std::vector<StyleSpec> styles, std::vector<DomainProfile> domains);

  const Lexicon& lexicon() const { return lexicon_; }
  /// Sorted by ascending id.
  const std::vector<StyleSpec>& styles() const { return styles_; }
  const std::vector<DomainProfile>& domains() const { return domains_; }
  const DomainProfile& in_domain() const { return domains_.front(); }
  const DomainProfile& domain(std::string_view name) const;
  const StyleSpec& style(int id) const;
  bool HasStyle(int id) const;

 private:
  Lexicon lexicon_;
  std::vector<StyleSpec> styles_;
  std::vector<DomainProfile> domains_;
};

/// Built-in world: 16 in-domain synonym classes with four styles, 10
/// out-of-domain classes with two further styles.
World DefaultWorld();

std::string RenderWord(std::string_view word, Renderer renderer);

/// Per-word rendering. Throws Error(kInvalidContent) for non-lexicon words.
StyledText RenderStyle(const Tokens& content, const StyleSpec& style, const Lexicon& lex);

/// The unique lexicon word whose rendering under `style` is `token`.
std::optional<std::string> InvertWord(std::string_view token, const StyleSpec& style,
                                      const Lexicon& lex);

/// Per token: identity first, then each style inverse in ascending id order;
/// the first lexicon hit wins, otherwise kUnknown.
Tokens Canonicalize(const Tokens& text, const Lexicon& lex, const std::vector<StyleSpec>& styles);

struct ParaphrasePair {
  Tokens src;
  Tokens tgt;

  bool operator==(const ParaphrasePair&) const = default;
};

struct CorpusConfig {
  int train_per_style = 500;
  int valid_per_style = 100;
  int test_per_style = 100;
  int min_len = 3;
  int max_len = 10;
  int paraphrase_pairs = 8000;
};

struct Corpus {
  std::vector<StyledText> texts;
  std::vector<ParaphrasePair> paraphrase_pairs;
};

/// Number of distinct meanings (class-id sequences without repeated classes)
/// available to a domain with `num_classes` classes. Saturates at UINT64_MAX.
std::uint64_t MeaningCapacity(std::size_t num_classes, int min_len, int max_len);

/// Pure function of (world, config, seed). Each style draws from its own seed
/// stream; texts are unique in meaning within a style across all splits.
/// Throws Error(kCapacityExceeded) when a style asks for more texts than it has
/// distinct meanings.
Corpus GenerateCorpus(const World& world, const CorpusConfig& config, std::uint64_t seed);

std::vector<StyledText> Select(const std::vector<StyledText>& texts, Split split,
                               const std::vector<int>& style_ids);

// Serialization (JSON lines / JSON document).
std::string CorpusToJsonl(const std::vector<StyledText>& texts);
std::vector<StyledText> CorpusFromJsonl(std::string_view jsonl);
std::string PairsToJsonl(const std::vector<ParaphrasePair>& pairs);
std::vector<ParaphrasePair> PairsFromJsonl(std::string_view jsonl);
std::string WorldToJson(const World& world);
World WorldFromJson(std::string_view json);

}  // namespace stamp::world
