// Copyright 2026 The stamp Authors
// SPDX-License-Identifier: Apache-2.0

#include "stamp/world.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <unordered_set>

#include "json.hpp"
#include "jsonl.hpp"

namespace stamp::world {

using nlohmann::json;

std::string_view ToString(Renderer r) {
  switch (r) {
    case Renderer::kUppercase: return "UPPERCASE";
    case Renderer::kReverse: return "REVERSE";
    case Renderer::kSuffix: return "SUFFIX";
    case Renderer::kDoubleVowel: return "DOUBLE_VOWEL";
    case Renderer::kPrefix: return "PREFIX";
    case Renderer::kLeet: return "LEET";
  }
  return "?";
}

Renderer RendererFromString(std::string_view name) {
  for (Renderer r : {Renderer::kUppercase, Renderer::kReverse, Renderer::kSuffix,
                     Renderer::kDoubleVowel, Renderer::kPrefix, Renderer::kLeet}) {
    if (ToString(r) == name) return r;
  }
  throw Error(ErrorCode::kConfigError, "unknown renderer '" + std::string(name) + "'");
}

std::string_view ToString(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kValid: return "valid";
    case Split::kTest: return "test";
  }
  return "?";
}

Split SplitFromString(std::string_view name) {
  if (name == "train") return Split::kTrain;
  if (name == "valid") return Split::kValid;
  if (name == "test") return Split::kTest;
  throw Error(ErrorCode::kFormatError, "unknown split '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Lexicon

Lexicon::Lexicon(std::vector<std::vector<std::string>> synonym_classes)
    : classes_(std::move(synonym_classes)) {
  for (std::size_t c = 0; c < classes_.size(); ++c) {
    if (classes_[c].size() < 2)
      throw Error(ErrorCode::kConfigError,
                  "synonym class " + std::to_string(c) + " has fewer than 2 words");
    for (const auto& w : classes_[c]) {
      if (w.empty() || !std::all_of(w.begin(), w.end(), [](char ch) { return ch >= 'a' && ch <= 'z'; }))
        throw Error(ErrorCode::kConfigError, "lexicon word '" + w + "' is not lowercase ASCII");
      if (!class_of_.emplace(w, static_cast<int>(c)).second)
        throw Error(ErrorCode::kConfigError, "duplicate lexicon word '" + w + "'");
      words_.push_back(w);
    }
  }
}

bool Lexicon::Contains(std::string_view word) const {
  return class_of_.find(std::string(word)) != class_of_.end();
}

int Lexicon::ClassOf(std::string_view word) const {
  auto it = class_of_.find(std::string(word));
  return it == class_of_.end() ? -1 : it->second;
}

// ---------------------------------------------------------------------------
// Renderers

namespace {

constexpr std::string_view kSuffixMarker = "xo";
constexpr std::string_view kPrefixMarker = "za";

bool IsVowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }

// Candidate preimage of `token` under `renderer`, before the lexicon check.
std::optional<std::string> RawInverse(std::string_view token, Renderer renderer) {
  std::string out;
  switch (renderer) {
    case Renderer::kUppercase:
      for (char c : token) {
        if (c < 'A' || c > 'Z') return std::nullopt;
        out += static_cast<char>(c - 'A' + 'a');
      }
      return out;
    case Renderer::kReverse:
      return std::string(token.rbegin(), token.rend());
    case Renderer::kSuffix:
      if (token.size() <= kSuffixMarker.size() || !token.ends_with(kSuffixMarker)) return std::nullopt;
      return std::string(token.substr(0, token.size() - kSuffixMarker.size()));
    case Renderer::kPrefix:
      if (token.size() <= kPrefixMarker.size() || !token.starts_with(kPrefixMarker)) return std::nullopt;
      return std::string(token.substr(kPrefixMarker.size()));
    case Renderer::kDoubleVowel:
      for (std::size_t i = 0; i < token.size(); ++i) {
        out += token[i];
        if (IsVowel(token[i])) {
          if (i + 1 >= token.size() || token[i + 1] != token[i]) return std::nullopt;
          ++i;
        }
      }
      return out;
    case Renderer::kLeet:
      for (char c : token) {
        if (c == 'a' || c == 'e' || c == 'o') return std::nullopt;
        out += c == '4' ? 'a' : c == '3' ? 'e' : c == '0' ? 'o' : c;
      }
      return out;
  }
  return std::nullopt;
}

}  // namespace

std::string RenderWord(std::string_view word, Renderer renderer) {
  std::string out;
  switch (renderer) {
    case Renderer::kUppercase:
      for (char c : word) out += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      return out;
    case Renderer::kReverse:
      return std::string(word.rbegin(), word.rend());
    case Renderer::kSuffix:
      return std::string(word) + std::string(kSuffixMarker);
    case Renderer::kPrefix:
      return std::string(kPrefixMarker) + std::string(word);
    case Renderer::kDoubleVowel:
      for (char c : word) {
        out += c;
        if (IsVowel(c)) out += c;
      }
      return out;
    case Renderer::kLeet:
      for (char c : word) out += c == 'a' ? '4' : c == 'e' ? '3' : c == 'o' ? '0' : c;
      return out;
  }
  return out;
}

StyledText RenderStyle(const Tokens& content, const StyleSpec& style, const Lexicon& lex) {
  StyledText out;
  out.style_id = style.id;
  out.tokens.reserve(content.size());
  for (const auto& w : content) {
    if (!lex.Contains(w)) throw Error(ErrorCode::kInvalidContent, "'" + w + "' is not a lexicon word");
    out.tokens.push_back(RenderWord(w, style.renderer));
  }
  return out;
}

std::optional<std::string> InvertWord(std::string_view token, const StyleSpec& style,
                                      const Lexicon& lex) {
  auto raw = RawInverse(token, style.renderer);
  if (!raw || !lex.Contains(*raw)) return std::nullopt;
  if (RenderWord(*raw, style.renderer) != token) return std::nullopt;
  return raw;
}

Tokens Canonicalize(const Tokens& text, const Lexicon& lex, const std::vector<StyleSpec>& styles) {
  Tokens out;
  out.reserve(text.size());
  for (const auto& tok : text) {
    if (lex.Contains(tok)) {
      out.push_back(tok);
      continue;
    }
    std::optional<std::string> hit;
    for (const auto& s : styles) {
      hit = InvertWord(tok, s, lex);
      if (hit) break;
    }
    out.push_back(hit ? *hit : std::string(kUnknown));
  }
  return out;
}

// ---------------------------------------------------------------------------
// World

World::World(Lexicon lexicon, std::vector<StyleSpec> styles, std::vector<DomainProfile> domains)
    : lexicon_(std::move(lexicon)), styles_(std::move(styles)), domains_(std::move(domains)) {
  std::sort(styles_.begin(), styles_.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < styles_.size(); ++i) {
    if (styles_[i].id == styles_[i - 1].id)
      throw Error(ErrorCode::kConfigError, "duplicate style id " + std::to_string(styles_[i].id));
    for (std::size_t j = 0; j < i; ++j)
      if (styles_[i].renderer == styles_[j].renderer)
        throw Error(ErrorCode::kConfigError, "styles " + styles_[j].name + " and " + styles_[i].name +
                                                 " share a renderer");
  }
  if (domains_.empty()) throw Error(ErrorCode::kConfigError, "world needs at least one domain");

  std::set<int> seen_classes;
  std::set<int> seen_styles;
  for (const auto& d : domains_) {
    if (d.style_ids.empty()) throw Error(ErrorCode::kConfigError, "domain " + d.name + " has no styles");
    for (int c : d.classes) {
      if (c < 0 || static_cast<std::size_t>(c) >= lexicon_.num_classes())
        throw Error(ErrorCode::kConfigError, "domain " + d.name + " references class " + std::to_string(c));
      if (!seen_classes.insert(c).second)
        throw Error(ErrorCode::kConfigError, "class " + std::to_string(c) + " is shared across domains");
    }
    for (int s : d.style_ids) {
      if (!HasStyle(s))
        throw Error(ErrorCode::kConfigError, "domain " + d.name + " references style " + std::to_string(s));
      if (!seen_styles.insert(s).second)
        throw Error(ErrorCode::kConfigError, "style " + std::to_string(s) + " is shared across domains");
    }
  }

  // Pairwise non-collision: no rendering is a lexicon word, and no two
  // (word, style) pairs render to the same surface.
  std::unordered_map<std::string, std::string> owner;
  for (const auto& w : lexicon_.words()) owner.emplace(w, w + "/plain");
  for (const auto& s : styles_) {
    for (const auto& w : lexicon_.words()) {
      std::string r = RenderWord(w, s.renderer);
      auto [it, inserted] = owner.emplace(r, w + "/" + s.name);
      if (!inserted)
        throw Error(ErrorCode::kCollision, "'" + r + "' is produced by both " + it->second + " and " +
                                               w + "/" + s.name);
    }
  }
}

const DomainProfile& World::domain(std::string_view name) const {
  for (const auto& d : domains_)
    if (d.name == name) return d;
  throw Error(ErrorCode::kConfigError, "unknown domain '" + std::string(name) + "'");
}

const StyleSpec& World::style(int id) const {
  for (const auto& s : styles_)
    if (s.id == id) return s;
  throw Error(ErrorCode::kConfigError, "unknown style id " + std::to_string(id));
}

bool World::HasStyle(int id) const {
  return std::any_of(styles_.begin(), styles_.end(), [id](const auto& s) { return s.id == id; });
}

World DefaultWorld() {
  std::vector<std::vector<std::string>> classes = {
      // in-domain
      {"cat", "kitten"},
      {"dog", "hound"},
      {"house", "home"},
      {"road", "street"},
      {"large", "huge"},
      {"small", "petite"},
      {"fast", "rapid", "speedy"},
      {"happy", "glad", "cheerful"},
      {"sad", "gloomy"},
      {"car", "auto", "vehicle"},
      {"boat", "vessel"},
      {"talk", "speak", "chat"},
      {"walk", "stroll"},
      {"eat", "dine", "feast"},
      {"smart", "clever", "wise"},
      {"old", "ancient", "aged"},
      // out-of-domain
      {"river", "stream"},
      {"stone", "rock"},
      {"ocean", "sea"},
      {"bread", "loaf"},
      {"paper", "page"},
      {"cloud", "haze"},
      {"song", "tune"},
      {"door", "gate"},
      {"game", "sport"},
      {"garden", "meadow"},
  };
  std::vector<StyleSpec> styles = {
      {0, "shout", Renderer::kUppercase},
      {1, "mirror", Renderer::kReverse},
      {2, "kiss", Renderer::kSuffix},
      {3, "drawl", Renderer::kDoubleVowel},
      {4, "buzz", Renderer::kPrefix},
      {5, "leet", Renderer::kLeet},
  };
  DomainProfile core{"core", {}, {0, 1, 2, 3}};
  DomainProfile ood{"ood", {}, {4, 5}};
  for (int c = 0; c < 16; ++c) core.classes.push_back(c);
  for (int c = 16; c < 26; ++c) ood.classes.push_back(c);
  return World(Lexicon(std::move(classes)), std::move(styles), {core, ood});
}

// ---------------------------------------------------------------------------
// Corpus generation

std::uint64_t MeaningCapacity(std::size_t num_classes, int min_len, int max_len) {
  constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t total = 0;
  for (int len = std::max(min_len, 1); len <= max_len; ++len) {
    if (static_cast<std::size_t>(len) > num_classes) break;
    std::uint64_t perms = 1;  // P(num_classes, len)
    for (int k = 0; k < len; ++k) {
      const std::uint64_t f = num_classes - static_cast<std::uint64_t>(k);
      if (perms > kMax / f) return kMax;
      perms *= f;
    }
    if (total > kMax - perms) return kMax;
    total += perms;
  }
  return total;
}

namespace {

enum Stream : std::uint64_t { kStyleStream = 1, kParaphraseStream = 2 };

// Draws a content sentence: length uniform in [min_len, max_len], classes
// uniformly without replacement, then a uniform member of each class.
std::pair<std::vector<int>, Tokens> DrawContent(const Lexicon& lex, const std::vector<int>& classes,
                                                int min_len, int max_len, std::mt19937_64& rng) {
  const int hi = std::min<int>(max_len, static_cast<int>(classes.size()));
  const int len = std::uniform_int_distribution<int>(min_len, hi)(rng);
  std::vector<int> pool = classes;
  std::vector<int> chosen;
  Tokens words;
  for (int k = 0; k < len; ++k) {
    const auto pick = std::uniform_int_distribution<std::size_t>(k, pool.size() - 1)(rng);
    std::swap(pool[k], pool[pick]);
    const int c = pool[k];
    const auto& members = lex.classes()[c];
    chosen.push_back(c);
    words.push_back(members[std::uniform_int_distribution<std::size_t>(0, members.size() - 1)(rng)]);
  }
  return {chosen, words};
}

}  // namespace

Corpus GenerateCorpus(const World& world, const CorpusConfig& config, std::uint64_t seed) {
  if (config.min_len < 1 || config.max_len < config.min_len)
    throw Error(ErrorCode::kConfigError, "invalid length bounds");
  Corpus corpus;
  const std::uint64_t per_style = static_cast<std::uint64_t>(config.train_per_style) +
                                  static_cast<std::uint64_t>(config.valid_per_style) +
                                  static_cast<std::uint64_t>(config.test_per_style);

  for (const auto& domain : world.domains()) {
    const std::uint64_t capacity = MeaningCapacity(domain.classes.size(), config.min_len, config.max_len);
    if (per_style > capacity)
      throw Error(ErrorCode::kCapacityExceeded,
                  "domain " + domain.name + " has " + std::to_string(capacity) +
                      " distinct meanings but " + std::to_string(per_style) + " texts per style were requested");
  }
  if (per_style == 0 && config.paraphrase_pairs == 0) return corpus;

  for (const auto& domain : world.domains()) {
    for (int style_id : domain.style_ids) {
      const StyleSpec& style = world.style(style_id);
      std::mt19937_64 rng(DeriveSeed(seed, {kStyleStream, static_cast<std::uint64_t>(style_id)}));
      std::set<std::vector<int>> used;
      const std::uint64_t max_attempts = 1000 * per_style + 1000000;
      std::uint64_t attempts = 0;
      std::uint64_t produced = 0;
      while (produced < per_style) {
        if (++attempts > max_attempts)
          throw Error(ErrorCode::kCapacityExceeded, "could not draw enough distinct texts for style " + style.name);
        auto [meaning, words] = DrawContent(world.lexicon(), domain.classes, config.min_len, config.max_len, rng);
        if (!used.insert(meaning).second) continue;
        StyledText text = RenderStyle(words, style, world.lexicon());
        text.split = produced < static_cast<std::uint64_t>(config.train_per_style) ? Split::kTrain
                     : produced < static_cast<std::uint64_t>(config.train_per_style + config.valid_per_style)
                         ? Split::kValid
                         : Split::kTest;
        corpus.texts.push_back(std::move(text));
        ++produced;
      }
    }
  }

  // Paraphrase pairs over the in-domain lexicon. The source side is rendered
  // in a random in-domain style (or left plain) so the paraphraser sees every
  // surface form it will be asked to normalize.
  const DomainProfile& core = world.in_domain();
  std::mt19937_64 rng(DeriveSeed(seed, {kParaphraseStream}));
  const auto& lex = world.lexicon();
  for (int i = 0; i < config.paraphrase_pairs; ++i) {
    auto [meaning, words] = DrawContent(lex, core.classes, config.min_len, config.max_len, rng);
    const auto which = std::uniform_int_distribution<std::size_t>(0, core.style_ids.size())(rng);
    ParaphrasePair pair;
    pair.src = which == 0 ? words : RenderStyle(words, world.style(core.style_ids[which - 1]), lex).tokens;
    for (std::size_t k = 0; k < words.size(); ++k) {
      const auto& members = lex.classes()[meaning[k]];
      pair.tgt.push_back(members[std::uniform_int_distribution<std::size_t>(0, members.size() - 1)(rng)]);
    }
    corpus.paraphrase_pairs.push_back(std::move(pair));
  }
  return corpus;
}

std::vector<StyledText> Select(const std::vector<StyledText>& texts, Split split,
                               const std::vector<int>& style_ids) {
  std::vector<StyledText> out;
  for (const auto& t : texts)
    if (t.split == split && std::find(style_ids.begin(), style_ids.end(), t.style_id) != style_ids.end())
      out.push_back(t);
  return out;
}

// ---------------------------------------------------------------------------
// Serialization

std::string CorpusToJsonl(const std::vector<StyledText>& texts) {
  std::string out;
  for (const auto& t : texts) {
    json j = {{"text", Join(t.tokens)}, {"style", t.style_id}, {"split", ToString(t.split)}};
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::vector<StyledText> CorpusFromJsonl(std::string_view jsonl) {
  std::vector<StyledText> out;
  detail::ForEachJsonLine(jsonl, [&](const json& j) {
    out.push_back({SplitWords(j.at("text").get<std::string>()), j.at("style").get<int>(),
                   SplitFromString(j.at("split").get<std::string>())});
  });
  return out;
}

std::string PairsToJsonl(const std::vector<ParaphrasePair>& pairs) {
  std::string out;
  for (const auto& p : pairs) {
    out += json{{"src", Join(p.src)}, {"tgt", Join(p.tgt)}}.dump();
    out += '\n';
  }
  return out;
}

std::vector<ParaphrasePair> PairsFromJsonl(std::string_view jsonl) {
  std::vector<ParaphrasePair> out;
  detail::ForEachJsonLine(jsonl, [&](const json& j) {
    out.push_back({SplitWords(j.at("src").get<std::string>()), SplitWords(j.at("tgt").get<std::string>())});
  });
  return out;
}

std::string WorldToJson(const World& world) {
  json j;
  j["classes"] = world.lexicon().classes();
  j["styles"] = json::array();
  for (const auto& s : world.styles())
    j["styles"].push_back({{"id", s.id}, {"name", s.name}, {"renderer", ToString(s.renderer)}});
  j["domains"] = json::array();
  for (const auto& d : world.domains())
    j["domains"].push_back({{"name", d.name}, {"classes", d.classes}, {"styles", d.style_ids}});
  return j.dump(2) + "\n";
}

World WorldFromJson(std::string_view text) {
  try {
    const json j = json::parse(text);
    for (const auto& [key, _] : j.items())
      if (key != "classes" && key != "styles" && key != "domains")
        throw Error(ErrorCode::kConfigError, "world: unknown key '" + key + "'");
    std::vector<StyleSpec> styles;
    for (const auto& s : j.at("styles"))
      styles.push_back({s.at("id").get<int>(), s.at("name").get<std::string>(),
                        RendererFromString(s.at("renderer").get<std::string>())});
    std::vector<DomainProfile> domains;
    for (const auto& d : j.at("domains"))
      domains.push_back({d.at("name").get<std::string>(), d.at("classes").get<std::vector<int>>(),
                         d.at("styles").get<std::vector<int>>()});
    return World(Lexicon(j.at("classes").get<std::vector<std::vector<std::string>>>()), std::move(styles),
                 std::move(domains));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfigError, std::string("world: ") + e.what());
  }
}

}  // namespace stamp::world
