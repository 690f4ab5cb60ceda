// Copyright 2026 The stamp Authors
// SPDX-License-Identifier: Apache-2.0

#include "stamp/world.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <set>

namespace stamp::world {
namespace {

World SmallWorld() {
  Lexicon lex({{"cat", "kitten"}, {"runs", "sprints"}, {"sun", "star"}, {"sits", "rests"}, {"dog", "hound"}});
  std::vector<StyleSpec> styles{{0, "shout", Renderer::kUppercase},
                                {1, "mirror", Renderer::kReverse},
                                {2, "kiss", Renderer::kSuffix},
                                {3, "drawl", Renderer::kDoubleVowel}};
  return World(std::move(lex), std::move(styles), {{"core", {0, 1, 2, 3, 4}, {0, 1, 2, 3}}});
}

TEST(RenderTest, Examples) {
  const World w = SmallWorld();
  EXPECT_EQ(RenderStyle({"cat", "runs"}, w.style(0), w.lexicon()).tokens, (Tokens{"CAT", "RUNS"}));
  EXPECT_EQ(RenderStyle({"cat"}, w.style(1), w.lexicon()).tokens, (Tokens{"tac"}));
  EXPECT_EQ(RenderStyle({"sun"}, w.style(3), w.lexicon()).tokens, (Tokens{"suun"}));
  EXPECT_EQ(RenderWord("cat", Renderer::kPrefix), "zacat");
  EXPECT_EQ(RenderWord("note", Renderer::kLeet), "n0t3");
  EXPECT_EQ(RenderWord("cat", Renderer::kSuffix), "catxo");
}

TEST(RenderTest, RejectsNonLexiconWords) {
  const World w = SmallWorld();
  try {
    RenderStyle({"cat", "zebra"}, w.style(0), w.lexicon());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidContent);
  }
}

TEST(InvertTest, Examples) {
  const World w = SmallWorld();
  EXPECT_FALSE(InvertWord("TAC", w.style(0), w.lexicon()).has_value());
  EXPECT_EQ(InvertWord("tac", w.style(1), w.lexicon()), "cat");
  EXPECT_EQ(InvertWord("catxo", w.style(2), w.lexicon()), "cat");
}

TEST(InvertTest, RoundTripEveryWordAndStyle) {
  for (const World& w : {SmallWorld(), DefaultWorld()})
    for (const auto& s : w.styles())
      for (const auto& word : w.lexicon().words())
        EXPECT_EQ(InvertWord(RenderWord(word, s.renderer), s, w.lexicon()), word) << word << " " << s.name;
}

TEST(CanonicalizeTest, Examples) {
  const World w = SmallWorld();
  const std::string unk(kUnknown);
  EXPECT_EQ(Canonicalize({"cat", "runs"}, w.lexicon(), w.styles()), (Tokens{"cat", "runs"}));
  EXPECT_EQ(Canonicalize({"zzz"}, w.lexicon(), w.styles()), (Tokens{unk}));
  // Per token, one inverse each: mixed-style texts canonicalize cleanly, a
  // token carrying two renderings at once does not.
  EXPECT_EQ(Canonicalize({"CAT", "runsxo"}, w.lexicon(), w.styles()), (Tokens{"cat", "runs"}));
  EXPECT_EQ(Canonicalize({"CAT", "RUNSXO"}, w.lexicon(), w.styles()), (Tokens{"cat", unk}));
}

TEST(CanonicalizeTest, InvertsRenderedContent) {
  const World w = DefaultWorld();
  std::mt19937_64 rng(3);
  const auto& words = w.lexicon().words();
  for (int trial = 0; trial < 500; ++trial) {
    Tokens c;
    const int len = 3 + static_cast<int>(rng() % 10);
    for (int i = 0; i < len; ++i) c.push_back(words[rng() % words.size()]);
    for (const auto& s : w.styles())
      EXPECT_EQ(Canonicalize(RenderStyle(c, s, w.lexicon()).tokens, w.lexicon(), w.styles()), c);
  }
}

TEST(WorldTest, RejectsCollisions) {
  // "tac" is both a word and the mirror image of "cat".
  Lexicon lex({{"cat", "kitten"}, {"tac", "dog"}});
  try {
    World(std::move(lex), {{0, "mirror", Renderer::kReverse}}, {{"core", {0, 1}, {0}}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kCollision);
  }
}

TEST(WorldTest, LexiconInvariants) {
  EXPECT_THROW(Lexicon({{"cat"}}), Error);
  EXPECT_THROW(Lexicon(std::vector<std::vector<std::string>>{{"cat", "Cat"}}), Error);
  EXPECT_THROW(Lexicon({{"cat", "dog"}, {"dog", "hound"}}), Error);
}

TEST(WorldTest, JsonRoundTrip) {
  const World w = DefaultWorld();
  const std::string j = WorldToJson(w);
  EXPECT_EQ(WorldToJson(WorldFromJson(j)), j);
}

// Meanings of length k over n classes with no class repeated: n!/(n-k)!.
std::uint64_t CountMeaningsByEnumeration(int n, int min_len, int max_len) {
  std::uint64_t count = 0;
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  std::function<void(int)> rec = [&](int depth) {
    if (depth >= min_len) ++count;
    if (depth == max_len) return;
    for (int c = 0; c < n; ++c) {
      if (used[static_cast<std::size_t>(c)]) continue;
      used[static_cast<std::size_t>(c)] = true;
      rec(depth + 1);
      used[static_cast<std::size_t>(c)] = false;
    }
  };
  rec(0);
  return count;
}

TEST(CorpusTest, CapacityMatchesEnumeration) {
  for (int n = 1; n <= 7; ++n)
    for (int lo = 1; lo <= 4; ++lo)
      for (int hi = lo; hi <= 7; ++hi)
        EXPECT_EQ(MeaningCapacity(static_cast<std::size_t>(n), lo, hi), CountMeaningsByEnumeration(n, lo, hi))
            << n << " " << lo << " " << hi;
  EXPECT_EQ(MeaningCapacity(100, 1, 30), std::numeric_limits<std::uint64_t>::max());
}

World FourStyleWorld() {
  World d = DefaultWorld();
  std::vector<StyleSpec> styles(d.styles().begin(), d.styles().begin() + 4);
  return World(d.lexicon(), styles, {d.in_domain()});
}

TEST(CorpusTest, DeterministicAndSized) {
  const World w = FourStyleWorld();
  CorpusConfig cfg;
  cfg.train_per_style = 500;
  cfg.valid_per_style = 0;
  cfg.test_per_style = 0;
  const Corpus a = GenerateCorpus(w, cfg, 7);
  const Corpus b = GenerateCorpus(w, cfg, 7);
  EXPECT_EQ(a.texts.size(), 2000u);
  EXPECT_EQ(CorpusToJsonl(a.texts), CorpusToJsonl(b.texts));
  EXPECT_EQ(PairsToJsonl(a.paraphrase_pairs), PairsToJsonl(b.paraphrase_pairs));
  EXPECT_NE(CorpusToJsonl(GenerateCorpus(w, cfg, 8).texts), CorpusToJsonl(a.texts));
}

TEST(CorpusTest, EmptyRequest) {
  CorpusConfig cfg;
  cfg.train_per_style = cfg.valid_per_style = cfg.test_per_style = 0;
  cfg.paraphrase_pairs = 0;
  const Corpus c = GenerateCorpus(DefaultWorld(), cfg, 1);
  EXPECT_TRUE(c.texts.empty());
  EXPECT_TRUE(c.paraphrase_pairs.empty());
}

TEST(CorpusTest, CapacityExceeded) {
  // 20 words in 10 classes, sentences up to 12 words.
  std::vector<std::vector<std::string>> classes;
  for (char c = 'a'; c < 'a' + 10; ++c) classes.push_back({std::string(3, c), std::string(4, c)});
  World w(Lexicon(classes), {{0, "shout", Renderer::kUppercase}}, {{"core", {0, 1, 2, 3, 4, 5, 6, 7, 8, 9}, {0}}});
  CorpusConfig cfg;
  cfg.train_per_style = 1'000'000'000;
  cfg.max_len = 12;
  try {
    GenerateCorpus(w, cfg, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kCapacityExceeded);
  }
}

TEST(CorpusTest, FullScanInvariants) {
  const World w = DefaultWorld();
  CorpusConfig cfg;
  const Corpus c = GenerateCorpus(w, cfg, 7);
  ASSERT_EQ(c.texts.size(), w.styles().size() * 700u);
  std::map<int, std::set<std::vector<int>>> meanings;
  for (const auto& t : c.texts) {
    ASSERT_GE(static_cast<int>(t.tokens.size()), cfg.min_len);
    ASSERT_LE(static_cast<int>(t.tokens.size()), cfg.max_len);
    const StyleSpec& s = w.style(t.style_id);
    std::set<int> allowed;
    for (const auto& d : w.domains())
      if (std::count(d.style_ids.begin(), d.style_ids.end(), t.style_id)) allowed.insert(d.classes.begin(), d.classes.end());
    std::vector<int> meaning;
    for (const auto& tok : t.tokens) {
      const auto word = InvertWord(tok, s, w.lexicon());
      ASSERT_TRUE(word.has_value()) << tok;
      const int cls = w.lexicon().ClassOf(*word);
      ASSERT_TRUE(allowed.count(cls)) << tok;
      meaning.push_back(cls);
    }
    EXPECT_TRUE(meanings[t.style_id].insert(meaning).second) << "duplicate meaning in style " << t.style_id;
  }
  // Paraphrase pairs: same class sequence, plain target, in-domain words only.
  const auto& core = w.in_domain().classes;
  for (const auto& p : c.paraphrase_pairs) {
    const Tokens src = Canonicalize(p.src, w.lexicon(), w.styles());
    ASSERT_EQ(src.size(), p.tgt.size());
    for (std::size_t i = 0; i < src.size(); ++i) {
      ASSERT_TRUE(w.lexicon().Contains(p.tgt[i]));
      EXPECT_EQ(w.lexicon().ClassOf(src[i]), w.lexicon().ClassOf(p.tgt[i]));
      EXPECT_TRUE(std::count(core.begin(), core.end(), w.lexicon().ClassOf(p.tgt[i])));
    }
  }
}

TEST(CorpusTest, JsonlRoundTrip) {
  CorpusConfig cfg;
  cfg.train_per_style = 20;
  cfg.valid_per_style = cfg.test_per_style = 5;
  cfg.paraphrase_pairs = 30;
  const Corpus c = GenerateCorpus(DefaultWorld(), cfg, 11);
  EXPECT_EQ(CorpusFromJsonl(CorpusToJsonl(c.texts)), c.texts);
  EXPECT_EQ(PairsFromJsonl(PairsToJsonl(c.paraphrase_pairs)), c.paraphrase_pairs);
  EXPECT_EQ(Select(c.texts, Split::kValid, {0, 1}).size(), 10u);
}

}  // namespace
}  // namespace stamp::world
