// Copyright 2026 The stamp Authors
// SPDX-License-Identifier: Apache-2.0

#include "stamp/common.hpp"

#include <gtest/gtest.h>

#include <atomic>
#include <filesystem>
#include <set>

namespace stamp {
namespace {

TEST(DeriveSeedTest, DistinctStreams) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t a = 0; a < 50; ++a)
    for (std::uint64_t b = 0; b < 50; ++b) seen.insert(DeriveSeed(7, {a, b}));
  EXPECT_EQ(seen.size(), 2500u);
  EXPECT_EQ(DeriveSeed(7, {1, 2}), DeriveSeed(7, {1, 2}));
  EXPECT_NE(DeriveSeed(7, {1, 2}), DeriveSeed(7, {2, 1}));
  EXPECT_NE(DeriveSeed(7, {1}), DeriveSeed(8, {1}));
  EXPECT_NE(DeriveSeed(7, {0}), DeriveSeed(7, {0, 0}));
}

TEST(ParallelForTest, VisitsEveryIndexOnce) {
  for (int jobs : {1, 2, 3, 8}) {
    std::vector<std::atomic<int>> hits(101);
    ParallelFor(hits.size(), jobs, [&](std::size_t i) { hits[i]++; });
    for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
  }
  ParallelFor(0, 4, [](std::size_t) { FAIL(); });
}

TEST(ParallelForTest, PropagatesExceptions) {
  EXPECT_THROW(ParallelFor(10, 3,
                           [](std::size_t i) {
                             if (i == 7) throw Error(ErrorCode::kNumericalFailure, "boom");
                           }),
               Error);
}

TEST(TextTest, JoinAndSplit) {
  EXPECT_EQ(Join({"a", "bb", "c"}), "a bb c");
  EXPECT_EQ(Join({}), "");
  EXPECT_EQ(SplitWords("  a  bb\tc \n"), (Tokens{"a", "bb", "c"}));
  EXPECT_TRUE(SplitWords("").empty());
}

TEST(Sha256Test, KnownVectors) {
  EXPECT_EQ(Sha256Hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(Sha256Hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(FileTest, AtomicWriteAndRead) {
  const auto dir = std::filesystem::temp_directory_path() / "stamp_common_test" / "nested";
  std::filesystem::remove_all(dir.parent_path());
  const std::string path = (dir / "f.txt").string();
  WriteFile(path, "hello");
  EXPECT_EQ(ReadFile(path), "hello");
  EXPECT_EQ(Sha256File(path), Sha256Hex("hello"));
  WriteFile(path, "bye");
  EXPECT_EQ(ReadFile(path), "bye");
  try {
    ReadFile((dir / "missing").string());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIoError);
  }
  std::filesystem::remove_all(dir.parent_path());
}

TEST(ErrorTest, CarriesCode) {
  const Error e(ErrorCode::kDegeneratePool, "pool 3");
  EXPECT_EQ(e.code(), ErrorCode::kDegeneratePool);
  EXPECT_NE(std::string(e.what()).find("pool 3"), std::string::npos);
  EXPECT_EQ(ToString(ErrorCode::kConfigError), "ConfigError");
}

}  // namespace
}  // namespace stamp
