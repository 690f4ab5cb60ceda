// Copyright 2026 The stamp Authors
// SPDX-License-Identifier: Apache-2.0

#include "stamp/common.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <thread>

namespace stamp {

std::string_view ToString(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidContent: return "InvalidContent";
    case ErrorCode::kCapacityExceeded: return "CapacityExceeded";
    case ErrorCode::kCollision: return "Collision";
    case ErrorCode::kDegeneratePool: return "DegeneratePool";
    case ErrorCode::kContextOverflow: return "ContextOverflow";
    case ErrorCode::kEmptyOutput: return "EmptyOutput";
    case ErrorCode::kNumericalFailure: return "NumericalFailure";
    case ErrorCode::kEmptyDataset: return "EmptyDataset";
    case ErrorCode::kMissingStyle: return "MissingStyle";
    case ErrorCode::kEmptyPreferenceData: return "EmptyPreferenceData";
    case ErrorCode::kAlignmentError: return "AlignmentError";
    case ErrorCode::kConfigError: return "ConfigError";
    case ErrorCode::kFormatError: return "FormatError";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

namespace {

std::uint64_t SplitMix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::atomic<bool> g_verbose{true};

}  // namespace

std::uint64_t DeriveSeed(std::uint64_t base, std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = SplitMix(base);
  for (std::uint64_t p : parts) h = SplitMix(h ^ SplitMix(p + 0x632be59bd9b4e019ULL));
  return h;
}

void ParallelFor(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers =
      std::min<std::size_t>(n, static_cast<std::size_t>(std::max(jobs, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(workers);
  const std::size_t block = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      try {
        const std::size_t lo = w * block;
        const std::size_t hi = std::min(n, lo + block);
        for (std::size_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::string Join(const Tokens& tokens, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += sep;
    out += tokens[i];
  }
  return out;
}

Tokens SplitWords(std::string_view text) {
  std::istringstream in{std::string(text)};
  return Tokens(std::istream_iterator<std::string>(in), std::istream_iterator<std::string>());
}

std::string Sha256Hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xf];
  }
  return out;
}

std::string Sha256File(const std::string& path) { return Sha256Hex(ReadFile(path)); }

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void WriteFile(const std::string& path, std::string_view content) {
  const std::filesystem::path target(path);
  if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path());
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIoError, "cannot write " + tmp);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(ErrorCode::kIoError, "short write to " + tmp);
  }
  std::filesystem::rename(tmp, target);
}

void SetVerbose(bool verbose) { g_verbose = verbose; }

void LogInfo(const std::string& msg) {
  if (g_verbose) std::cerr << "[stamp] " << msg << '\n';
}

void LogWarn(const std::string& msg) { std::cerr << "[stamp][warn] " << msg << '\n'; }

}  // namespace stamp
