// Copyright 2026 The stamp Authors
// SPDX-License-Identifier: Apache-2.0

#include "stamp/lm/checkpoint.hpp"

#include <bit>
#include <cstring>

#include "json.hpp"

namespace stamp::lm {

using nlohmann::json;

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

namespace {

// Tensors are stored back to back; the in-memory padding is not written.
void AppendTensors(std::string& out, const std::vector<TensorInfo>& layout, std::span<const float> values) {
  for (const auto& t : layout) {
    const std::size_t at = out.size();
    out.resize(at + t.size() * sizeof(float));
    std::memcpy(out.data() + at, values.data() + t.offset, t.size() * sizeof(float));
  }
}

}  // namespace

std::string SerializeCheckpoint(const Checkpoint& ckpt) {
  const ModelConfig& c = ckpt.model.config();
  json header;
  header["format_version"] = kCheckpointFormatVersion;
  header["config"] = {{"layers", c.layers},           {"model_dim", c.model_dim}, {"heads", c.heads},
                      {"context_len", c.context_len}, {"vocab_size", c.vocab_size}, {"mlp_mult", c.mlp_mult}};
  json tensors = json::array();
  for (const auto& t : ckpt.model.layout()) tensors.push_back({{"name", t.name}, {"shape", {t.rows, t.cols}}});
  if (ckpt.optimizer) {
    for (const char* prefix : {"adam_m/", "adam_v/"})
      for (const auto& t : ckpt.model.layout())
        tensors.push_back({{"name", std::string(prefix) + t.name}, {"shape", {t.rows, t.cols}}});
    header["adam_steps"] = ckpt.optimizer->steps();
  }
  header["tensors"] = std::move(tensors);
  header["vocab"] = ckpt.tokenizer.vocab();
  header["seed"] = ckpt.seed;

  std::string out = header.dump();
  out.push_back('\n');
  AppendTensors(out, ckpt.model.layout(), ckpt.model.params());
  if (ckpt.optimizer) {
    AppendTensors(out, ckpt.model.layout(), ckpt.optimizer->m());
    AppendTensors(out, ckpt.model.layout(), ckpt.optimizer->v());
  }
  return out;
}

std::string CheckpointHeader(std::string_view bytes) {
  const std::size_t nl = bytes.find('\n');
  if (nl == std::string_view::npos) throw Error(ErrorCode::kFormatError, "checkpoint header is not terminated");
  return std::string(bytes.substr(0, nl));
}

Checkpoint DeserializeCheckpoint(std::string_view bytes) {
  const std::string head = CheckpointHeader(bytes);
  json h;
  try {
    h = json::parse(head);
    const int version = h.at("format_version").get<int>();
    if (version != kCheckpointFormatVersion)
      throw Error(ErrorCode::kFormatError, "unsupported checkpoint format_version " + std::to_string(version));
    ModelConfig c;
    const json& jc = h.at("config");
    c.layers = jc.at("layers").get<int>();
    c.model_dim = jc.at("model_dim").get<int>();
    c.heads = jc.at("heads").get<int>();
    c.context_len = jc.at("context_len").get<int>();
    c.vocab_size = jc.at("vocab_size").get<int>();
    c.mlp_mult = jc.at("mlp_mult").get<int>();
    c.Validate();

    const auto layout = ParameterLayout(c);
    const json& tensors = h.at("tensors");
    const bool has_adam = h.contains("adam_steps");
    const std::size_t expect_tensors = layout.size() * (has_adam ? 3 : 1);
    if (tensors.size() != expect_tensors) throw Error(ErrorCode::kFormatError, "tensor manifest size mismatch");
    for (std::size_t i = 0; i < tensors.size(); ++i) {
      const auto& t = layout[i % layout.size()];
      const std::string prefix = i < layout.size() ? "" : (i < 2 * layout.size() ? "adam_m/" : "adam_v/");
      const auto shape = tensors[i].at("shape").get<std::vector<int>>();
      if (tensors[i].at("name").get<std::string>() != prefix + t.name || shape.size() != 2 || shape[0] != t.rows ||
          shape[1] != t.cols)
        throw Error(ErrorCode::kFormatError, "tensor manifest entry " + std::to_string(i) + " does not match config");
    }

    const std::size_t n = ParameterCount(c);
    std::size_t stored = 0;
    for (const auto& t : layout) stored += t.size();
    const std::size_t body = bytes.size() - head.size() - 1;
    if (body != stored * sizeof(float) * (has_adam ? 3 : 1))
      throw Error(ErrorCode::kFormatError, "checkpoint payload has " + std::to_string(body) + " bytes");
    const char* p = bytes.data() + head.size() + 1;
    auto read = [&](std::vector<float>& dst) {
      dst.assign(n, 0.0f);
      for (const auto& t : layout) {
        std::memcpy(dst.data() + t.offset, p, t.size() * sizeof(float));
        p += t.size() * sizeof(float);
      }
    };

    Checkpoint ckpt;
    std::vector<float> params;
    read(params);
    ckpt.model = Model(c, std::span<const float>(params));
    ckpt.tokenizer = Tokenizer(h.at("vocab").get<std::vector<std::string>>());
    if (ckpt.tokenizer.size() != c.vocab_size) throw Error(ErrorCode::kFormatError, "vocabulary size mismatch");
    ckpt.seed = h.at("seed").get<std::uint64_t>();
    if (has_adam) {
      Adam adam(n);
      read(adam.m());
      read(adam.v());
      adam.set_steps(h.at("adam_steps").get<std::int64_t>());
      ckpt.optimizer = std::move(adam);
    }
    return ckpt;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormatError, std::string("checkpoint header: ") + e.what());
  }
}

void SaveCheckpoint(const std::string& path, const Checkpoint& ckpt) { WriteFile(path, SerializeCheckpoint(ckpt)); }

Checkpoint LoadCheckpoint(const std::string& path) { return DeserializeCheckpoint(ReadFile(path)); }

}  // namespace stamp::lm
