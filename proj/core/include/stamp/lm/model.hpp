// Copyright 2026 The stamp Authors
// SPDX-License-Identifier: Apache-2.0

// A small pre-norm decoder-only transformer with an explicit reverse pass.
//
// Parameters live in one flat buffer so that the optimizer, checkpointing and
// finite-difference checks can treat them uniformly; named tensors are views
// into it. The class is instantiated for float (training and inference) and
// double (gradient checks).

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/StdVector>

#include "stamp/common.hpp"

namespace stamp::lm {

struct ModelConfig {
  int layers = 2;
  int model_dim = 64;
  int heads = 2;
  int context_len = 96;
  int vocab_size = 0;
  int mlp_mult = 4;

  bool operator==(const ModelConfig&) const = default;
  /// Throws Error(kConfigError) on inconsistent sizes.
  void Validate() const;
};

struct TensorInfo {
  std::string name;
  int rows = 0;
  int cols = 0;
  std::size_t offset = 0;
  std::size_t size() const { return static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols); }
};

/// Tensor manifest for a config, in storage order. Offsets are padded to
/// kTensorAlign elements so every tensor starts on a 64-byte boundary; Eigen
/// picks reduction paths by pointer alignment, so a fixed alignment keeps
/// results independent of where the buffer was allocated.
std::vector<TensorInfo> ParameterLayout(const ModelConfig& config);
inline constexpr std::size_t kTensorAlign = 16;

/// Flat buffer length including padding.
std::size_t ParameterCount(const ModelConfig& config);

template <typename T>
using AlignedVector = std::vector<T, Eigen::aligned_allocator<T>>;

template <typename T>
class Transformer {
 public:
  using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  using RowVector = Eigen::Matrix<T, 1, Eigen::Dynamic>;
  using ColVector = Eigen::Matrix<T, Eigen::Dynamic, 1>;

  /// Activations of one forward pass, kept for the reverse pass.
  struct Tape {
    struct Layer {
      Matrix x_in, ln1_hat, ln1_out, qkv, attn, x_mid, ln2_hat, ln2_out, fc_pre, fc_act;
      ColVector ln1_rstd, ln2_rstd;
      std::vector<Matrix> probs;  // per head, causal softmax rows
    };
    std::vector<int> ids;
    std::vector<Layer> layers;
    Matrix x_last, lnf_hat, lnf_out;
    ColVector lnf_rstd;
  };

  Transformer() = default;
  /// Gaussian init (std 0.02, residual projections scaled by 1/sqrt(2L)),
  /// unit LayerNorm gains, zero biases.
  Transformer(const ModelConfig& config, std::uint64_t seed);
  /// Copies existing parameters; size must equal ParameterCount(config).
  Transformer(const ModelConfig& config, std::span<const T> params);

  template <typename U>
  Transformer<U> Cast() const {
    std::vector<U> p(params_.begin(), params_.end());
    return Transformer<U>(config_, std::span<const U>(p));
  }

  const ModelConfig& config() const { return config_; }
  const std::vector<TensorInfo>& layout() const { return layout_; }
  std::span<const T> params() const { return params_; }
  std::span<T> mutable_params() { return params_; }
  std::size_t num_params() const { return params_.size(); }

  /// Per-position logits, shape (len x vocab). Throws kContextOverflow.
  Matrix Logits(std::span<const int> ids) const;
  Matrix Forward(std::span<const int> ids, Tape& tape) const;
  /// Accumulates dLoss/dparams into `grad` given dLoss/dlogits.
  void Backward(const Tape& tape, const Matrix& dlogits, std::span<T> grad) const;

  /// Incremental decoding for a batch of sequences that share a prompt.
  class Decoder {
   public:
    /// Runs the prompt once and replicates its cache `batch` times. Returns
    /// the logits row after the last prompt token.
    RowVector Prefill(std::span<const int> prompt, int batch);
    /// Feeds one token per live sequence; returns (live x vocab) logits.
    Matrix Step(std::span<const int> tokens);
    /// Keeps only the listed live rows (ascending), dropping the others.
    void Retain(std::span<const int> rows);
    int position() const { return pos_; }
    int live() const { return live_; }

   private:
    friend class Transformer;
    explicit Decoder(const Transformer& model) : model_(&model) {}
    const Transformer* model_;
    int pos_ = 0;
    int live_ = 0;
    std::vector<Matrix> k_, v_;  // per layer: (live * context) x dim
  };
  Decoder MakeDecoder() const { return Decoder(*this); }

 private:
  struct LayerOffsets {
    std::size_t ln1_g, ln1_b, w_qkv, b_qkv, w_o, b_o, ln2_g, ln2_b, w_fc, b_fc, w_proj, b_proj;
  };
  void BuildLayout();

  ModelConfig config_;
  std::vector<TensorInfo> layout_;
  AlignedVector<T> params_;
  std::size_t tok_emb_ = 0, pos_emb_ = 0, lnf_g_ = 0, lnf_b_ = 0, w_out_ = 0, b_out_ = 0;
  std::vector<LayerOffsets> layer_offsets_;
};

using Model = Transformer<float>;

extern template class Transformer<float>;
extern template class Transformer<double>;

}  // namespace stamp::lm
