// Copyright 2026 The stamp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace stamp::lm {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  /// Global gradient-norm clip; <= 0 disables clipping.
  double clip_norm = 1.0;
};

/// Adam with bias correction over a flat float parameter buffer.
class Adam {
 public:
  Adam() = default;
  Adam(std::size_t num_params, AdamConfig config = {});

  /// Clips `grad` in place, then applies one update. Returns the pre-clip
  /// gradient norm.
  double Step(std::span<float> params, std::span<float> grad, double lr);

  const AdamConfig& config() const { return config_; }
  std::int64_t steps() const { return steps_; }
  std::vector<float>& m() { return m_; }
  std::vector<float>& v() { return v_; }
  const std::vector<float>& m() const { return m_; }
  const std::vector<float>& v() const { return v_; }
  void set_steps(std::int64_t steps) { steps_ = steps; }

 private:
  AdamConfig config_;
  std::int64_t steps_ = 0;
  std::vector<float> m_, v_;
};

}  // namespace stamp::lm
