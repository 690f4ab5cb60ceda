// Copyright 2026 The stamp Authors
// SPDX-License-Identifier: Apache-2.0

#include "stamp/lm/optimizer.hpp"

#include <cmath>

#include "stamp/common.hpp"

namespace stamp::lm {

Adam::Adam(std::size_t num_params, AdamConfig config)
    : config_(config), m_(num_params, 0.0f), v_(num_params, 0.0f) {}

double Adam::Step(std::span<float> params, std::span<float> grad, double lr) {
  if (params.size() != m_.size() || grad.size() != m_.size())
    throw Error(ErrorCode::kFormatError, "optimizer state does not match parameter count");
  double sq = 0.0;
  for (float g : grad) sq += static_cast<double>(g) * g;
  const double norm = std::sqrt(sq);
  if (!std::isfinite(norm)) throw Error(ErrorCode::kNumericalFailure, "non-finite gradient norm");
  double scale = 1.0;
  if (config_.clip_norm > 0.0 && norm > config_.clip_norm) scale = config_.clip_norm / norm;

  ++steps_;
  const double b1 = config_.beta1, b2 = config_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(steps_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(steps_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grad[i] * scale;
    grad[i] = static_cast<float>(g);
    const double m = b1 * m_[i] + (1.0 - b1) * g;
    const double v = b2 * v_[i] + (1.0 - b2) * g * g;
    m_[i] = static_cast<float>(m);
    v_[i] = static_cast<float>(v);
    params[i] = static_cast<float>(params[i] - lr * (m / c1) / (std::sqrt(v / c2) + config_.eps));
  }
  return norm;
}

}  // namespace stamp::lm
