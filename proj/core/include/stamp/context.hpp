// Copyright 2026 The stamp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "stamp/lm/tokenizer.hpp"
#include "stamp/world.hpp"

namespace stamp {

/// Shared read-only state for the pipeline stages.
struct RunContext {
  const world::World* world = nullptr;
  const lm::Tokenizer* tokenizer = nullptr;
  int jobs = 1;
};

}  // namespace stamp
