// Copyright 2026 The stamp Authors
// SPDX-License-Identifier: Apache-2.0

// Sequence-level losses and the minibatch training loop. Every loss here is a
// function of whole-sequence log-probabilities, so one reverse pass serves
// cross-entropy and the preference loss alike: the closure reports
// dLoss/dlogprob per sequence and the token-level gradient follows as
// dlogprob * (onehot - softmax) at each scored position.

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "stamp/lm/model.hpp"
#include "stamp/lm/optimizer.hpp"

namespace stamp::lm {

/// One scored sequence. `output` carries the trailing [EOS] when it should
/// be learned.
struct Example {
  std::vector<int> prompt;
  std::vector<int> output;
};

/// A set of sequences whose log-probs feed one loss term.
using Group = std::vector<Example>;

/// Returns the loss of one group given per-sequence log-probs and output
/// lengths, writing dLoss/dlogprob into `dlogprob`.
using GroupLoss = std::function<double(std::span<const double> logprob, std::span<const int> count,
                                       std::span<double> dlogprob)>;

/// Token-mean negative log-likelihood of a single sequence.
GroupLoss CrossEntropyLoss();

/// Groups of (winner, loser):
///   -log sigmoid(beta * (L_w - L_l)) + lambda * (-L_w / |w|).
GroupLoss CpoLoss(double beta, double lambda_nll);

/// -log sigmoid(beta * margin), computed stably.
double CpoPreferenceTerm(double margin, double beta);

/// Loss of one group; accumulates its gradient into `grad`. Throws
/// Error(kNumericalFailure) on a non-finite loss.
template <typename T>
double GroupLossGrad(const Transformer<T>& model, std::span<const Example> group, const GroupLoss& loss,
                     std::span<T> grad);

/// Loss without gradient.
template <typename T>
double GroupLossValue(const Transformer<T>& model, std::span<const Example> group, const GroupLoss& loss);

struct TrainParams {
  int epochs = 1;
  int batch_size = 16;
  double lr = 1e-3;
};

/// Mean group loss per epoch. train_loss is accumulated during the epoch;
/// valid_loss is measured after it. initial_valid_loss precedes training.
struct TrainHistory {
  std::vector<double> train_loss;
  std::vector<double> valid_loss;
  double initial_valid_loss = 0.0;
};

/// Shuffled minibatch Adam over groups; batch loss is the mean group loss.
TrainHistory TrainGroups(Model& model, Adam& adam, const std::vector<Group>& train, const std::vector<Group>& valid,
                         const GroupLoss& loss, const TrainParams& params, std::uint64_t seed, int jobs = 1);

double MeanLoss(const Model& model, const std::vector<Group>& groups, const GroupLoss& loss, int jobs = 1);

}  // namespace stamp::lm
