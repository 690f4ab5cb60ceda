// Copyright 2026 The stamp Authors
// SPDX-License-Identifier: Apache-2.0

#include "stamp/lm/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "stamp/lm/sampling.hpp"

namespace stamp::lm {

GroupLoss CrossEntropyLoss() {
  return [](std::span<const double> lp, std::span<const int> count, std::span<double> dlp) {
    if (lp.size() != 1) throw Error(ErrorCode::kFormatError, "cross-entropy expects single-sequence groups");
    const double n = std::max(count[0], 1);
    dlp[0] = -1.0 / n;
    return -lp[0] / n;
  };
}

double CpoPreferenceTerm(double margin, double beta) {
  const double z = beta * margin;
  // -log sigmoid(z) = log(1 + exp(-z))
  return z > 0 ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z));
}

GroupLoss CpoLoss(double beta, double lambda_nll) {
  return [beta, lambda_nll](std::span<const double> lp, std::span<const int> count, std::span<double> dlp) {
    if (lp.size() != 2) throw Error(ErrorCode::kFormatError, "preference loss expects (winner, loser) groups");
    const double z = beta * (lp[0] - lp[1]);
    const double sig_neg = 1.0 / (1.0 + std::exp(z));  // sigmoid(-z)
    const double nw = std::max(count[0], 1);
    dlp[0] = -beta * sig_neg - lambda_nll / nw;
    dlp[1] = beta * sig_neg;
    return CpoPreferenceTerm(lp[0] - lp[1], beta) - lambda_nll * lp[0] / nw;
  };
}

namespace {

template <typename T>
struct Scored {
  typename Transformer<T>::Tape tape;
  typename Transformer<T>::Matrix probs;  // softmax rows at scored positions
  std::size_t start = 0;
  double logprob = 0.0;
};

template <typename T>
void ScoreSequence(const Transformer<T>& model, const Example& ex, Scored<T>& s, bool keep_probs) {
  std::vector<int> ids = Prefix(ex.prompt);
  s.start = ids.size() - 1;
  ids.insert(ids.end(), ex.output.begin(), ex.output.end());
  ids.pop_back();
  const auto logits = model.Forward(ids, s.tape);
  const Eigen::Index n_out = static_cast<Eigen::Index>(ex.output.size());
  if (keep_probs) s.probs.resize(n_out, logits.cols());
  s.logprob = 0.0;
  for (Eigen::Index i = 0; i < n_out; ++i) {
    const auto row = logits.row(static_cast<Eigen::Index>(s.start) + i);
    const T mx = row.maxCoeff();
    const auto e = (row.array() - mx).exp();
    const T z = e.sum();
    s.logprob += static_cast<double>(row(ex.output[i]) - mx) - std::log(static_cast<double>(z));
    if (keep_probs) s.probs.row(i) = e / z;
  }
}

template <typename T>
double Evaluate(const Transformer<T>& model, std::span<const Example> group, const GroupLoss& loss,
                std::vector<Scored<T>>& scored, std::vector<double>& dlp, bool keep_probs) {
  const std::size_t k = group.size();
  if (k == 0) throw Error(ErrorCode::kEmptyDataset, "empty loss group");
  scored.resize(k);
  std::vector<double> lp(k);
  std::vector<int> count(k);
  for (std::size_t j = 0; j < k; ++j) {
    if (group[j].output.empty()) throw Error(ErrorCode::kEmptyOutput, "training sequence without output tokens");
    ScoreSequence(model, group[j], scored[j], keep_probs);
    lp[j] = scored[j].logprob;
    count[j] = static_cast<int>(group[j].output.size());
  }
  dlp.assign(k, 0.0);
  const double value = loss(lp, count, dlp);
  if (!std::isfinite(value)) {
    std::string detail = "non-finite loss; sequence log-probs:";
    for (double v : lp) detail += " " + std::to_string(v);
    throw Error(ErrorCode::kNumericalFailure, detail);
  }
  return value;
}

}  // namespace

template <typename T>
double GroupLossGrad(const Transformer<T>& model, std::span<const Example> group, const GroupLoss& loss,
                     std::span<T> grad) {
  std::vector<Scored<T>> scored;
  std::vector<double> dlp;
  const double value = Evaluate(model, group, loss, scored, dlp, true);
  for (std::size_t j = 0; j < group.size(); ++j) {
    if (dlp[j] == 0.0) continue;
    const Scored<T>& s = scored[j];
    const auto& out = group[j].output;
    typename Transformer<T>::Matrix dlogits =
        Transformer<T>::Matrix::Zero(static_cast<Eigen::Index>(s.tape.ids.size()), model.config().vocab_size);
    const T c = static_cast<T>(dlp[j]);
    for (std::size_t i = 0; i < out.size(); ++i) {
      const Eigen::Index r = static_cast<Eigen::Index>(s.start + i);
      dlogits.row(r) = -c * s.probs.row(static_cast<Eigen::Index>(i));
      dlogits(r, out[i]) += c;
    }
    model.Backward(s.tape, dlogits, grad);
  }
  return value;
}

template <typename T>
double GroupLossValue(const Transformer<T>& model, std::span<const Example> group, const GroupLoss& loss) {
  std::vector<Scored<T>> scored;
  std::vector<double> dlp;
  return Evaluate(model, group, loss, scored, dlp, false);
}

template double GroupLossGrad(const Transformer<float>&, std::span<const Example>, const GroupLoss&,
                              std::span<float>);
template double GroupLossGrad(const Transformer<double>&, std::span<const Example>, const GroupLoss&,
                              std::span<double>);
template double GroupLossValue(const Transformer<float>&, std::span<const Example>, const GroupLoss&);
template double GroupLossValue(const Transformer<double>&, std::span<const Example>, const GroupLoss&);

double MeanLoss(const Model& model, const std::vector<Group>& groups, const GroupLoss& loss, int jobs) {
  if (groups.empty()) return 0.0;
  std::vector<double> values(groups.size());
  ParallelFor(groups.size(), jobs, [&](std::size_t i) { values[i] = GroupLossValue(model, groups[i], loss); });
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

TrainHistory TrainGroups(Model& model, Adam& adam, const std::vector<Group>& train, const std::vector<Group>& valid,
                         const GroupLoss& loss, const TrainParams& params, std::uint64_t seed, int jobs) {
  if (params.batch_size < 1) throw Error(ErrorCode::kConfigError, "batch_size must be >= 1");
  TrainHistory history;
  if (!valid.empty()) history.initial_valid_loss = MeanLoss(model, valid, loss, jobs);
  if (train.empty() || params.epochs <= 0) return history;

  const std::size_t n_params = model.num_params();
  std::vector<std::size_t> order(train.size());
  std::vector<float> grad(n_params);
  const std::size_t bs = static_cast<std::size_t>(params.batch_size);
  std::vector<AlignedVector<float>> slot_grads(std::min(bs, train.size()), AlignedVector<float>(n_params));
  std::vector<double> slot_loss(slot_grads.size());

  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(DeriveSeed(seed, {static_cast<std::uint64_t>(epoch)}));
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    for (std::size_t begin = 0; begin < order.size(); begin += bs) {
      const std::size_t end = std::min(order.size(), begin + bs);
      const std::size_t b = end - begin;
      // Per-group buffers summed in index order keep results independent of jobs.
      ParallelFor(b, jobs, [&](std::size_t k) {
        std::fill(slot_grads[k].begin(), slot_grads[k].end(), 0.0f);
        slot_loss[k] = GroupLossGrad(static_cast<const Model&>(model), train[order[begin + k]], loss,
                                     std::span<float>(slot_grads[k]));
      });
      std::fill(grad.begin(), grad.end(), 0.0f);
      const float inv_b = 1.0f / static_cast<float>(b);
      for (std::size_t k = 0; k < b; ++k) {
        epoch_loss += slot_loss[k];
        const float* g = slot_grads[k].data();
        for (std::size_t i = 0; i < n_params; ++i) grad[i] += g[i];
      }
      for (float& g : grad) g *= inv_b;
      adam.Step(model.mutable_params(), grad, params.lr);
    }
    history.train_loss.push_back(epoch_loss / static_cast<double>(train.size()));
    if (!valid.empty()) history.valid_loss.push_back(MeanLoss(model, valid, loss, jobs));
    LogInfo("epoch " + std::to_string(epoch + 1) + "/" + std::to_string(params.epochs) +
            " train_loss=" + std::to_string(history.train_loss.back()) +
            (valid.empty() ? "" : " valid_loss=" + std::to_string(history.valid_loss.back())));
  }
  return history;
}

}  // namespace stamp::lm
