// Copyright 2026 The stamp Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <numeric>
#include <random>

#include "stamp/lm/model.hpp"
#include "stamp/lm/sampling.hpp"
#include "stamp/rewards.hpp"
#include "stamp/selection.hpp"
#include "stamp/weight_solver.hpp"
#include "stamp/world.hpp"

namespace stamp {
namespace {

lm::ModelConfig DefaultArch() {
  lm::ModelConfig c;
  c.vocab_size = 200;
  return c;
}

std::vector<int> Ids(int n) {
  std::vector<int> ids(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) ids[static_cast<std::size_t>(i)] = 5 + (i * 37) % 190;
  return ids;
}

void BM_Forward(benchmark::State& state) {
  const lm::Model model(DefaultArch(), 1);
  const auto ids = Ids(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(model.Logits(ids));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Forward)->Arg(16)->Arg(32)->Arg(64);

void BM_ForwardBackward(benchmark::State& state) {
  const lm::Model model(DefaultArch(), 1);
  const auto ids = Ids(static_cast<int>(state.range(0)));
  std::vector<float> grad(model.num_params());
  lm::Model::Tape tape;
  for (auto _ : state) {
    const auto logits = model.Forward(ids, tape);
    const lm::Model::Matrix dlogits = lm::Model::Matrix::Constant(logits.rows(), logits.cols(), 1e-3f);
    model.Backward(tape, dlogits, grad);
    benchmark::DoNotOptimize(grad.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ForwardBackward)->Arg(16)->Arg(32)->Arg(64);

void BM_SampleMany(benchmark::State& state) {
  const lm::Model model(DefaultArch(), 1);
  const auto prompt = Ids(10);
  const lm::SampleParams params{1.0, 1.0, 14};
  std::uint64_t seed = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(lm::SampleMany(model, prompt, static_cast<int>(state.range(0)), params, ++seed));
}
BENCHMARK(BM_SampleMany)->Arg(1)->Arg(10)->Arg(20);

void BM_Score(benchmark::State& state) {
  const world::World w = world::DefaultWorld();
  const auto& lex = w.lexicon();
  const Tokens src = world::RenderStyle({lex.words()[0], lex.words()[4], lex.words()[9]}, w.style(0), lex).tokens;
  const Tokens out = world::RenderStyle({lex.words()[1], lex.words()[5], lex.words()[8]}, w.style(1), lex).tokens;
  for (auto _ : state) benchmark::DoNotOptimize(rewards::Score(src, out, 1, w));
}
BENCHMARK(BM_Score);

void BM_SolveWeights(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<po::CandidatePool> pools(static_cast<std::size_t>(state.range(0)));
  for (auto& pool : pools)
    for (int i = 0; i < 10; ++i) pool.push_back({{"c" + std::to_string(i)}, 1.0, {u(rng), u(rng), u(rng)}});
  const po::SelectorConfig sel;
  const rewards::PairSelector select = [&](std::size_t, const po::CandidatePool& p, const rewards::AggWeights& w) {
    return po::SelectPair(p, sel, w);
  };
  for (auto _ : state) benchmark::DoNotOptimize(rewards::SolveWeights(pools, 6, select));
}
BENCHMARK(BM_SolveWeights)->Arg(100)->Arg(1200);

}  // namespace
}  // namespace stamp

BENCHMARK_MAIN();
