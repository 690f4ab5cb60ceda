// Copyright 2026 The stamp Authors
// SPDX-License-Identifier: Apache-2.0

#include "stamp/po.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <tuple>

#include "json.hpp"
#include "jsonl.hpp"
#include "stamp/sft.hpp"

namespace stamp::po {

using nlohmann::json;

namespace {

enum Stream : std::uint64_t { kSources = 1, kPools = 2, kSelect = 3, kTrain = 4, kValid = 5 };

struct PoolSlot {
  std::size_t source_index = 0;
  int target = 0;
  std::uint64_t select_seed = 0;
  std::optional<CandidatePool> pool;
};

std::vector<world::StyledText> DrawSources(const std::vector<world::StyledText>& texts,
                                           const std::vector<int>& style_ids, int per_style, std::uint64_t seed) {
  std::vector<world::StyledText> out;
  for (int s : style_ids) {
    std::vector<const world::StyledText*> pool;
    for (const auto& t : texts)
      if (t.style_id == s) pool.push_back(&t);
    std::vector<std::size_t> order(pool.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(DeriveSeed(seed, {static_cast<std::uint64_t>(s)}));
    std::shuffle(order.begin(), order.end(), rng);
    order.resize(std::min(order.size(), static_cast<std::size_t>(std::max(per_style, 0))));
    for (std::size_t i : order) out.push_back(*pool[i]);
  }
  return out;
}

std::vector<world::StyledText> FirstPerStyle(const std::vector<world::StyledText>& texts,
                                             const std::vector<int>& style_ids, int per_style) {
  std::vector<world::StyledText> out;
  for (int s : style_ids) {
    int taken = 0;
    for (const auto& t : texts)
      if (t.style_id == s && taken < per_style) {
        out.push_back(t);
        ++taken;
      }
  }
  return out;
}

}  // namespace

std::string_view ToString(PoolOutcome o) {
  switch (o) {
    case PoolOutcome::kKept: return "kept";
    case PoolOutcome::kDropped: return "dropped";
    case PoolOutcome::kDegenerate: return "degenerate";
  }
  return "?";
}

CandidatePool GenerateCandidates(const RunContext& ctx, const lm::Model& ref, const world::StyledText& x,
                                 int target_style, int k, const lm::SampleParams& params, std::uint64_t seed) {
  if (k < 2) throw Error(ErrorCode::kConfigError, "k_po must be >= 2");
  const auto& tok = *ctx.tokenizer;
  const auto prompt = sft::UnifiedPrompt(tok, x.tokens, target_style);
  const auto samples = lm::SampleMany(ref, prompt, k, params, seed);
  CandidatePool pool;
  std::set<Tokens> seen;
  for (const auto& ids : samples) {
    Tokens text = tok.Decode(ids);
    if (!seen.insert(text).second) continue;
    auto out = tok.Encode(text);
    out.push_back(lm::Tokenizer::kEos);
    Candidate c;
    c.m = lm::ModelScore(ref, prompt, out);
    c.rewards = rewards::Score(x.tokens, text, target_style, *ctx.world);
    c.text = std::move(text);
    pool.push_back(std::move(c));
  }
  if (pool.size() < 2)
    throw Error(ErrorCode::kDegeneratePool, "only " + std::to_string(pool.size()) + " distinct candidate(s)");
  return pool;
}

PoDataset BuildPoDataset(const RunContext& ctx, const lm::Model& ref, const std::vector<world::StyledText>& sources,
                         const std::vector<int>& style_ids, const PoConfig& cfg, std::uint64_t seed) {
  if (sources.empty()) throw Error(ErrorCode::kEmptyDataset, "no PO sources");
  std::vector<PoolSlot> slots;
  for (std::size_t i = 0; i < sources.size(); ++i)
    for (int s : style_ids)
      if (s != sources[i].style_id)
        slots.push_back({i, s, DeriveSeed(seed, {kSelect, i, static_cast<std::uint64_t>(s)}), std::nullopt});

  const lm::SampleParams params{cfg.temperature, cfg.top_p, cfg.max_len};
  ParallelFor(slots.size(), ctx.jobs, [&](std::size_t j) {
    PoolSlot& slot = slots[j];
    try {
      slot.pool = GenerateCandidates(ctx, ref, sources[slot.source_index], slot.target, cfg.selector.k_po, params,
                                     DeriveSeed(seed, {kPools, slot.source_index, static_cast<std::uint64_t>(slot.target)}));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kDegeneratePool) throw;
    }
  });

  PoDataset out;
  out.pools = slots.size();
  std::vector<const PoolSlot*> live;
  std::vector<CandidatePool> pools;
  for (const auto& slot : slots) {
    if (slot.pool) {
      live.push_back(&slot);
      pools.push_back(*slot.pool);
    } else {
      ++out.degenerate;
      out.logs.push_back({slot.source_index, slot.target, PoolOutcome::kDegenerate, 0, 0, 0, -1, {}});
    }
  }
  if (pools.empty()) throw Error(ErrorCode::kEmptyPreferenceData, "every candidate pool was degenerate");

  const rewards::PairSelector select = [&](std::size_t idx, const CandidatePool& pool, const rewards::AggWeights& w) {
    return SelectPair(pool, cfg.selector, w, live[idx]->select_seed);
  };
  out.weights = cfg.weighted ? rewards::SolveWeights(pools, cfg.tau_max, select, &out.trace, ctx.jobs)
                             : rewards::AggWeights{1, 1, 1, cfg.tau_max};

  for (std::size_t idx = 0; idx < pools.size(); ++idx) {
    const PairChoice c = select(idx, pools[idx], out.weights);
    PoolLog log{live[idx]->source_index, live[idx]->target, c.kept ? PoolOutcome::kKept : PoolOutcome::kDropped,
                pools[idx].size(), c.winner, c.loser, c.random_draw, {}, live[idx]->select_seed};
    for (const auto& cand : pools[idx]) log.agg.push_back(rewards::Aggregate(cand.rewards, out.weights));
    out.logs.push_back(std::move(log));
    if (!c.kept) {
      ++out.dropped;
      continue;
    }
    out.pairs.push_back(
        {sources[live[idx]->source_index], live[idx]->target, pools[idx][c.winner].text, pools[idx][c.loser].text});
  }
  std::sort(out.logs.begin(), out.logs.end(), [](const PoolLog& a, const PoolLog& b) {
    return std::tie(a.source_index, a.target_style) < std::tie(b.source_index, b.target_style);
  });

  LogInfo("D_PO: " + std::to_string(out.pairs.size()) + " pairs from " + std::to_string(out.pools) + " pools (" +
          std::to_string(out.degenerate) + " degenerate, " + std::to_string(out.dropped) + " dropped); weights (" +
          std::to_string(out.weights.alpha) + "," + std::to_string(out.weights.beta) + "," +
          std::to_string(out.weights.gamma) + ")");
  if (out.pairs.empty()) throw Error(ErrorCode::kEmptyPreferenceData, "no preference pair survived selection");
  if (static_cast<double>(out.pairs.size()) < cfg.min_pool_yield * static_cast<double>(out.pools))
    throw Error(ErrorCode::kEmptyPreferenceData,
                "only " + std::to_string(out.pairs.size()) + " of " + std::to_string(out.pools) + " pools yielded pairs");
  return out;
}

std::vector<lm::Group> PairGroups(const lm::Tokenizer& tok, const std::vector<PreferencePair>& pairs) {
  std::vector<lm::Group> groups;
  groups.reserve(pairs.size());
  for (const auto& p : pairs) {
    const auto prompt = sft::UnifiedPrompt(tok, p.source.tokens, p.target_style);
    auto w = tok.Encode(p.winner);
    auto l = tok.Encode(p.loser);
    w.push_back(lm::Tokenizer::kEos);
    l.push_back(lm::Tokenizer::kEos);
    groups.push_back({{prompt, std::move(w)}, {prompt, std::move(l)}});
  }
  return groups;
}

double CpoLossValue(const RunContext& ctx, const lm::Model& model, const std::vector<PreferencePair>& pairs,
                    const PoConfig& cfg) {
  return lm::MeanLoss(model, PairGroups(*ctx.tokenizer, pairs), lm::CpoLoss(cfg.cpo_beta, cfg.lambda_nll), ctx.jobs);
}

lm::Model TrainPoIteration(const RunContext& ctx, const lm::Model& ref, const std::vector<PreferencePair>& pairs,
                           const PoConfig& cfg, std::uint64_t seed, lm::TrainHistory* history) {
  if (pairs.empty()) throw Error(ErrorCode::kEmptyPreferenceData, "empty preference dataset");
  lm::Model model = ref;
  lm::Adam adam(model.num_params());
  auto h = lm::TrainGroups(model, adam, PairGroups(*ctx.tokenizer, pairs), {},
                           lm::CpoLoss(cfg.cpo_beta, cfg.lambda_nll), cfg.train, seed, ctx.jobs);
  if (history) *history = std::move(h);
  return model;
}

double ValidationTss(const RunContext& ctx, const lm::Model& model, const std::vector<world::StyledText>& sources,
                     const std::vector<int>& style_ids, const lm::SampleParams& params, std::uint64_t seed) {
  struct Job {
    std::size_t i;
    int target;
  };
  std::vector<Job> jobs;
  for (std::size_t i = 0; i < sources.size(); ++i)
    for (int s : style_ids)
      if (s != sources[i].style_id) jobs.push_back({i, s});
  if (jobs.empty()) return 0.0;
  std::vector<double> tss(jobs.size());
  ParallelFor(jobs.size(), ctx.jobs, [&](std::size_t j) {
    const auto& job = jobs[j];
    const Tokens out = sft::UnifiedTransfer(ctx, model, sources[job.i].tokens, job.target, params,
                                            DeriveSeed(seed, {job.i, static_cast<std::uint64_t>(job.target)}));
    tss[j] = rewards::TssScore(out, ctx.world->style(job.target), ctx.world->lexicon());
  });
  return std::accumulate(tss.begin(), tss.end(), 0.0) / static_cast<double>(tss.size());
}

StopDecision RunIterations(double tss0, int n_iter, const std::function<double(int)>& run_iteration,
                           bool stop_early) {
  StopDecision d;
  double prev = tss0;
  for (int i = 1; i <= n_iter; ++i) {
    const double tss = run_iteration(i);
    d.tss.push_back(tss);
    d.iterations_run = i;
    if (stop_early && tss < prev) {
      d.selected = i - 1;
      d.stopped_early = true;
      return d;
    }
    prev = tss;
  }
  d.selected = d.iterations_run;
  return d;
}

MultiIterationResult RunMultiIteration(const RunContext& ctx, const lm::Model& f_sft,
                                       const std::vector<world::StyledText>& train,
                                       const std::vector<world::StyledText>& valid,
                                       const std::vector<int>& style_ids, const PoConfig& cfg, std::uint64_t seed,
                                       const IterationHooks& hooks) {
  const auto valid_sources = FirstPerStyle(valid, style_ids, cfg.valid_sources_per_style);
  const lm::SampleParams valid_params{cfg.valid_temperature, cfg.top_p, cfg.max_len};
  const std::uint64_t valid_seed = DeriveSeed(seed, {kValid});
  auto sha = [&](const lm::Model& m) { return hooks.sha ? hooks.sha(m) : std::string(); };

  MultiIterationResult result;
  result.tss0 = ValidationTss(ctx, f_sft, valid_sources, style_ids, valid_params, valid_seed);
  LogInfo("validation TSS of the SFT model: " + std::to_string(result.tss0));

  std::vector<lm::Model> models{f_sft};  // models[i] is model_i; models[0] = f_sft
  result.decision = RunIterations(result.tss0, cfg.n_iter, [&](int i) {
    const std::uint64_t it_seed = DeriveSeed(seed, {static_cast<std::uint64_t>(i)});
    const lm::Model& ref = models.back();
    const auto sources = DrawSources(train, style_ids, cfg.sources_per_style, DeriveSeed(it_seed, {kSources}));
    const PoDataset data = BuildPoDataset(ctx, ref, sources, style_ids, cfg, DeriveSeed(it_seed, {kPools}));
    if (hooks.on_dataset) hooks.on_dataset(i, data);

    lm::TrainHistory h;
    lm::Model model = TrainPoIteration(ctx, ref, data.pairs, cfg, DeriveSeed(it_seed, {kTrain}), &h);
    IterationState st;
    st.iteration = i;
    st.weights = data.weights;
    st.pair_count = data.pairs.size();
    st.pool_count = data.pools;
    st.degenerate = data.degenerate;
    st.dropped = data.dropped;
    if (!h.train_loss.empty()) {
      st.train_loss_first = h.train_loss.front();
      st.train_loss_last = h.train_loss.back();
    }
    st.valid_tss = ValidationTss(ctx, model, valid_sources, style_ids, valid_params, valid_seed);
    st.reference_sha = sha(ref);
    st.model_sha = sha(model);
    LogInfo("PO iteration " + std::to_string(i) + ": validation TSS " + std::to_string(st.valid_tss));
    result.history.push_back(st);
    if (hooks.on_iteration) hooks.on_iteration(i, model, st);
    models.push_back(std::move(model));
    // Only the latest two models can still be selected.
    if (models.size() > 2) models.erase(models.begin());
    return st.valid_tss;
  }, cfg.stop_on_valid_tss);
  const int sel = result.decision.selected;
  const int run = result.decision.iterations_run;
  // models holds {model_{run-1}, model_run} (or {f_sft, model_1}).
  result.final_model = sel == run ? models.back() : models.front();
  return result;
}

std::string PairsToJsonl(const std::vector<PreferencePair>& pairs) {
  std::string out;
  for (const auto& p : pairs) {
    json j{{"src", Join(p.source.tokens)}, {"src_style", p.source.style_id}, {"split", world::ToString(p.source.split)},
           {"style", p.target_style},      {"winner", Join(p.winner)},        {"loser", Join(p.loser)}};
    out += j.dump() + "\n";
  }
  return out;
}

std::vector<PreferencePair> PairsFromJsonl(std::string_view jsonl) {
  std::vector<PreferencePair> out;
  detail::ForEachJsonLine(jsonl, [&](const json& j) {
    out.push_back({{SplitWords(j.at("src").get<std::string>()), j.at("src_style").get<int>(),
                    world::SplitFromString(j.at("split").get<std::string>())},
                   j.at("style").get<int>(),
                   SplitWords(j.at("winner").get<std::string>()),
                   SplitWords(j.at("loser").get<std::string>())});
  });
  return out;
}

std::string PoolLogsToJsonl(const std::vector<PoolLog>& logs) {
  std::string out;
  for (const auto& l : logs) {
    json j{{"source", l.source_index}, {"style", l.target_style}, {"outcome", ToString(l.outcome)},
           {"candidates", l.candidates}};
    if (l.outcome != PoolOutcome::kDegenerate) {
      j["winner"] = l.winner;
      j["loser"] = l.loser;
      j["agg"] = l.agg;
      if (l.random_draw >= 0) {
        j["random_draw"] = l.random_draw;
        j["select_seed"] = l.select_seed;
      }
    }
    out += j.dump() + "\n";
  }
  return out;
}

}  // namespace stamp::po
