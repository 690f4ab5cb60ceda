// Copyright 2026 The stamp Authors
// SPDX-License-Identifier: Apache-2.0

#include "stamp/sft.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <random>

#include "json.hpp"
#include "jsonl.hpp"

namespace stamp::sft {

using nlohmann::json;

namespace {

lm::Example MakeExample(const lm::Tokenizer& tok, std::vector<int> prompt, const Tokens& output) {
  lm::Example ex;
  ex.prompt = std::move(prompt);
  ex.output = tok.Encode(output);
  ex.output.push_back(lm::Tokenizer::kEos);
  return ex;
}

TrainedModel Train(const RunContext& ctx, const std::vector<lm::Group>& train, const std::vector<lm::Group>& valid,
                   const lm::TrainParams& params, const SftConfig& cfg, std::uint64_t seed) {
  TrainedModel out{NewModel(ctx, cfg, DeriveSeed(seed, {0})), {}};
  lm::Adam adam(out.model.num_params());
  out.history = lm::TrainGroups(out.model, adam, train, valid, lm::CrossEntropyLoss(), params,
                                DeriveSeed(seed, {1}), ctx.jobs);
  return out;
}

json StyledToJson(const world::StyledText& t) {
  return {{"src", Join(t.tokens)}, {"src_style", t.style_id}, {"split", world::ToString(t.split)}};
}

world::StyledText StyledFromJson(const json& j) {
  return {SplitWords(j.at("src").get<std::string>()), j.at("src_style").get<int>(),
          world::SplitFromString(j.at("split").get<std::string>())};
}

}  // namespace

lm::Model NewModel(const RunContext& ctx, const SftConfig& cfg, std::uint64_t seed) {
  lm::ModelConfig arch = cfg.arch;
  arch.vocab_size = ctx.tokenizer->size();
  return lm::Model(arch, seed);
}

std::vector<int> UnifiedPrompt(const lm::Tokenizer& tok, const Tokens& x, int target_style) {
  std::vector<int> ids{tok.StyleCode(target_style)};
  const auto body = tok.Encode(x);
  ids.insert(ids.end(), body.begin(), body.end());
  return ids;
}

TrainedModel TrainParaphraser(const RunContext& ctx, const std::vector<world::ParaphrasePair>& pairs,
                              const SftConfig& cfg, std::uint64_t seed) {
  if (pairs.empty()) throw Error(ErrorCode::kEmptyDataset, "paraphraser training set is empty");
  const auto& tok = *ctx.tokenizer;
  std::size_t n_valid = static_cast<std::size_t>(std::floor(cfg.para_valid_fraction * pairs.size()));
  if (n_valid >= pairs.size()) n_valid = 0;
  std::vector<lm::Group> train, valid;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    lm::Group g{MakeExample(tok, tok.Encode(pairs[i].src), pairs[i].tgt)};
    (i < pairs.size() - n_valid ? train : valid).push_back(std::move(g));
  }
  LogInfo("training paraphraser on " + std::to_string(train.size()) + " pairs");
  return Train(ctx, train, valid, cfg.paraphraser, cfg, seed);
}

std::vector<ParaphraseRecord> GenParaphrases(const RunContext& ctx, const lm::Model& f_para,
                                             const std::vector<world::StyledText>& texts, int k,
                                             const lm::SampleParams& params, std::uint64_t seed,
                                             std::vector<CandidateLog>* log) {
  if (k < 1) throw Error(ErrorCode::kConfigError, "k_para must be >= 1");
  const auto& tok = *ctx.tokenizer;
  std::vector<std::optional<ParaphraseRecord>> slots(texts.size());
  std::vector<CandidateLog> logs(log ? texts.size() : 0);
  ParallelFor(texts.size(), ctx.jobs, [&](std::size_t i) {
    const auto samples = lm::SampleMany(f_para, tok.Encode(texts[i].tokens), k, params, DeriveSeed(seed, {i}));
    CandidateLog entry{texts[i], -1, {}, {}, 0};
    std::optional<std::size_t> best;
    double best_ms = -1.0;
    for (std::size_t j = 0; j < samples.size(); ++j) {
      Tokens text = tok.Decode(samples[j]);
      const double ms = text.empty() ? 0.0 : rewards::MsScore(texts[i].tokens, text, *ctx.world);
      if (!text.empty() && ms > best_ms) {
        best_ms = ms;
        best = j;
      }
      entry.texts.push_back(std::move(text));
      entry.scores.push_back(ms);
    }
    if (!best) return;
    slots[i] = ParaphraseRecord{texts[i], entry.texts[*best], best_ms};
    entry.selected = *best;
    if (log) logs[i] = std::move(entry);
  });
  std::vector<ParaphraseRecord> out;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (!slots[i]) {
      LogWarn("all " + std::to_string(k) + " paraphrase samples empty for text " + std::to_string(i) + "; dropped");
      continue;
    }
    out.push_back(std::move(*slots[i]));
    if (log) log->push_back(std::move(logs[i]));
  }
  return out;
}

TrainedModel TrainInverse(const RunContext& ctx, int style, const std::vector<ParaphraseRecord>& train,
                          const std::vector<ParaphraseRecord>& valid, const SftConfig& cfg, std::uint64_t seed) {
  const auto& tok = *ctx.tokenizer;
  auto slice = [&](const std::vector<ParaphraseRecord>& records) {
    std::vector<lm::Group> out;
    for (const auto& r : records)
      if (r.source.style_id == style) out.push_back({MakeExample(tok, tok.Encode(r.paraphrase), r.source.tokens)});
    return out;
  };
  const auto train_groups = slice(train);
  if (train_groups.empty())
    throw Error(ErrorCode::kEmptyDataset, "no paraphrase records for style " + std::to_string(style));
  LogInfo("training inverse model for style " + std::to_string(style) + " on " +
          std::to_string(train_groups.size()) + " records");
  return Train(ctx, train_groups, slice(valid), cfg.inverse, cfg, seed);
}

std::vector<Tokens> TwoStepCandidates(const RunContext& ctx, const lm::Model& f_para, const lm::Model& f_inv,
                                      const Tokens& x, int k, const lm::SampleParams& params, std::uint64_t seed) {
  const auto& tok = *ctx.tokenizer;
  const auto paraphrases = lm::SampleMany(f_para, tok.Encode(x), k, params, DeriveSeed(seed, {0}));
  std::vector<Tokens> out;
  out.reserve(paraphrases.size());
  for (std::size_t j = 0; j < paraphrases.size(); ++j) {
    // Re-encode the decoded paraphrase so stray markers do not reach f_inv.
    const auto p = tok.Encode(tok.Decode(paraphrases[j]));
    out.push_back(tok.Decode(lm::Sample(f_inv, p, params, DeriveSeed(seed, {1, j}))));
  }
  return out;
}

Tokens TwoStepTransfer(const RunContext& ctx, const lm::Model& f_para, const lm::Model& f_inv, const Tokens& x,
                       const lm::SampleParams& params, std::uint64_t seed) {
  return TwoStepCandidates(ctx, f_para, f_inv, x, 1, params, seed).front();
}

double SelectionScore(const rewards::RewardVector& rv, int tau_ms, bool empty) {
  if (empty) return 0.0;
  return rv.f * std::pow(rv.ms, tau_ms) * rv.tss;
}

std::vector<TransferRecord> BuildDtrf(const RunContext& ctx, const std::vector<world::StyledText>& texts,
                                      const std::vector<int>& style_ids, const lm::Model& f_para,
                                      const std::map<int, lm::Model>& inverses, int sources_per_cell,
                                      const SftConfig& cfg, std::uint64_t seed, std::vector<CandidateLog>* log) {
  if (cfg.k_sft < 1) throw Error(ErrorCode::kConfigError, "k_sft must be >= 1");
  if (cfg.tau_ms < 1) throw Error(ErrorCode::kConfigError, "tau_ms must be >= 1");
  struct Job {
    const world::StyledText* source;
    int target;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (int target : style_ids) {
    for (int src_style : style_ids) {
      if (src_style == target) continue;
      std::vector<const world::StyledText*> pool;
      for (const auto& t : texts)
        if (t.style_id == src_style) pool.push_back(&t);
      std::vector<std::size_t> order(pool.size());
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::mt19937_64 rng(DeriveSeed(seed, {0, static_cast<std::uint64_t>(target), static_cast<std::uint64_t>(src_style)}));
      std::shuffle(order.begin(), order.end(), rng);
      order.resize(std::min(order.size(), static_cast<std::size_t>(std::max(sources_per_cell, 0))));
      for (std::size_t j = 0; j < order.size(); ++j)
        jobs.push_back({pool[order[j]], target,
                        DeriveSeed(seed, {1, static_cast<std::uint64_t>(target),
                                          static_cast<std::uint64_t>(src_style), j})});
    }
  }

  const lm::SampleParams params{cfg.sft_temperature, cfg.top_p, cfg.max_len};
  std::vector<TransferRecord> out(jobs.size());
  std::vector<CandidateLog> logs(log ? jobs.size() : 0);
  ParallelFor(jobs.size(), ctx.jobs, [&](std::size_t i) {
    const Job& job = jobs[i];
    auto inv = inverses.find(job.target);
    if (inv == inverses.end())
      throw Error(ErrorCode::kMissingStyle, "no inverse model for style " + std::to_string(job.target));
    const auto cands = TwoStepCandidates(ctx, f_para, inv->second, job.source->tokens, cfg.k_sft, params, job.seed);
    CandidateLog entry{*job.source, job.target, {}, {}, 0};
    double best = -1.0;
    rewards::RewardVector best_rv;
    for (std::size_t j = 0; j < cands.size(); ++j) {
      const auto rv = rewards::Score(job.source->tokens, cands[j], job.target, *ctx.world);
      const double s = SelectionScore(rv, cfg.tau_ms, cands[j].empty());
      if (s > best) {
        best = s;
        best_rv = rv;
        entry.selected = j;
      }
      entry.texts.push_back(cands[j]);
      entry.scores.push_back(s);
    }
    out[i] = {*job.source, job.target, cands[entry.selected], best_rv};
    if (log) logs[i] = std::move(entry);
  });
  if (log) log->insert(log->end(), logs.begin(), logs.end());
  return out;
}

TrainedModel TrainSftUnified(const RunContext& ctx, const std::vector<TransferRecord>& train,
                             const std::vector<TransferRecord>& valid, const std::vector<int>& style_ids,
                             const SftConfig& cfg, std::uint64_t seed) {
  const auto& tok = *ctx.tokenizer;
  for (int s : style_ids) {
    if (std::none_of(train.begin(), train.end(), [&](const TransferRecord& r) { return r.target_style == s; }))
      throw Error(ErrorCode::kMissingStyle, "no transfer records toward style " + std::to_string(s));
  }
  auto groups = [&](const std::vector<TransferRecord>& records) {
    std::vector<lm::Group> out;
    for (const auto& r : records)
      out.push_back({MakeExample(tok, UnifiedPrompt(tok, r.source.tokens, r.target_style), r.transfer)});
    return out;
  };
  LogInfo("training unified model on " + std::to_string(train.size()) + " transfer records");
  return Train(ctx, groups(train), groups(valid), cfg.unified, cfg, seed);
}

Tokens UnifiedTransfer(const RunContext& ctx, const lm::Model& model, const Tokens& x, int target_style,
                       const lm::SampleParams& params, std::uint64_t seed) {
  return ctx.tokenizer->Decode(lm::Sample(model, UnifiedPrompt(*ctx.tokenizer, x, target_style), params, seed));
}

std::string ParaphrasesToJsonl(const std::vector<ParaphraseRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    json j = StyledToJson(r.source);
    j["paraphrase"] = Join(r.paraphrase);
    j["ms"] = r.ms;
    out += j.dump() + "\n";
  }
  return out;
}

std::vector<ParaphraseRecord> ParaphrasesFromJsonl(std::string_view jsonl) {
  std::vector<ParaphraseRecord> out;
  detail::ForEachJsonLine(jsonl, [&](const json& j) {
    out.push_back({StyledFromJson(j), SplitWords(j.at("paraphrase").get<std::string>()), j.at("ms").get<double>()});
  });
  return out;
}

std::string TransfersToJsonl(const std::vector<TransferRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    json j = StyledToJson(r.source);
    j["style"] = r.target_style;
    j["transfer"] = Join(r.transfer);
    j["rewards"] = {{"tss", r.rewards.tss}, {"ms", r.rewards.ms}, {"f", r.rewards.f}};
    out += j.dump() + "\n";
  }
  return out;
}

std::vector<TransferRecord> TransfersFromJsonl(std::string_view jsonl) {
  std::vector<TransferRecord> out;
  detail::ForEachJsonLine(jsonl, [&](const json& j) {
    const json& r = j.at("rewards");
    out.push_back({StyledFromJson(j), j.at("style").get<int>(), SplitWords(j.at("transfer").get<std::string>()),
                   {r.at("tss").get<double>(), r.at("ms").get<double>(), r.at("f").get<double>()}});
  });
  return out;
}

std::string CandidateLogsToJsonl(const std::vector<CandidateLog>& logs) {
  std::string out;
  for (const auto& l : logs) {
    json cands = json::array();
    for (std::size_t i = 0; i < l.texts.size(); ++i) cands.push_back({{"text", Join(l.texts[i])}, {"scores", l.scores[i]}});
    json j{{"source", StyledToJson(l.source)}, {"candidates", std::move(cands)}, {"selected", l.selected}};
    if (l.target_style >= 0) j["style"] = l.target_style;
    out += j.dump() + "\n";
  }
  return out;
}

}  // namespace stamp::sft
