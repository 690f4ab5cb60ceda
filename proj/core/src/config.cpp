// Copyright 2026 The stamp Authors
// SPDX-License-Identifier: Apache-2.0

#include "stamp/config.hpp"

#include <set>

#include "json.hpp"

namespace stamp {

using nlohmann::json;

std::string_view ToString(po::LoserRule rule) {
  switch (rule) {
    case po::LoserRule::kHopeFear: return "hope-fear";
    case po::LoserRule::kRandom: return "random";
    case po::LoserRule::kHigh: return "high";
  }
  return "?";
}

po::LoserRule LoserRuleFromString(std::string_view name) {
  if (name == "hope-fear") return po::LoserRule::kHopeFear;
  if (name == "random") return po::LoserRule::kRandom;
  if (name == "high") return po::LoserRule::kHigh;
  throw Error(ErrorCode::kConfigError, "po.loser_rule: unknown value '" + std::string(name) + "'");
}

namespace {

/// Reads known keys of one object and rejects the rest.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw Error(ErrorCode::kConfigError, Name("") + ": expected an object");
  }
  ~Section() noexcept(false) {
    if (std::uncaught_exceptions()) return;
    for (const auto& [key, _] : j_.items())
      if (!seen_.count(key)) throw Error(ErrorCode::kConfigError, Name(key) + ": unknown key");
  }

  template <typename T>
  void Get(const std::string& key, T& out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      out = it->template get<T>();
    } catch (const json::exception&) {
      throw Error(ErrorCode::kConfigError, Name(key) + ": wrong type");
    }
  }

  const json* Child(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  std::string Name(const std::string& key) const {
    if (path_.empty()) return key;
    return key.empty() ? path_ : path_ + "." + key;
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void ReadTrain(const json* j, const std::string& path, lm::TrainParams& t) {
  if (!j) return;
  Section s(*j, path);
  s.Get("epochs", t.epochs);
  s.Get("batch_size", t.batch_size);
  s.Get("lr", t.lr);
}

json TrainJson(const lm::TrainParams& t) { return {{"epochs", t.epochs}, {"batch_size", t.batch_size}, {"lr", t.lr}}; }

void Check(bool ok, const std::string& field, const std::string& rule) {
  if (!ok) throw Error(ErrorCode::kConfigError, field + ": " + rule);
}

void CheckTrain(const lm::TrainParams& t, const std::string& path) {
  Check(t.epochs >= 0, path + ".epochs", "must be >= 0");
  Check(t.batch_size >= 1, path + ".batch_size", "must be >= 1");
  Check(t.lr > 0.0, path + ".lr", "must be > 0");
}

void CheckSampling(double temperature, double top_p, int max_len, const std::string& path,
                   const std::string& temp_key = "temperature") {
  Check(temperature > 0.0, path + "." + temp_key, "must be > 0");
  Check(top_p > 0.0 && top_p <= 1.0, path + ".top_p", "must be in (0, 1]");
  Check(max_len >= 1, path + ".max_len", "must be >= 1");
}

}  // namespace

RunConfig ParseConfig(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfigError, std::string("config is not valid JSON: ") + e.what());
  }
  RunConfig cfg;
  {
    Section top(root, "");
    top.Get("seed", cfg.seed);
    top.Get("jobs", cfg.jobs);
    top.Get("run_dir", cfg.run_dir);
    top.Get("debug", cfg.debug);
    top.Get("world", cfg.world);
    if (const json* j = top.Child("model")) {
      Section s(*j, "model");
      s.Get("layers", cfg.model.layers);
      s.Get("model_dim", cfg.model.model_dim);
      s.Get("heads", cfg.model.heads);
      s.Get("context_len", cfg.model.context_len);
      s.Get("mlp_mult", cfg.model.mlp_mult);
    }
    if (const json* j = top.Child("corpus")) {
      Section s(*j, "corpus");
      s.Get("train_per_style", cfg.corpus.train_per_style);
      s.Get("valid_per_style", cfg.corpus.valid_per_style);
      s.Get("test_per_style", cfg.corpus.test_per_style);
      s.Get("min_len", cfg.corpus.min_len);
      s.Get("max_len", cfg.corpus.max_len);
      s.Get("paraphrase_pairs", cfg.corpus.paraphrase_pairs);
    }
    if (const json* j = top.Child("sft")) {
      Section s(*j, "sft");
      auto& c = cfg.sft;
      s.Get("k_para", c.k_para);
      s.Get("para_temperature", c.para_temperature);
      s.Get("k_sft", c.k_sft);
      s.Get("sft_temperature", c.sft_temperature);
      s.Get("tau_ms", c.tau_ms);
      s.Get("top_p", c.top_p);
      s.Get("max_len", c.max_len);
      s.Get("train_sources", c.train_sources);
      s.Get("valid_sources", c.valid_sources);
      s.Get("para_valid_fraction", c.para_valid_fraction);
      ReadTrain(s.Child("paraphraser"), "sft.paraphraser", c.paraphraser);
      ReadTrain(s.Child("inverse"), "sft.inverse", c.inverse);
      ReadTrain(s.Child("unified"), "sft.unified", c.unified);
    }
    if (const json* j = top.Child("po")) {
      Section s(*j, "po");
      auto& c = cfg.po;
      s.Get("k_po", c.selector.k_po);
      s.Get("use_model_score", c.selector.use_model_score);
      s.Get("tau_m", c.selector.tau_m);
      std::string rule(ToString(c.selector.loser_rule));
      s.Get("loser_rule", rule);
      c.selector.loser_rule = LoserRuleFromString(rule);
      s.Get("tau_max", c.tau_max);
      s.Get("weighted", c.weighted);
      s.Get("cpo_beta", c.cpo_beta);
      s.Get("lambda_nll", c.lambda_nll);
      s.Get("n_iter", c.n_iter);
      s.Get("epochs", c.train.epochs);
      s.Get("batch_size", c.train.batch_size);
      s.Get("lr", c.train.lr);
      s.Get("temperature", c.temperature);
      s.Get("top_p", c.top_p);
      s.Get("max_len", c.max_len);
      s.Get("sources_per_style", c.sources_per_style);
      s.Get("valid_sources_per_style", c.valid_sources_per_style);
      s.Get("valid_temperature", c.valid_temperature);
      s.Get("min_pool_yield", c.min_pool_yield);
      s.Get("stop_on_valid_tss", c.stop_on_valid_tss);
    }
    if (const json* j = top.Child("eval")) {
      Section s(*j, "eval");
      s.Get("temperature", cfg.eval.temperature);
      s.Get("top_p", cfg.eval.top_p);
      s.Get("max_len", cfg.eval.max_len);
      s.Get("seed", cfg.eval.seed);
      s.Get("n_subsets", cfg.eval.n_subsets);
      s.Get("subset_size", cfg.eval.subset_size);
    }
  }
  cfg.sft.arch = cfg.model;
  Validate(cfg);
  return cfg;
}

RunConfig LoadConfig(const std::string& path) {
  std::string text;
  try {
    text = ReadFile(path);
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfigError, "cannot read config '" + path + "'");
  }
  return ParseConfig(text);
}

std::string ApplyOverrides(std::string_view json_text, const std::vector<std::string>& overrides) {
  json root;
  try {
    root = json_text.empty() ? json::object() : json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfigError, std::string("config is not valid JSON: ") + e.what());
  }
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos || eq == 0)
      throw Error(ErrorCode::kConfigError, "override '" + o + "' is not of the form key=value");
    const std::string key = o.substr(0, eq);
    const std::string raw = o.substr(eq + 1);
    json value;
    try {
      value = json::parse(raw);
    } catch (const json::exception&) {
      value = raw;
    }
    json* node = &root;
    std::size_t start = 0;
    while (true) {
      const auto dot = key.find('.', start);
      const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
      if (dot == std::string::npos) {
        (*node)[part] = value;
        break;
      }
      node = &(*node)[part];
      if (!node->is_object() && !node->is_null())
        throw Error(ErrorCode::kConfigError, "override '" + key + "': '" + part + "' is not a section");
      start = dot + 1;
    }
  }
  return root.dump();
}

void Validate(const RunConfig& cfg) {
  Check(cfg.jobs >= 1, "jobs", "must be >= 1");
  Check(!cfg.run_dir.empty(), "run_dir", "must not be empty");

  const auto& m = cfg.model;
  Check(m.layers >= 1, "model.layers", "must be >= 1");
  Check(m.model_dim >= 1, "model.model_dim", "must be >= 1");
  Check(m.heads >= 1, "model.heads", "must be >= 1");
  Check(m.model_dim % m.heads == 0, "model.model_dim", "must be divisible by model.heads");
  Check(m.mlp_mult >= 1, "model.mlp_mult", "must be >= 1");

  const auto& c = cfg.corpus;
  Check(c.train_per_style >= 0, "corpus.train_per_style", "must be >= 0");
  Check(c.valid_per_style >= 0, "corpus.valid_per_style", "must be >= 0");
  Check(c.test_per_style >= 0, "corpus.test_per_style", "must be >= 0");
  Check(c.min_len >= rewards::kMinLength, "corpus.min_len", "must be >= 3");
  Check(c.max_len >= c.min_len && c.max_len <= rewards::kMaxLength, "corpus.max_len", "must be in [min_len, 12]");
  Check(c.paraphrase_pairs >= 0, "corpus.paraphrase_pairs", "must be >= 0");

  const auto& s = cfg.sft;
  Check(s.k_para >= 1, "sft.k_para", "must be >= 1");
  Check(s.k_sft >= 1, "sft.k_sft", "must be >= 1");
  Check(s.tau_ms >= 1, "sft.tau_ms", "must be >= 1");
  CheckSampling(s.para_temperature, s.top_p, s.max_len, "sft", "para_temperature");
  Check(s.sft_temperature > 0.0, "sft.sft_temperature", "must be > 0");
  Check(s.train_sources >= 1, "sft.train_sources", "must be >= 1");
  Check(s.valid_sources >= 0, "sft.valid_sources", "must be >= 0");
  Check(s.para_valid_fraction >= 0.0 && s.para_valid_fraction < 1.0, "sft.para_valid_fraction", "must be in [0, 1)");
  CheckTrain(s.paraphraser, "sft.paraphraser");
  CheckTrain(s.inverse, "sft.inverse");
  CheckTrain(s.unified, "sft.unified");
  // [BOS] [S] x [SEP] t [EOS]
  Check(1 + 1 + c.max_len + 1 + s.max_len + 1 <= m.context_len, "model.context_len",
        "must fit [BOS] code + corpus.max_len + [SEP] + sft.max_len + [EOS]");

  const auto& p = cfg.po;
  Check(p.selector.k_po >= 2, "po.k_po", "must be >= 2");
  Check(p.selector.tau_m > 0.0, "po.tau_m", "must be > 0");
  Check(p.tau_max >= 1, "po.tau_max", "must be >= 1");
  Check(p.cpo_beta > 0.0, "po.cpo_beta", "must be > 0");
  Check(p.lambda_nll >= 0.0, "po.lambda_nll", "must be >= 0");
  Check(p.n_iter >= 0, "po.n_iter", "must be >= 0");
  Check(p.train.epochs >= 0, "po.epochs", "must be >= 0");
  Check(p.train.batch_size >= 1, "po.batch_size", "must be >= 1");
  Check(p.train.lr > 0.0, "po.lr", "must be > 0");
  CheckSampling(p.temperature, p.top_p, p.max_len, "po");
  Check(p.valid_temperature > 0.0, "po.valid_temperature", "must be > 0");
  Check(p.sources_per_style >= 1, "po.sources_per_style", "must be >= 1");
  Check(p.valid_sources_per_style >= 1, "po.valid_sources_per_style", "must be >= 1");
  Check(p.min_pool_yield >= 0.0 && p.min_pool_yield <= 1.0, "po.min_pool_yield", "must be in [0, 1]");
  Check(1 + 1 + c.max_len + 1 + p.max_len + 1 <= m.context_len, "model.context_len",
        "must fit [BOS] code + corpus.max_len + [SEP] + po.max_len + [EOS]");

  CheckSampling(cfg.eval.temperature, cfg.eval.top_p, cfg.eval.max_len, "eval");
  Check(cfg.eval.n_subsets >= 2, "eval.n_subsets", "must be >= 2");
  Check(cfg.eval.subset_size >= 1, "eval.subset_size", "must be >= 1");
}

std::string ConfigToJson(const RunConfig& cfg) {
  const auto& s = cfg.sft;
  const auto& p = cfg.po;
  json j;
  j["seed"] = cfg.seed;
  j["jobs"] = cfg.jobs;
  j["run_dir"] = cfg.run_dir;
  j["debug"] = cfg.debug;
  j["world"] = cfg.world;
  j["model"] = {{"layers", cfg.model.layers},
                {"model_dim", cfg.model.model_dim},
                {"heads", cfg.model.heads},
                {"context_len", cfg.model.context_len},
                {"mlp_mult", cfg.model.mlp_mult}};
  j["corpus"] = {{"train_per_style", cfg.corpus.train_per_style}, {"valid_per_style", cfg.corpus.valid_per_style},
                 {"test_per_style", cfg.corpus.test_per_style},   {"min_len", cfg.corpus.min_len},
                 {"max_len", cfg.corpus.max_len},                 {"paraphrase_pairs", cfg.corpus.paraphrase_pairs}};
  j["sft"] = {{"k_para", s.k_para},
              {"para_temperature", s.para_temperature},
              {"k_sft", s.k_sft},
              {"sft_temperature", s.sft_temperature},
              {"tau_ms", s.tau_ms},
              {"top_p", s.top_p},
              {"max_len", s.max_len},
              {"train_sources", s.train_sources},
              {"valid_sources", s.valid_sources},
              {"para_valid_fraction", s.para_valid_fraction},
              {"paraphraser", TrainJson(s.paraphraser)},
              {"inverse", TrainJson(s.inverse)},
              {"unified", TrainJson(s.unified)}};
  j["po"] = {{"k_po", p.selector.k_po},
             {"use_model_score", p.selector.use_model_score},
             {"tau_m", p.selector.tau_m},
             {"loser_rule", ToString(p.selector.loser_rule)},
             {"tau_max", p.tau_max},
             {"weighted", p.weighted},
             {"cpo_beta", p.cpo_beta},
             {"lambda_nll", p.lambda_nll},
             {"n_iter", p.n_iter},
             {"epochs", p.train.epochs},
             {"batch_size", p.train.batch_size},
             {"lr", p.train.lr},
             {"temperature", p.temperature},
             {"top_p", p.top_p},
             {"max_len", p.max_len},
             {"sources_per_style", p.sources_per_style},
             {"valid_sources_per_style", p.valid_sources_per_style},
             {"valid_temperature", p.valid_temperature},
             {"min_pool_yield", p.min_pool_yield},
             {"stop_on_valid_tss", p.stop_on_valid_tss}};
  j["eval"] = {{"temperature", cfg.eval.temperature}, {"top_p", cfg.eval.top_p},
               {"max_len", cfg.eval.max_len},         {"seed", cfg.eval.seed},
               {"n_subsets", cfg.eval.n_subsets},     {"subset_size", cfg.eval.subset_size}};
  return j.dump(2) + "\n";
}

}  // namespace stamp
