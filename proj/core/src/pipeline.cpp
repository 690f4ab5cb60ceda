// Copyright 2026 The stamp Authors
// SPDX-License-Identifier: Apache-2.0

#include "stamp/pipeline.hpp"

#include <fstream>

#include "json.hpp"
#include "stamp/po.hpp"
#include "stamp/sft.hpp"

namespace stamp::pipeline {

using nlohmann::json;

namespace {

// Seed stream tags for the stages.
constexpr std::uint64_t kCorpusStage = 1;
constexpr std::uint64_t kSftStage = 2;
constexpr std::uint64_t kPoStage = 3;
constexpr std::uint64_t kEvalCompare = 1;

constexpr const char* kManifest = "manifest.json";

json Section(const RunConfig& cfg, const char* name) { return json::parse(ConfigToJson(cfg)).at(name); }

json PoJson(const RunConfig& cfg, const po::PoConfig& po) {
  RunConfig copy = cfg;
  copy.po = po;
  return Section(copy, "po");
}

std::optional<json> ReadJson(const fs::path& path) {
  if (!fs::exists(path)) return std::nullopt;
  try {
    return json::parse(ReadFile(path.string()));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormatError, path.string() + ": " + e.what());
  }
}

void WriteJson(const fs::path& path, const json& j) { WriteFile(path.string(), j.dump(2) + "\n"); }

/// True when the stage under `dir` is complete for `fingerprint`. Forcing
/// wipes the directory first.
bool UpToDate(const fs::path& dir, std::string_view stage, const std::string& fingerprint, bool force) {
  if (force && fs::exists(dir)) {
    LogInfo(std::string(stage) + ": --force, removing " + dir.string());
    fs::remove_all(dir);
  }
  const auto manifest = ReadJson(dir / kManifest);
  if (!manifest) return false;
  const std::string existing = manifest->value("fingerprint", "");
  if (existing != fingerprint)
    throw Error(ErrorCode::kConfigError, std::string(stage) + ": " + dir.string() +
                                             " holds artifacts of a different configuration (fingerprint " +
                                             existing.substr(0, 12) + ", current " + fingerprint.substr(0, 12) +
                                             "); rerun with --force to overwrite");
  return manifest->value("complete", false);
}

json StartManifest(std::string_view stage, const std::string& fingerprint) {
  return {{"stage", stage}, {"fingerprint", fingerprint}, {"version", STAMP_VERSION}, {"complete", false}};
}

void RequireComplete(const fs::path& dir, std::string_view upstream, const std::string& fingerprint) {
  const auto manifest = ReadJson(dir / kManifest);
  if (!manifest || !manifest->value("complete", false))
    throw Error(ErrorCode::kIoError, dir.string() + " is missing or incomplete; run " + std::string(upstream) + " first");
  if (manifest->value("fingerprint", "") != fingerprint)
    throw Error(ErrorCode::kConfigError, dir.string() + " was produced with a different configuration; rerun " +
                                             std::string(upstream) + " with --force");
}

json HistoryJson(const lm::TrainHistory& h) {
  return {{"train_loss", h.train_loss}, {"valid_loss", h.valid_loss}, {"initial_valid_loss", h.initial_valid_loss}};
}

std::string Rel(const fs::path& root, const fs::path& p) { return fs::relative(p, root).generic_string(); }

}  // namespace

const std::vector<std::string>& AblationNames() {
  static const std::vector<std::string> names{"unweighted-R", "tau-m", "k-po-2", "random-loser", "high-loser"};
  return names;
}

po::PoConfig AblationConfig(const po::PoConfig& base, std::string_view name) {
  po::PoConfig c = base;
  if (name == "unweighted-R") {
    c.weighted = false;
  } else if (name == "tau-m") {
    c.selector.use_model_score = true;
  } else if (name == "k-po-2") {
    c.selector.k_po = 2;
  } else if (name == "random-loser") {
    c.selector.loser_rule = po::LoserRule::kRandom;
  } else if (name == "high-loser") {
    c.selector.loser_rule = po::LoserRule::kHigh;
  } else {
    throw Error(ErrorCode::kConfigError, "unknown ablation '" + std::string(name) +
                                             "' (expected unweighted-R, tau-m, k-po-2, random-loser or high-loser)");
  }
  return c;
}

Pipeline::Pipeline(RunConfig cfg) : cfg_(std::move(cfg)), root_(cfg_.run_dir) {
  cfg_.sft.arch = cfg_.model;
  Validate(cfg_);
}

std::string Pipeline::CorpusFingerprint() const {
  const std::string world_json = cfg_.world.empty() ? world::WorldToJson(world::DefaultWorld()) : ReadFile(cfg_.world);
  json j{{"version", STAMP_VERSION},
         {"seed", cfg_.seed},
         {"world", Sha256Hex(world_json)},
         {"corpus", Section(cfg_, "corpus")}};
  return Sha256Hex(j.dump());
}

std::string Pipeline::SftFingerprint() const {
  json j{{"corpus", CorpusFingerprint()}, {"model", Section(cfg_, "model")}, {"sft", Section(cfg_, "sft")}};
  return Sha256Hex(j.dump());
}

std::string Pipeline::PoFingerprint(const po::PoConfig& po) const {
  json j{{"sft", SftFingerprint()}, {"po", PoJson(cfg_, po)}};
  return Sha256Hex(j.dump());
}

void Pipeline::SaveModel(const fs::path& path, const lm::Model& model) const {
  lm::SaveCheckpoint(path.string(), {model, *tokenizer_, cfg_.seed, std::nullopt});
}

lm::Model Pipeline::LoadModel(const fs::path& path) const {
  lm::Checkpoint ckpt = lm::LoadCheckpoint(path.string());
  if (ckpt.tokenizer.vocab() != tokenizer_->vocab())
    throw Error(ErrorCode::kFormatError, path.string() + ": vocabulary does not match this run's world");
  return std::move(ckpt.model);
}

bool Pipeline::GenCorpus(bool force) {
  const fs::path dir = CorpusDir();
  const std::string fp = CorpusFingerprint();
  if (UpToDate(dir, "gen-corpus", fp, force)) {
    LogInfo("gen-corpus: up to date");
    return false;
  }
  const world::World w = cfg_.world.empty() ? world::DefaultWorld() : world::WorldFromJson(ReadFile(cfg_.world));
  const world::Corpus corpus = world::GenerateCorpus(w, cfg_.corpus, DeriveSeed(cfg_.seed, {kCorpusStage}));
  WriteFile((dir / "world.json").string(), world::WorldToJson(w));
  WriteFile((dir / "corpus.jsonl").string(), world::CorpusToJsonl(corpus.texts));
  WriteFile((dir / "paraphrase_pairs.jsonl").string(), world::PairsToJsonl(corpus.paraphrase_pairs));

  json manifest = StartManifest("gen-corpus", fp);
  manifest["seed"] = cfg_.seed;
  manifest["texts"] = corpus.texts.size();
  manifest["paraphrase_pairs"] = corpus.paraphrase_pairs.size();
  for (const char* f : {"world.json", "corpus.jsonl", "paraphrase_pairs.jsonl"})
    manifest["sha256"][f] = Sha256File((dir / f).string());
  manifest["complete"] = true;
  WriteJson(dir / kManifest, manifest);
  LogInfo("gen-corpus: " + std::to_string(corpus.texts.size()) + " texts, " +
          std::to_string(corpus.paraphrase_pairs.size()) + " paraphrase pairs");
  return true;
}

void Pipeline::LoadCorpus() {
  if (world_) return;
  const fs::path dir = CorpusDir();
  RequireComplete(dir, "gen-corpus", CorpusFingerprint());
  world_ = std::make_unique<world::World>(world::WorldFromJson(ReadFile((dir / "world.json").string())));
  tokenizer_ = std::make_unique<lm::Tokenizer>(*world_);
  texts_ = world::CorpusFromJsonl(ReadFile((dir / "corpus.jsonl").string()));
  pairs_ = world::PairsFromJsonl(ReadFile((dir / "paraphrase_pairs.jsonl").string()));
}

bool Pipeline::TrainSft(bool force) {
  const fs::path dir = SftDir();
  const std::string fp = SftFingerprint();
  if (UpToDate(dir, "train-sft", fp, force)) {
    LogInfo("train-sft: up to date");
    return false;
  }
  LoadCorpus();
  json manifest = StartManifest("train-sft", fp);
  WriteJson(dir / kManifest, manifest);

  const RunContext ctx = Context();
  const sft::SftConfig& sc = cfg_.sft;
  const std::uint64_t seed = DeriveSeed(cfg_.seed, {kSftStage});
  const auto& styles = world_->in_domain().style_ids;
  const auto train_texts = world::Select(texts_, world::Split::kTrain, styles);
  const auto valid_texts = world::Select(texts_, world::Split::kValid, styles);

  // Each step reuses its artifact when an earlier attempt of this same
  // configuration already wrote it.
  auto train_model = [&](const std::string& name, const std::function<sft::TrainedModel()>& fn) {
    const fs::path ckpt = dir / (name + ".ckpt");
    const fs::path hist = dir / (name + ".history.json");
    if (fs::exists(ckpt) && fs::exists(hist)) {
      LogInfo("train-sft: reusing " + ckpt.string());
      manifest["history"][name] = *ReadJson(hist);
      return LoadModel(ckpt);
    }
    LogInfo("train-sft: training " + name);
    sft::TrainedModel t = fn();
    SaveModel(ckpt, t.model);
    WriteJson(hist, HistoryJson(t.history));
    manifest["history"][name] = HistoryJson(t.history);
    return std::move(t.model);
  };
  auto cached_paraphrases = [&](const std::string& name, const std::vector<world::StyledText>& texts,
                                const lm::Model& f_para, std::uint64_t step_seed) {
    const fs::path path = dir / (name + ".jsonl");
    if (fs::exists(path)) return sft::ParaphrasesFromJsonl(ReadFile(path.string()));
    LogInfo("train-sft: generating " + name);
    std::vector<sft::CandidateLog> log;
    const lm::SampleParams params{sc.para_temperature, sc.top_p, sc.max_len};
    auto records = sft::GenParaphrases(ctx, f_para, texts, sc.k_para, params, step_seed, cfg_.debug ? &log : nullptr);
    if (cfg_.debug) WriteFile((dir / (name + "_candidates.jsonl")).string(), sft::CandidateLogsToJsonl(log));
    WriteFile(path.string(), sft::ParaphrasesToJsonl(records));
    return records;
  };

  const lm::Model f_para = train_model(
      "paraphraser", [&] { return sft::TrainParaphraser(ctx, pairs_, sc, DeriveSeed(seed, {0})); });
  const auto d_para = cached_paraphrases("d_para", train_texts, f_para, DeriveSeed(seed, {1}));
  const auto d_para_valid = cached_paraphrases("d_para_valid", valid_texts, f_para, DeriveSeed(seed, {2}));

  std::map<int, lm::Model> inverses;
  for (int s : styles)
    inverses.emplace(s, train_model("inverse_s" + std::to_string(s), [&] {
                       return sft::TrainInverse(ctx, s, d_para, d_para_valid, sc, DeriveSeed(seed, {3, static_cast<std::uint64_t>(s)}));
                     }));

  auto cached_transfers = [&](const std::string& name, const std::vector<world::StyledText>& texts, int per_cell,
                              std::uint64_t step_seed) {
    const fs::path path = dir / (name + ".jsonl");
    if (fs::exists(path)) return sft::TransfersFromJsonl(ReadFile(path.string()));
    LogInfo("train-sft: building " + name);
    std::vector<sft::CandidateLog> log;
    auto records = sft::BuildDtrf(ctx, texts, styles, f_para, inverses, per_cell, sc, step_seed,
                                  cfg_.debug ? &log : nullptr);
    if (cfg_.debug) WriteFile((dir / (name + "_candidates.jsonl")).string(), sft::CandidateLogsToJsonl(log));
    WriteFile(path.string(), sft::TransfersToJsonl(records));
    return records;
  };
  const auto d_trf = cached_transfers("d_trf", train_texts, sc.train_sources, DeriveSeed(seed, {4}));
  const auto d_trf_valid = cached_transfers("d_trf_valid", valid_texts, sc.valid_sources, DeriveSeed(seed, {5}));

  train_model("f_sft", [&] { return sft::TrainSftUnified(ctx, d_trf, d_trf_valid, styles, sc, DeriveSeed(seed, {6})); });

  manifest["counts"] = {{"d_para", d_para.size()},
                        {"d_para_valid", d_para_valid.size()},
                        {"d_trf", d_trf.size()},
                        {"d_trf_valid", d_trf_valid.size()}};
  manifest["f_sft"] = "sft/f_sft.ckpt";
  manifest["f_sft_sha256"] = Sha256File((dir / "f_sft.ckpt").string());
  manifest["complete"] = true;
  WriteJson(dir / kManifest, manifest);
  return true;
}

bool Pipeline::TrainPo(bool force) { return RunPo(PoDir(), cfg_.po, force); }

bool Pipeline::RunPo(const fs::path& dir, const po::PoConfig& pc, bool force) {
  const std::string fp = PoFingerprint(pc);
  if (UpToDate(dir, "train-po", fp, force)) {
    LogInfo("train-po: " + dir.string() + " up to date");
    return false;
  }
  LoadCorpus();
  RequireComplete(SftDir(), "train-sft", SftFingerprint());
  if (fs::exists(dir)) fs::remove_all(dir);  // an interrupted attempt restarts from the SFT model

  const RunContext ctx = Context();
  const std::uint64_t seed = DeriveSeed(cfg_.seed, {kPoStage});
  const auto& styles = world_->in_domain().style_ids;
  const lm::Model f_sft = LoadModel(SftDir() / "f_sft.ckpt");

  json manifest = StartManifest("train-po", fp);
  manifest["config"] = PoJson(cfg_, pc);
  manifest["seed"] = seed;
  manifest["reference"] = "sft/f_sft.ckpt";
  manifest["iterations"] = json::array();
  WriteJson(dir / kManifest, manifest);

  auto iter_dir = [&](int i) { return dir / ("iter_" + std::to_string(i)); };
  std::map<int, json> pending;
  po::IterationHooks hooks;
  hooks.sha = [&](const lm::Model& m) {
    return Sha256Hex(lm::SerializeCheckpoint({m, *tokenizer_, cfg_.seed, std::nullopt}));
  };
  hooks.on_dataset = [&](int i, const po::PoDataset& data) {
    WriteFile((iter_dir(i) / "d_po.jsonl").string(), po::PairsToJsonl(data.pairs));
    WriteFile((iter_dir(i) / "pairs_log.jsonl").string(), po::PoolLogsToJsonl(data.logs));
    json trials = json::array();
    for (const auto& t : data.trace.trials)
      trials.push_back({{"alpha", t.weights.alpha},
                        {"beta", t.weights.beta},
                        {"gamma", t.weights.gamma},
                        {"r_tss", t.counts.r_tss},
                        {"r_ms", t.counts.r_ms},
                        {"r_f", t.counts.r_f}});
    pending[i] = {{"solver_trials", std::move(trials)},
                  {"feasible",
                   {{"alpha", data.trace.alpha_feasible},
                    {"beta", data.trace.beta_feasible},
                    {"gamma", data.trace.gamma_feasible}}}};
  };
  hooks.on_iteration = [&](int i, const lm::Model& model, const po::IterationState& st) {
    const fs::path ckpt = iter_dir(i) / "model.ckpt";
    SaveModel(ckpt, model);
    json entry{{"iteration", i},
               {"seed", DeriveSeed(seed, {static_cast<std::uint64_t>(i)})},
               {"weights", {{"alpha", st.weights.alpha}, {"beta", st.weights.beta}, {"gamma", st.weights.gamma}}},
               {"valid_tss", st.valid_tss},
               {"pairs", st.pair_count},
               {"pools", st.pool_count},
               {"degenerate_pools", st.degenerate},
               {"dropped_pools", st.dropped},
               {"train_loss_first", st.train_loss_first},
               {"train_loss_last", st.train_loss_last},
               {"checkpoint", Rel(root_, ckpt)},
               {"d_po", Rel(root_, iter_dir(i) / "d_po.jsonl")},
               {"pairs_log", Rel(root_, iter_dir(i) / "pairs_log.jsonl")},
               {"reference_sha256", st.reference_sha},
               {"model_sha256", st.model_sha}};
    entry.update(pending[i]);
    manifest["iterations"].push_back(std::move(entry));
    WriteJson(dir / kManifest, manifest);
  };

  const auto train = world::Select(texts_, world::Split::kTrain, styles);
  const auto valid = world::Select(texts_, world::Split::kValid, styles);
  const po::MultiIterationResult result = po::RunMultiIteration(ctx, f_sft, train, valid, styles, pc, seed, hooks);

  SaveModel(dir / "final.ckpt", result.final_model);
  manifest["tss0"] = result.tss0;
  manifest["selected_iteration"] = result.decision.selected;
  manifest["iterations_run"] = result.decision.iterations_run;
  manifest["stopped_early"] = result.decision.stopped_early;
  manifest["final"] = Rel(root_, dir / "final.ckpt");
  manifest["final_sha256"] = Sha256File((dir / "final.ckpt").string());
  manifest["complete"] = true;
  WriteJson(dir / kManifest, manifest);
  LogInfo("train-po: selected iteration " + std::to_string(result.decision.selected) + " of " +
          std::to_string(result.decision.iterations_run));
  return true;
}

bool Pipeline::Ablate(std::string_view name, bool force) {
  const po::PoConfig pc = AblationConfig(cfg_.po, name);
  const fs::path dir = AblationDir(name);
  const bool trained = RunPo(dir, pc, force);
  EvalRequest req;
  req.model = (dir / "final.ckpt").string();
  req.name = std::string(name);
  EvaluateInto(dir / "eval", req, force || trained);
  return trained;
}

std::string Pipeline::DefaultEvalName(const EvalRequest& r) {
  std::string label = r.model;
  if (label != "sft" && label != "po" && label != "baseline") label = fs::path(label).stem().string();
  std::string name = label + "-" + std::string(world::ToString(r.split));
  if (r.domain != "in") name += "-" + r.domain;
  return name;
}

eval::EvalReport Pipeline::Evaluate(const EvalRequest& request, bool force) {
  const std::string name = request.name.empty() ? DefaultEvalName(request) : request.name;
  return EvaluateInto(EvalDir(name), request, force);
}

eval::EvalReport Pipeline::EvaluateInto(const fs::path& dir, const EvalRequest& request, bool force) {
  LoadCorpus();
  const RunContext ctx = Context();
  const auto& in_styles = world_->in_domain().style_ids;

  // Resolve the system under test to a transfer function and the files that
  // identify it.
  std::vector<fs::path> files;
  std::string kind = request.model;
  if (kind == "sft") {
    RequireComplete(SftDir(), "train-sft", SftFingerprint());
    files.push_back(SftDir() / "f_sft.ckpt");
  } else if (kind == "po") {
    RequireComplete(PoDir(), "train-po", PoFingerprint(cfg_.po));
    files.push_back(PoDir() / "final.ckpt");
  } else if (kind == "baseline") {
    RequireComplete(SftDir(), "train-sft", SftFingerprint());
    files.push_back(SftDir() / "paraphraser.ckpt");
    for (int s : in_styles) files.push_back(SftDir() / ("inverse_s" + std::to_string(s) + ".ckpt"));
  } else {
    if (!fs::exists(kind)) throw Error(ErrorCode::kIoError, "model checkpoint '" + kind + "' not found");
    files.push_back(kind);
    kind = "checkpoint";
  }
  json id{{"version", STAMP_VERSION},
          {"corpus", CorpusFingerprint()},
          {"eval", Section(cfg_, "eval")},
          {"split", world::ToString(request.split)},
          {"domain", request.domain},
          {"kind", kind}};
  for (const auto& f : files) id["models"].push_back(Sha256File(f.string()));
  const std::string fp = Sha256Hex(id.dump());

  eval::EvalReport report;
  if (UpToDate(dir, "evaluate", fp, force)) {
    LogInfo("evaluate: " + dir.string() + " up to date");
    report.pairs = eval::PairsFromCsv(ReadFile((dir / "pairs.csv").string()));
    report.fingerprint = fp;
    report.domain = request.domain;
    eval::Summarize(report);
  } else {
    const lm::SampleParams params{cfg_.eval.temperature, cfg_.eval.top_p, cfg_.eval.max_len};
    std::vector<lm::Model> models;
    for (const auto& f : files) models.push_back(LoadModel(f));
    eval::TransferFn fn;
    if (kind == "baseline") {
      std::map<int, const lm::Model*> inv;
      for (std::size_t i = 0; i < in_styles.size(); ++i) inv[in_styles[i]] = &models[i + 1];
      fn = [&, inv](const world::StyledText& x, int t, std::uint64_t s) {
        return sft::TwoStepTransfer(ctx, models[0], *inv.at(t), x.tokens, params, s);
      };
    } else {
      fn = [&](const world::StyledText& x, int t, std::uint64_t s) {
        return sft::UnifiedTransfer(ctx, models[0], x.tokens, t, params, s);
      };
    }
    if (request.domain == "in") {
      const auto texts = world::Select(texts_, request.split, in_styles);
      report = eval::Evaluate(ctx, texts, in_styles, fn, cfg_.eval.seed, fp, "in");
    } else {
      const auto& d = world_->domain(request.domain);
      if (&d == &world_->in_domain())
        throw Error(ErrorCode::kConfigError, "domain '" + request.domain + "' is the in-domain profile; use 'in'");
      const auto texts = world::Select(texts_, request.split, d.style_ids);
      report = eval::OutOfDomainEvaluate(ctx, texts, in_styles, fn, cfg_.eval.seed, fp, request.domain);
    }
    if (fs::exists(dir)) fs::remove_all(dir);
    WriteFile((dir / "pairs.csv").string(), eval::ReportToCsv(report));
    json doc = json::parse(eval::ReportToJson(report));
    doc["model"] = request.model;
    doc["split"] = world::ToString(request.split);
    doc["run_fingerprint"] = CorpusFingerprint();
    WriteJson(dir / "report.json", doc);
    json manifest = StartManifest("evaluate", fp);
    manifest["report"] = Rel(root_, dir / "report.json");
    manifest["pairs_sha256"] = Sha256File((dir / "pairs.csv").string());
    manifest["complete"] = true;
    WriteJson(dir / kManifest, manifest);
  }

  if (!request.compare_to.empty()) {
    const fs::path other = EvalDir(request.compare_to) / "pairs.csv";
    if (!fs::exists(other)) throw Error(ErrorCode::kIoError, "no evaluation named '" + request.compare_to + "'");
    eval::EvalReport b;
    b.pairs = eval::PairsFromCsv(ReadFile(other.string()));
    eval::Summarize(b);
    const eval::Comparison c = eval::CompareBaseline(report, b, DeriveSeed(cfg_.eval.seed, {kEvalCompare}),
                                                     cfg_.eval.n_subsets, cfg_.eval.subset_size);
    json doc = json::parse(eval::ComparisonToJson(c));
    doc["against"] = request.compare_to;
    doc["fingerprint"] = fp;
    WriteJson(dir / "comparison.json", doc);
  }
  return report;
}

std::string Inspect(const std::string& path_str) {
  fs::path path(path_str);
  if (!fs::exists(path)) throw Error(ErrorCode::kIoError, "'" + path_str + "' does not exist");
  if (fs::is_directory(path)) {
    for (const char* f : {kManifest, "report.json"})
      if (fs::exists(path / f)) return Inspect((path / f).string());
    std::string out;
    for (const auto& e : fs::directory_iterator(path)) out += e.path().filename().string() + "\n";
    return out;
  }
  const std::string ext = path.extension().string();
  if (ext == ".ckpt") {
    const std::string bytes = ReadFile(path_str);
    json h = json::parse(lm::CheckpointHeader(bytes));
    if (h.contains("vocab")) h["vocab"] = std::to_string(h["vocab"].size()) + " tokens";
    json tensors = json::array();
    std::size_t n = 0;
    for (const auto& t : h.value("tensors", json::array())) {
      const std::string name = t.value("name", "");
      if (name.rfind("adam_", 0) == 0) continue;
      const auto shape = t.at("shape").get<std::vector<std::size_t>>();
      n += shape.at(0) * shape.at(1);
      tensors.push_back(name + " [" + std::to_string(shape[0]) + "x" + std::to_string(shape[1]) + "]");
    }
    h["tensors"] = std::move(tensors);
    h["parameters"] = n;
    h["bytes"] = bytes.size();
    h["sha256"] = Sha256Hex(bytes);
    return h.dump(2) + "\n";
  }
  const std::string text = ReadFile(path_str);
  if (ext == ".jsonl" || ext == ".csv") {
    std::size_t lines = 0;
    std::string head;
    std::size_t start = 0;
    while (start < text.size()) {
      auto end = text.find('\n', start);
      if (end == std::string::npos) end = text.size();
      if (lines < 5) head += text.substr(start, end - start) + "\n";
      ++lines;
      start = end + 1;
    }
    return path.filename().string() + ": " + std::to_string(lines) + " lines\n" + head;
  }
  try {
    return json::parse(text).dump(2) + "\n";
  } catch (const json::exception&) {
    throw Error(ErrorCode::kFormatError, "'" + path_str + "' is neither a checkpoint nor JSON");
  }
}

}  // namespace stamp::pipeline
