// Copyright 2026 The stamp Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line driver. Exit status: 0 success, 2 configuration error,
// 3 runtime failure.

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "stamp/common.hpp"
#include "stamp/config.hpp"
#include "stamp/pipeline.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct Options {
  std::string config;
  std::vector<std::string> overrides;
  std::string run_dir;
  int jobs = 0;
  bool force = false;
  bool quiet = false;
  bool debug = false;
};

stamp::RunConfig Resolve(const Options& o) {
  std::string text = o.config.empty() ? "{}" : stamp::ReadFile(o.config);
  std::vector<std::string> overrides = o.overrides;
  if (!o.run_dir.empty()) overrides.push_back("run_dir=\"" + o.run_dir + "\"");
  if (o.jobs > 0) overrides.push_back("jobs=" + std::to_string(o.jobs));
  if (o.debug) overrides.push_back("debug=true");
  return stamp::ParseConfig(stamp::ApplyOverrides(text, overrides));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stamp: style transfer with multi-iteration preference optimization on a synthetic world"};
  app.require_subcommand(1);
  Options o;
  auto common = [&](CLI::App* sub) {
    sub->add_option("-c,--config", o.config, "Run config (JSON)")->check(CLI::ExistingFile);
    sub->add_option("--set", o.overrides, "Override a config field, e.g. --set po.tau_max=4");
    sub->add_option("--run-dir", o.run_dir, "Run directory (overrides run_dir)");
    sub->add_option("-j,--jobs", o.jobs, "Worker threads (overrides jobs)")->check(CLI::PositiveNumber);
    sub->add_flag("--force", o.force, "Recompute even if artifacts are up to date");
    sub->add_flag("-q,--quiet", o.quiet, "Only print warnings and errors");
    sub->add_flag("--debug", o.debug, "Persist candidate provenance logs");
  };

  auto* gen = app.add_subcommand("gen-corpus", "Generate the styled corpus and paraphrase pairs");
  auto* sft = app.add_subcommand("train-sft", "Train paraphraser, inverse models and the unified SFT model");
  auto* po = app.add_subcommand("train-po", "Run multi-iteration preference optimization");
  auto* run = app.add_subcommand("run", "gen-corpus, train-sft, train-po, then evaluate sft, baseline and po on test");
  auto* ev = app.add_subcommand("evaluate", "Evaluate a model and write eval/<name>/");
  auto* ab = app.add_subcommand("ablate", "Run a named PO ablation and evaluate it");
  auto* ins = app.add_subcommand("inspect", "Pretty-print a manifest, report or checkpoint");
  for (auto* s : {gen, sft, po, run, ev, ab}) common(s);

  stamp::pipeline::EvalRequest req;
  std::string split = "test";
  ev->add_option("--model", req.model, "sft | po | baseline | <checkpoint path>");
  ev->add_option("--split", split, "train | valid | test")->check(CLI::IsMember({"train", "valid", "test"}));
  ev->add_option("--domain", req.domain, "in, or an out-of-domain profile name");
  ev->add_option("--name", req.name, "Output name under eval/");
  ev->add_option("--compare-to", req.compare_to, "Existing evaluation to compare against");

  std::string ablation;
  ab->add_option("name", ablation, "unweighted-R | tau-m | k-po-2 | random-loser | high-loser")->required();

  std::string inspect_path;
  ins->add_option("path", inspect_path, "File or directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (ins->parsed()) {
      std::cout << stamp::pipeline::Inspect(inspect_path);
      return 0;
    }
    stamp::SetVerbose(!o.quiet);
    stamp::pipeline::Pipeline p(Resolve(o));
    if (gen->parsed()) p.GenCorpus(o.force);
    if (sft->parsed()) p.TrainSft(o.force);
    if (po->parsed()) p.TrainPo(o.force);
    if (run->parsed()) {
      p.GenCorpus(o.force);
      p.TrainSft(o.force);
      p.TrainPo(o.force);
      // Baseline first so that each later system can be compared to the one before.
      const std::vector<std::pair<std::string, std::string>> evals{
          {"baseline", ""}, {"sft", "baseline-test"}, {"po", "sft-test"}};
      for (const auto& [model, against] : evals) {
        stamp::pipeline::EvalRequest r;
        r.model = model;
        r.compare_to = against;
        p.Evaluate(r, o.force);
      }
      std::cout << stamp::pipeline::Inspect((p.EvalDir("po-test") / "report.json").string());
    }
    if (ev->parsed()) {
      req.split = stamp::world::SplitFromString(split);
      p.Evaluate(req, o.force);
      const std::string name = req.name.empty() ? stamp::pipeline::Pipeline::DefaultEvalName(req) : req.name;
      std::cout << stamp::pipeline::Inspect((p.EvalDir(name) / "report.json").string());
      std::cout << "report: " << (p.EvalDir(name) / "report.json").string() << "\n"
                << "pairs: " << (p.EvalDir(name) / "pairs.csv").string() << "\n";
    }
    if (ab->parsed()) {
      p.Ablate(ablation, o.force);
      std::cout << stamp::pipeline::Inspect((p.AblationDir(ablation) / "eval" / "report.json").string());
    }
  } catch (const stamp::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == stamp::ErrorCode::kConfigError ? kExitConfig : kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
