// Copyright 2026 The stamp Authors
// SPDX-License-Identifier: Apache-2.0

#include "stamp/eval.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "json.hpp"

namespace stamp::eval {

using nlohmann::json;

EvalReport Evaluate(const RunContext& ctx, const std::vector<world::StyledText>& texts,
                    const std::vector<int>& target_styles, const TransferFn& transfer, std::uint64_t seed,
                    const std::string& fingerprint, const std::string& domain) {
  struct Job {
    const world::StyledText* x;
    int target;
  };
  std::vector<Job> jobs;
  for (const auto& t : texts)
    for (int s : target_styles)
      if (s != t.style_id) jobs.push_back({&t, s});

  EvalReport report;
  report.fingerprint = fingerprint;
  report.domain = domain;
  report.pairs.resize(jobs.size());
  ParallelFor(jobs.size(), ctx.jobs, [&](std::size_t j) {
    const Job& job = jobs[j];
    PairScore& p = report.pairs[j];
    p.src = job.x->tokens;
    p.style_src = job.x->style_id;
    p.style_tgt = job.target;
    p.output = transfer(*job.x, job.target, DeriveSeed(seed, {j}));
    p.rv = rewards::Score(p.src, p.output, job.target, *ctx.world);
    p.agg = rewards::Agg(p.rv);
  });
  Summarize(report);
  return report;
}

EvalReport OutOfDomainEvaluate(const RunContext& ctx, const std::vector<world::StyledText>& ood_texts,
                               const std::vector<int>& target_styles, const TransferFn& transfer,
                               std::uint64_t seed, const std::string& fingerprint, const std::string& domain) {
  return Evaluate(ctx, ood_texts, target_styles, transfer, seed, fingerprint + "|domain=" + domain, domain);
}

void Summarize(EvalReport& report) {
  report.n_pairs = report.pairs.size();
  report.per_style.clear();
  report.total = {};
  std::map<int, std::size_t> counts;
  for (const auto& p : report.pairs) {
    Means& m = report.per_style[p.style_tgt];
    m.tss += p.rv.tss;
    m.ms += p.rv.ms;
    m.f += p.rv.f;
    m.agg += p.agg;
    ++counts[p.style_tgt];
    report.total.tss += p.rv.tss;
    report.total.ms += p.rv.ms;
    report.total.f += p.rv.f;
    report.total.agg += p.agg;
  }
  auto scale = [](Means& m, std::size_t n) {
    if (n == 0) return;
    const double d = static_cast<double>(n);
    m.tss /= d;
    m.ms /= d;
    m.f /= d;
    m.agg /= d;
  };
  for (auto& [s, m] : report.per_style) scale(m, counts[s]);
  scale(report.total, report.n_pairs);
}

namespace {

std::string Real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

json MeansJson(const Means& m) { return {{"tss", m.tss}, {"ms", m.ms}, {"f", m.f}, {"agg", m.agg}}; }

}  // namespace

std::string ReportToCsv(const EvalReport& report) {
  std::string out = "src,style_src,style_tgt,output,tss,ms,f,agg\n";
  for (const auto& p : report.pairs) {
    out += Join(p.src) + "," + std::to_string(p.style_src) + "," + std::to_string(p.style_tgt) + "," +
           Join(p.output) + "," + Real(p.rv.tss) + "," + Real(p.rv.ms) + "," + Real(p.rv.f) + "," + Real(p.agg) +
           "\n";
  }
  return out;
}

std::vector<PairScore> PairsFromCsv(std::string_view csv) {
  std::istringstream in{std::string(csv)};
  std::string line;
  if (!std::getline(in, line) || line != "src,style_src,style_tgt,output,tss,ms,f,agg")
    throw Error(ErrorCode::kFormatError, "unexpected CSV header");
  std::vector<PairScore> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i)
      if (i == line.size() || line[i] == ',') {
        f.push_back(line.substr(start, i - start));
        start = i + 1;
      }
    if (f.size() != 8) throw Error(ErrorCode::kFormatError, "CSV row with " + std::to_string(f.size()) + " fields");
    PairScore p;
    p.src = SplitWords(f[0]);
    p.style_src = std::stoi(f[1]);
    p.style_tgt = std::stoi(f[2]);
    p.output = SplitWords(f[3]);
    p.rv = {std::stod(f[4]), std::stod(f[5]), std::stod(f[6])};
    p.agg = std::stod(f[7]);
    out.push_back(std::move(p));
  }
  return out;
}

std::string ReportToJson(const EvalReport& report) {
  json per = json::object();
  for (const auto& [s, m] : report.per_style) per[std::to_string(s)] = MeansJson(m);
  json j{{"fingerprint", report.fingerprint}, {"domain", report.domain}, {"n_pairs", report.n_pairs},
         {"total", MeansJson(report.total)},  {"per_style", per}};
  return j.dump(2) + "\n";
}

std::vector<double> Column(const EvalReport& report, const std::string& metric) {
  std::vector<double> out;
  out.reserve(report.pairs.size());
  for (const auto& p : report.pairs) {
    if (metric == "tss") out.push_back(p.rv.tss);
    else if (metric == "ms") out.push_back(p.rv.ms);
    else if (metric == "f") out.push_back(p.rv.f);
    else if (metric == "agg") out.push_back(p.agg);
    else throw Error(ErrorCode::kConfigError, "unknown metric '" + metric + "'");
  }
  return out;
}

double ResamplingTest(std::span<const double> a, std::span<const double> b, int n_subsets, int subset_size,
                      std::uint64_t seed) {
  if (a.size() != b.size())
    throw Error(ErrorCode::kAlignmentError,
                "score lists differ in length (" + std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
  if (n_subsets < 2 || subset_size < 1 || a.size() < static_cast<std::size_t>(subset_size))
    throw Error(ErrorCode::kAlignmentError, "need at least " + std::to_string(subset_size) + " aligned pairs and 2 subsets");

  std::vector<double> diffs;
  for (const auto& subset : ResamplingSubsets(a.size(), n_subsets, subset_size, seed)) {
    double sa = 0.0, sb = 0.0;
    for (std::size_t i : subset) {
      sa += a[i];
      sb += b[i];
    }
    diffs.push_back(sa / subset_size - sb / subset_size);
  }
  return PairedTTestPValue(diffs);
}

std::vector<std::vector<std::size_t>> ResamplingSubsets(std::size_t n, int n_subsets, int subset_size,
                                                        std::uint64_t seed) {
  if (subset_size < 0 || n < static_cast<std::size_t>(subset_size))
    throw Error(ErrorCode::kAlignmentError, "subset larger than the population");
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> idx(n);
  for (int k = 0; k < n_subsets; ++k) {
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::mt19937_64 rng(DeriveSeed(seed, {static_cast<std::uint64_t>(k)}));
    for (int i = 0; i < subset_size; ++i) {
      const std::size_t j = std::uniform_int_distribution<std::size_t>(static_cast<std::size_t>(i), n - 1)(rng);
      std::swap(idx[i], idx[j]);
    }
    out.emplace_back(idx.begin(), idx.begin() + subset_size);
  }
  return out;
}

double PairedTTestPValue(std::span<const double> diffs) {
  if (diffs.size() < 2) throw Error(ErrorCode::kAlignmentError, "t-test needs at least two differences");
  const double m = static_cast<double>(diffs.size());
  const double mean = std::accumulate(diffs.begin(), diffs.end(), 0.0) / m;
  double ss = 0.0;
  for (double d : diffs) ss += (d - mean) * (d - mean);
  const double sd = std::sqrt(ss / (m - 1.0));
  if (sd == 0.0) return mean == 0.0 ? 1.0 : std::numeric_limits<double>::min();
  const double t = mean / (sd / std::sqrt(m));
  const boost::math::students_t dist(m - 1.0);
  const double p = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
  return std::max(p, std::numeric_limits<double>::min());
}

Comparison CompareBaseline(const EvalReport& a, const EvalReport& b, std::uint64_t seed, int n_subsets,
                           int subset_size) {
  if (a.pairs.size() != b.pairs.size()) throw Error(ErrorCode::kAlignmentError, "reports cover different pair counts");
  for (std::size_t i = 0; i < a.pairs.size(); ++i)
    if (a.pairs[i].src != b.pairs[i].src || a.pairs[i].style_tgt != b.pairs[i].style_tgt)
      throw Error(ErrorCode::kAlignmentError, "reports disagree at pair " + std::to_string(i));
  Comparison c;
  c.a = a.total;
  c.b = b.total;
  c.delta = {a.total.tss - b.total.tss, a.total.ms - b.total.ms, a.total.f - b.total.f, a.total.agg - b.total.agg};
  auto p = [&](const char* metric) {
    return ResamplingTest(Column(a, metric), Column(b, metric), n_subsets, subset_size, seed);
  };
  c.p_value = {p("tss"), p("ms"), p("f"), p("agg")};
  return c;
}

std::string ComparisonToJson(const Comparison& c) {
  json j{{"a", MeansJson(c.a)}, {"b", MeansJson(c.b)}, {"delta", MeansJson(c.delta)}, {"p_value", MeansJson(c.p_value)}};
  return j.dump(2) + "\n";
}

}  // namespace stamp::eval
