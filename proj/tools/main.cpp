// viewfuse command line: annotate a corpus, inspect the gate threshold,
// compare bandit strategies and estimate API cost.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "viewfuse/cost.hpp"
#include "viewfuse/error.hpp"
#include "viewfuse/gating.hpp"
#include "viewfuse/pipeline.hpp"
#include "viewfuse/simulation.hpp"

namespace vf = viewfuse;

namespace {

std::uint64_t parse_u64(const std::string& s) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) throw CLI::ValidationError("seeds", "not an integer: " + s);
  return v;
}

/// "1,2,7" or "1-20" or a mix of both.
std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = std::min(text.find(',', start), text.size());
    const std::string item = text.substr(start, comma - start);
    if (!item.empty()) {
      const auto dash = item.find('-');
      if (dash == std::string::npos) {
        seeds.push_back(parse_u64(item));
      } else {
        const auto lo = parse_u64(item.substr(0, dash));
        const auto hi = parse_u64(item.substr(dash + 1));
        if (hi < lo) throw CLI::ValidationError("seeds", "empty range " + item);
        for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
      }
    }
    start = comma + 1;
  }
  if (seeds.empty()) throw CLI::ValidationError("seeds", "no seeds given");
  return seeds;
}

std::vector<std::string> split_csv(const std::string& text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = std::min(text.find(',', start), text.size());
    if (comma > start) out.push_back(text.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw vf::Error(vf::ErrorCode::IoError, "cannot write " + path);
  out << text;
}

struct AnnotateArgs {
  std::string corpus;
  std::string config;
  std::string out = "viewfuse-out";
  bool mock = false;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  std::optional<std::string> cache_dir;
  bool timings = false;
};

int run_annotate(const AnnotateArgs& a) {
  vf::PipelineConfig cfg = a.config.empty() ? vf::PipelineConfig{} : vf::PipelineConfig::load(a.config);
  if (a.mock) cfg.mock = true;
  if (a.seed) cfg.seed = *a.seed;
  if (a.workers) cfg.workers = *a.workers;
  if (a.cache_dir) cfg.cache_dir = *a.cache_dir;
  if (a.timings) cfg.include_timings = true;
  cfg.validate();

  std::shared_ptr<vf::ResponseCache> cache;
  vf::ProviderSet providers = vf::make_providers(cfg, &cache);
  vf::RunResult result = vf::run_corpus(a.corpus, cfg, providers);
  if (cache) result.stats.cache = cache->stats();
  vf::write_outputs(result, a.out, cfg.include_timings);

  const auto& s = result.stats;
  std::printf("objects=%zu succeeded=%zu failed=%zu flagged=%zu provider_calls=%llu wall=%.3fs\n", s.objects,
              s.succeeded, s.failed, s.flagged, static_cast<unsigned long long>(s.provider_calls), s.wall_seconds);
  if (s.cache) {
    std::printf("cache hits=%llu misses=%llu corruptions=%llu\n", static_cast<unsigned long long>(s.cache->hits),
                static_cast<unsigned long long>(s.cache->misses),
                static_cast<unsigned long long>(s.cache->corruptions));
  }
  for (const auto& r : result.records) {
    if (!r.ok()) std::fprintf(stderr, "failed %s: %s\n", r.object_id.c_str(), r.error.c_str());
  }
  return s.failed == 0 ? 0 : 3;
}

int run_threshold_solve(const vf::TruncatedGaussianPair& p) {
  const vf::ThresholdQuadratic q = vf::derive_optimal_threshold(p);
  const vf::ErrorRates e = vf::error_rates(p, q.root);
  std::printf("threshold %.6f\n", q.root);
  std::printf("A %.6f\nB %.6f\nC %.6f\ndiscriminant %.6f\n", q.a, q.b, q.c, q.discriminant);
  if (q.rejected_root) std::printf("rejected_root %.6f\n", *q.rejected_root);
  std::printf("fnr %.6f\nfpr %.6f\ntotal_error %.6f\n", e.fnr, e.fpr, e.total);
  std::printf("kl_pos_neg %.6f\n", vf::kl_divergence(p));
  return 0;
}

int run_threshold_sweep(const vf::TruncatedGaussianPair& p, double from, double to, double step) {
  if (!(step > 0.0) || !(to >= from)) throw CLI::ValidationError("sweep", "need from <= to and step > 0");
  p.validate();
  const auto n = static_cast<std::size_t>(std::floor((to - from) / step + 1e-9)) + 1;
  std::printf("alpha,fnr,fpr,total\n");
  for (std::size_t i = 0; i < n; ++i) {
    const double alpha = from + static_cast<double>(i) * step;
    const vf::ErrorRates e = vf::error_rates(p, alpha);
    std::printf("%.6f,%.8f,%.8f,%.8f\n", alpha, e.fnr, e.fpr, e.total);
  }
  return 0;
}

struct SimulateArgs {
  std::string env;
  std::string strategies = "ucb1,thompson,epsilon_greedy";
  std::string seeds = "1-20";
  std::string regret_csv;
  double c = 0.5;
  double epsilon = 0.1;
  double prior = 0.1;
};

int run_simulate(const SimulateArgs& a) {
  const vf::BanditEnvironment env = vf::BanditEnvironment::load(a.env);
  std::vector<vf::PolicyConfig> policies;
  for (const auto& name : split_csv(a.strategies)) {
    vf::PolicyConfig p;
    p.strategy = vf::parse_strategy(name);
    p.exploration_weight = a.c;
    p.epsilon = a.epsilon;
    p.prior_alpha = p.prior_beta = a.prior;
    policies.push_back(p);
  }
  const auto seeds = parse_seed_list(a.seeds);
  const vf::SimulationReport report = vf::simulate_strategies(env, policies, seeds);
  std::cout << report.summary_csv();
  for (const auto& s : report.strategies) {
    std::fprintf(stderr, "%s wall %.3fs\n", std::string(vf::to_string(s.strategy)).c_str(), s.wall_seconds);
  }
  if (!a.regret_csv.empty()) write_file(a.regret_csv, report.regret_csv());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"viewfuse: multi-view caption fusion for 3D objects"};
  app.require_subcommand(1);

  AnnotateArgs ann;
  auto* annotate = app.add_subcommand("annotate", "Annotate every manifest in a corpus directory");
  annotate->add_option("--corpus", ann.corpus, "Directory of *.json manifests")->required()->check(CLI::ExistingDirectory);
  annotate->add_option("--config", ann.config, "Pipeline config (JSON)")->check(CLI::ExistingFile);
  annotate->add_option("--out", ann.out, "Output directory")->capture_default_str();
  annotate->add_flag("--mock", ann.mock, "Use the deterministic mock providers");
  annotate->add_option("--seed", ann.seed, "Override the config seed");
  annotate->add_option("--workers", ann.workers, "Override the worker count");
  annotate->add_option("--cache-dir", ann.cache_dir, "Response cache directory");
  annotate->add_flag("--timings", ann.timings, "Write stage timings into each record");

  vf::TruncatedGaussianPair params;
  auto add_params = [&params](CLI::App* cmd) {
    cmd->add_option("--mu-pos", params.mu_pos)->capture_default_str();
    cmd->add_option("--mu-neg", params.mu_neg)->capture_default_str();
    cmd->add_option("--sigma-pos", params.sigma_pos)->capture_default_str();
    cmd->add_option("--sigma-neg", params.sigma_neg)->capture_default_str();
  };
  auto* threshold = app.add_subcommand("threshold", "Gate threshold analysis");
  threshold->require_subcommand(1);
  auto* solve = threshold->add_subcommand("solve", "Solve for the density crossing");
  add_params(solve);
  double from = 0.4, to = 0.7, step = 0.01;
  auto* sweep = threshold->add_subcommand("sweep", "Error rates over a threshold grid (CSV)");
  add_params(sweep);
  sweep->add_option("--from", from)->capture_default_str();
  sweep->add_option("--to", to)->capture_default_str();
  sweep->add_option("--step", step)->capture_default_str();

  SimulateArgs sim;
  auto* bandit = app.add_subcommand("bandit", "Bandit strategy tools");
  bandit->require_subcommand(1);
  auto* simulate = bandit->add_subcommand("simulate", "Compare strategies on a simulated environment");
  simulate->add_option("--env", sim.env, "Environment JSON")->required()->check(CLI::ExistingFile);
  simulate->add_option("--strategies", sim.strategies)->capture_default_str();
  simulate->add_option("--seeds", sim.seeds, "Comma list and/or ranges, e.g. 1-20")->capture_default_str();
  simulate->add_option("--regret-csv", sim.regret_csv, "Write the regret curves here");
  simulate->add_option("--c", sim.c, "UCB1 exploration weight")->capture_default_str();
  simulate->add_option("--epsilon", sim.epsilon)->capture_default_str();
  simulate->add_option("--prior", sim.prior, "Beta prior for Thompson sampling")->capture_default_str();

  std::uint64_t objects = 1;
  vf::Prices prices;
  auto* cost = app.add_subcommand("cost", "Estimate API cost");
  cost->add_option("--objects", objects)->required();
  cost->add_option("--price-image", prices.image, "Per image")->required();
  cost->add_option("--price-in", prices.text_in_per_1k, "Per 1k input tokens")->required();
  cost->add_option("--price-out", prices.text_out_per_1k, "Per 1k output tokens")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*annotate) return run_annotate(ann);
    if (*solve) return run_threshold_solve(params);
    if (*sweep) return run_threshold_sweep(params, from, to, step);
    if (*simulate) return run_simulate(sim);
    if (*cost) {
      std::printf("%.10g\n", vf::estimate_cost(objects, prices));
      return 0;
    }
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 1;
}
