#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "viewfuse/bandit.hpp"
#include "viewfuse/clustering.hpp"
#include "viewfuse/gating.hpp"
#include "viewfuse/mock_providers.hpp"
#include "viewfuse/pipeline.hpp"

using namespace viewfuse;

namespace {

std::vector<EmbeddingVector> random_embeddings(std::size_t n, std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<EmbeddingVector> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> v(dim);
    for (double& x : v) x = g(gen);
    out.emplace_back(std::move(v));
  }
  return out;
}

void BM_Dbscan(benchmark::State& state) {
  const auto emb = random_embeddings(static_cast<std::size_t>(state.range(0)), 384, 1);
  for (auto _ : state) benchmark::DoNotOptimize(dbscan_cluster(emb, {0.15, 2}));
}
BENCHMARK(BM_Dbscan)->Arg(5)->Arg(16)->Arg(64);

void BM_Ucb1SelectUpdate(benchmark::State& state) {
  BanditState s = BanditState::with_arms(static_cast<std::size_t>(state.range(0)));
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (auto _ : state) {
    const std::size_t arm = ucb1_select(s);
    s = update_mean(std::move(s), arm, RewardSignal(u(gen)));
  }
}
BENCHMARK(BM_Ucb1SelectUpdate)->Arg(5)->Arg(50);

void BM_ThresholdSolve(benchmark::State& state) {
  const TruncatedGaussianPair params{0.65, 0.1, 0.35, 0.15};
  for (auto _ : state) benchmark::DoNotOptimize(derive_optimal_threshold(params));
}
BENCHMARK(BM_ThresholdSolve);

ObjectManifest bench_manifest() {
  ObjectManifest m;
  m.object_id = "bench-0001";
  for (Viewpoint v : kAllViewpoints) m.view_images[v] = "views/" + std::string(to_string(v)) + ".png";
  m.point_cloud_ref = "cloud.ply";
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 256; ++i) m.point_cloud.points.push_back({u(gen), u(gen), u(gen)});
  m.metadata = {{"mock.truth", "A red wooden chair with four legs."}};
  return m;
}

void BM_AnnotateObjectMock(benchmark::State& state) {
  const ObjectManifest m = bench_manifest();
  PipelineConfig cfg;
  cfg.mock = true;
  auto providers = make_providers(cfg);
  for (auto _ : state) benchmark::DoNotOptimize(annotate_object(m, cfg, providers));
}
BENCHMARK(BM_AnnotateObjectMock)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
