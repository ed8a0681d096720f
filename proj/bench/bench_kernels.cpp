// Serial reference vs OpenMP kernel timings.
#include <benchmark/benchmark.h>
#include <omp.h>

#include "geoscout/batch.hpp"
#include "geoscout/embedding.hpp"
#include "geoscout/grpo.hpp"
#include "geoscout/image.hpp"
#include "geoscout/rng.hpp"

using namespace geoscout;

namespace {

ImageBuffer noise_image(int w, int h) {
  Rng rng(7);
  std::vector<std::uint8_t> px(static_cast<std::size_t>(w) * h);
  for (auto& p : px) p = static_cast<std::uint8_t>(rng.below(256));
  return ImageBuffer(w, h, 1, std::move(px));
}

EmbeddingIndex random_index(std::size_t n, std::size_t dim) {
  Rng rng(11);
  std::vector<std::string> ids;
  std::vector<std::vector<float>> vecs;
  for (std::size_t i = 0; i < n; ++i) {
    ids.push_back("x" + std::to_string(i));
    std::vector<float> v(dim);
    for (auto& x : v) x = static_cast<float>(rng.normal());
    vecs.push_back(std::move(v));
  }
  return EmbeddingIndex(std::move(ids), std::move(vecs));
}

std::vector<RewardItem> jigsaw_items(std::size_t n) {
  Rng rng(3);
  std::vector<RewardItem> items;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<int> p{0, 1, 2, 3};
    for (int k = 3; k > 0; --k) std::swap(p[k], p[rng.below(k + 1)]);
    items.push_back({TopoTruth{Permutation(p), GridSpec(2, 2)}, Mode::Direct, "order=[2,0,3,1]"});
  }
  return items;
}

void BM_ResizeSerial(benchmark::State& s) {
  const auto img = noise_image(1024, 1024);
  for (auto _ : s) benchmark::DoNotOptimize(serial::resize_bilinear(img, 448, 448));
}
void BM_ResizeParallel(benchmark::State& s) {
  const auto img = noise_image(1024, 1024);
  for (auto _ : s) benchmark::DoNotOptimize(resize_bilinear(img, 448, 448));
}

void BM_Top1Serial(benchmark::State& s) {
  const auto idx = random_index(20000, 128);
  const auto q = idx.vector(17);
  for (auto _ : s) benchmark::DoNotOptimize(serial::top1_similar(q, idx, "x17"));
}
void BM_Top1Parallel(benchmark::State& s) {
  const auto idx = random_index(20000, 128);
  const auto q = idx.vector(17);
  for (auto _ : s) benchmark::DoNotOptimize(top1_similar(q, idx, "x17"));
}

void BM_ScoreBatchSerial(benchmark::State& s) {
  const auto items = jigsaw_items(10000);
  for (auto _ : s) benchmark::DoNotOptimize(serial::score_batch(items, RewardConfig{}));
  s.SetItemsProcessed(s.iterations() * static_cast<std::int64_t>(items.size()));
}
void BM_ScoreBatchParallel(benchmark::State& s) {
  const auto items = jigsaw_items(10000);
  for (auto _ : s) benchmark::DoNotOptimize(score_batch(items, RewardConfig{}));
  s.SetItemsProcessed(s.iterations() * static_cast<std::int64_t>(items.size()));
}

void grpo_seeds(benchmark::State& s, int threads) {
  const int saved = omp_get_max_threads();
  omp_set_num_threads(threads);
  std::vector<SimEnv> envs{SimEnv::named("anomaly4x4", RewardMode::Dense),
                           SimEnv::named("anomaly4x4", RewardMode::Sparse)};
  GrpoConfig cfg;
  cfg.steps = 100;
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t i = 0; i < 8; ++i) seeds.push_back(i);
  for (auto _ : s) benchmark::DoNotOptimize(run_experiment(envs, cfg, seeds));
  omp_set_num_threads(saved);
}
void BM_GrpoSeedsSerial(benchmark::State& s) { grpo_seeds(s, 1); }
void BM_GrpoSeedsParallel(benchmark::State& s) { grpo_seeds(s, omp_get_num_procs()); }

}  // namespace

BENCHMARK(BM_ResizeSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ResizeParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Top1Serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Top1Parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ScoreBatchSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ScoreBatchParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GrpoSeedsSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GrpoSeedsParallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
