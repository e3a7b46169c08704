#include "hqmm/gradient.hpp"
#include "hqmm/model.hpp"
#include "hqmm/stiefel.hpp"

#include <benchmark/benchmark.h>

using namespace hqmm;

namespace {

void BM_FilterStep(benchmark::State& state) {
  const Index n = state.range(0), w = state.range(1);
  const Hqmm m = random_hqmm(n, 6, w, 1);
  DensityMatrix rho = m.rho0();
  Symbol y = 0;
  for (auto _ : state) {
    auto step = filter_step(m, rho, y);
    rho = std::move(step.rho);
    y = (y + 1) % 6;
    benchmark::DoNotOptimize(step.log_prob);
  }
}
BENCHMARK(BM_FilterStep)->Args({2, 1})->Args({4, 2})->Args({8, 2})->Args({16, 4});

void BM_LossGradient(benchmark::State& state) {
  const Index n = state.range(0), w = state.range(1);
  const Hqmm m = random_hqmm(n, 6, w, 2);
  std::vector<ObservationSequence> batch;
  for (std::uint64_t i = 0; i < 10; ++i) batch.push_back(sample(m, 300, i));
  for (auto _ : state) benchmark::DoNotOptimize(loss_gradient(m, batch, 100).loss);
  state.SetItemsProcessed(state.iterations() * 3000);
}
BENCHMARK(BM_LossGradient)->Args({2, 1})->Args({5, 2})->Args({8, 2})->Unit(benchmark::kMillisecond);

// full (nN x nN) solve against the 2n x 2n low-rank form
void BM_Retract(benchmark::State& state) {
  const Index n = state.range(0), blocks = state.range(1);
  const bool low_rank = state.range(2) != 0;
  const StiefelPoint x = random_stiefel(n, blocks, 3);
  Rng rng(4);
  const CMatrix g = complex_gaussian(n * blocks, n, rng);
  for (auto _ : state) {
    auto y = low_rank ? cayley_retract_smw(x, g, 0.5) : cayley_retract(x, g, 0.5);
    benchmark::DoNotOptimize(y.matrix().data());
  }
}
BENCHMARK(BM_Retract)
    ->ArgNames({"n", "blocks", "smw"})
    ->Args({4, 6, 0})
    ->Args({4, 6, 1})
    ->Args({5, 12, 0})
    ->Args({5, 12, 1})
    ->Args({8, 24, 0})
    ->Args({8, 24, 1});

}  // namespace

BENCHMARK_MAIN();
