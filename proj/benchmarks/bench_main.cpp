#include <benchmark/benchmark.h>

#include <vector>

#include "wyckoff/neural_core.hpp"
#include "wyckoff/pattern_synth.hpp"
#include "wyckoff/random.hpp"
#include "wyckoff/train_eval.hpp"
#include "wyckoff/wyckoff_rules.hpp"

using namespace wyckoff;

static void BM_Forward(benchmark::State& state) {
  const auto width = static_cast<std::size_t>(state.range(0));
  const auto m = nn::init_params(width, 64, 1);
  std::vector<double> x(width, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(nn::predict(m, x));
}
BENCHMARK(BM_Forward)->Arg(4)->Arg(10);

static void BM_ForwardBackward(benchmark::State& state) {
  const auto width = static_cast<std::size_t>(state.range(0));
  const auto m = nn::init_params(width, 64, 1);
  auto grads = nn::LstmModel::zeros(width, 64);
  std::vector<double> x(width, 0.5);
  for (auto _ : state) {
    const auto cache = nn::forward(m, x);
    nn::accumulate_gradients(m, cache, 1, 1.0, grads);
    benchmark::ClobberMemory();
  }
}
BENCHMARK(BM_ForwardBackward)->Arg(4)->Arg(10);

static void BM_SequentialForward(benchmark::State& state) {
  const auto m = nn::init_params(1, 64, 1, 10);
  std::vector<double> x(10, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(nn::predict(m, x));
}
BENCHMARK(BM_SequentialForward);

static void BM_GenDataset(benchmark::State& state) {
  const auto phase = state.range(0) == 0 ? Phase::TR : Phase::ST;
  for (auto _ : state) {
    auto d = synth::gen_dataset({.phase = phase, .n_valid = 1000, .n_invalid = 1000, .seed = 3});
    benchmark::DoNotOptimize(d.samples.data());
  }
  state.SetItemsProcessed(state.iterations() * 2000);
}
BENCHMARK(BM_GenDataset)->Arg(0)->Arg(1);

static void BM_Roc(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(4);
  std::vector<double> scores(n);
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    scores[i] = rng.uniform01();
    labels[i] = static_cast<int>(i % 2);
  }
  for (auto _ : state) benchmark::DoNotOptimize(train::roc(scores, labels).auc);
}
BENCHMARK(BM_Roc)->Arg(8000)->Arg(100000);

static void BM_ExtractSwings(benchmark::State& state) {
  Rng rng(5);
  std::vector<double> prices(100000);
  double p = 100.0;
  for (double& v : prices) v = (p += rng.gauss(0.0, 1.0));
  for (auto _ : state) benchmark::DoNotOptimize(rules::extract_swings(prices, 5).points.size());
}
BENCHMARK(BM_ExtractSwings);

BENCHMARK_MAIN();
