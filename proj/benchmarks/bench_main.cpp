#include "tecue/detector.hpp"
#include "tecue/embedding.hpp"
#include "tecue/models.hpp"
#include "tecue/synth.hpp"
#include "tecue/transfer_entropy.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace tecue;

namespace {

std::pair<TimeSeries, TimeSeries> var_pair(std::int64_t n) {
  Var1Spec s;
  s.A << 0.5, 0.5, 0.0, 0.0;
  s.n = n;
  s.seed = 3;
  s.dt = 0.01;
  return gen_var1(s);
}

void BM_Embed(benchmark::State& state) {
  const auto [x, y] = var_pair(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(embed(x, y, {4, 0.04, 0.01}));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Embed)->Arg(10000)->Arg(100000);

void BM_FitVar(benchmark::State& state) {
  const auto [x, y] = var_pair(state.range(0));
  const auto ds = embed(x, y, {4, 0.04, 0.01});
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_var(ds, Conditioning::augmented));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FitVar)->Arg(10000)->Arg(100000);

void BM_FitMlp(benchmark::State& state) {
  const auto [x, y] = var_pair(5000);
  const auto ds = embed(x, y, {4, 0.04, 0.01});
  TrainConfig tc;
  tc.epochs = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_mlp(ds, Conditioning::augmented, MlpArch{{32, 32}}, tc));
  }
}
BENCHMARK(BM_FitMlp)->Arg(5)->Unit(benchmark::kMillisecond);

void BM_LocalTe(benchmark::State& state) {
  const auto [x, y] = var_pair(state.range(0));
  const auto ds = embed(x, y, {4, 0.04, 0.01});
  const auto base = fit_var(ds, Conditioning::baseline);
  const auto full = fit_var(ds, Conditioning::augmented);
  for (auto _ : state) {
    const auto pb = predict(base, model_inputs(ds, Conditioning::baseline));
    const auto pf = predict(full, model_inputs(ds, Conditioning::augmented));
    benchmark::DoNotOptimize(local_te(pb, pf, ds.targets, TeMode::loglik_ratio));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LocalTe)->Arg(10000);

void BM_Detect(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n;
  TeSeries s;
  for (std::int64_t i = 0; i < state.range(0); ++i) {
    s.t.push_back(static_cast<double>(i) * 0.01);
    s.te_raw.push_back(n(rng));
  }
  DetectorConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(detect_trace(s, cfg));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Detect)->Arg(100000);

}  // namespace

BENCHMARK_MAIN();
