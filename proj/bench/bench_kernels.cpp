#include <benchmark/benchmark.h>

#include <random>

#include "iwil/envs.hpp"
#include "iwil/kernels.hpp"
#include "iwil/reweight.hpp"

using namespace iwil;

namespace {

struct Fixture {
  PolicyParams params;
  std::vector<Sample> samples;
  GradMatrix grads;
  std::vector<double> weights;
  std::vector<double> out;

  explicit Fixture(std::size_t n, std::size_t d = 12) : params(kNumActions, d) {
    Rng rng(7);
    std::normal_distribution<double> z(0.0, 1.0);
    for (double& v : params.flat()) v = 0.1 * z(rng);
    samples.resize(n);
    for (auto& s : samples) {
      s.state.resize(d);
      for (double& v : s.state) v = z(rng);
      s.action = static_cast<int>(rng() % kNumActions);
    }
    kernels::serial::per_sample_grads(params, samples, grads);
    weights.assign(n, 1.0 / static_cast<double>(n));
    out.resize(params.flat_size());
  }
};

template <bool Parallel>
void BM_PerSampleGrads(benchmark::State& state) {
  Fixture f(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    if constexpr (Parallel)
      kernels::parallel::per_sample_grads(f.params, f.samples, f.grads);
    else
      kernels::serial::per_sample_grads(f.params, f.samples, f.grads);
    benchmark::DoNotOptimize(f.grads.data().data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void BM_WeightedRowSum(benchmark::State& state) {
  Fixture f(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    if constexpr (Parallel)
      kernels::parallel::weighted_row_sum(f.weights, f.grads, f.out);
    else
      kernels::serial::weighted_row_sum(f.weights, f.grads, f.out);
    benchmark::DoNotOptimize(f.out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_UpdateLogits(benchmark::State& state) {
  Fixture f(static_cast<std::size_t>(state.range(0)));
  const GradientVec target{std::vector<double>(f.params.flat_size(), 0.01)};
  for (auto _ : state) {
    auto w = update_logits(WeightState::uniform(f.samples.size()), f.grads, target, 0.05, 10);
    benchmark::DoNotOptimize(w.weights.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_PerSampleGrads<false>)->Arg(2400)->Arg(24000);
BENCHMARK(BM_PerSampleGrads<true>)->Arg(2400)->Arg(24000);
BENCHMARK(BM_WeightedRowSum<false>)->Arg(2400)->Arg(24000);
BENCHMARK(BM_WeightedRowSum<true>)->Arg(2400)->Arg(24000);
BENCHMARK(BM_UpdateLogits)->Arg(2400)->Arg(24000);

BENCHMARK_MAIN();
