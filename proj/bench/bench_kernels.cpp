#include <benchmark/benchmark.h>

#include <vector>

#include "slfnet/kernels.hpp"
#include "slfnet/metrics.hpp"
#include "slfnet/rng.hpp"
#include "slfnet/synth.hpp"

using namespace slfnet;

namespace {

std::vector<double> random_values(std::size_t n, std::uint64_t seed) {
  Xorshift64Star rng(seed);
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(-1.0, 1.0);
  return v;
}

kernels::Exec exec_of(const benchmark::State& state) {
  return state.range(1) ? kernels::Exec::Parallel : kernels::Exec::Serial;
}

void BM_Matmul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = random_values(n * n, 1), b = random_values(n * n, 2);
  std::vector<double> c(n * n);
  for (auto _ : state) {
    kernels::matmul(a, b, c, n, n, n, exec_of(state));
    benchmark::DoNotOptimize(c.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n * n));
}

void BM_MatmulAccAt(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = random_values(n * n, 3), b = random_values(n * n, 4);
  std::vector<double> c(n * n);
  for (auto _ : state) {
    kernels::matmul_acc_at(a, b, c, n, n, n, exec_of(state));
    benchmark::DoNotOptimize(c.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n * n));
}

void BM_Evaluate(benchmark::State& state) {
  static const auto corpus = generate_synthetic(GrammarConfig::defaults(), 200);
  static const SlfModel model = SlfModel::create(ModelConfig{}, build_vocabulary(corpus), 7);
  for (auto _ : state) benchmark::DoNotOptimize(evaluate(model, corpus, exec_of(state)).C);
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(corpus.size()));
}

}  // namespace

BENCHMARK(BM_Matmul)->ArgsProduct({{32, 128, 256}, {0, 1}})->ArgNames({"n", "parallel"});
BENCHMARK(BM_MatmulAccAt)->ArgsProduct({{32, 128, 256}, {0, 1}})->ArgNames({"n", "parallel"});
BENCHMARK(BM_Evaluate)->ArgsProduct({{0}, {0, 1}})->ArgNames({"", "parallel"})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
