#include <benchmark/benchmark.h>

#include "bidfm/bidfm.hpp"

using namespace bidfm;

namespace {

Matrix sampled(int n_r, int n_c) {
  const BiDFMParams p{sample_memberships(n_r, 2, 1), sample_memberships(n_c, 3, 2), mixing_p1(), 0.5};
  return sample_adjacency(expected_adjacency(p), DistributionSpec::bernoulli(), 3);
}

void BM_TruncatedSvd(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Matrix a = sampled(n, n * 3 / 2);
  for (auto _ : state) benchmark::DoNotOptimize(truncated_svd(a, 2));
}
BENCHMARK(BM_TruncatedSvd)->Arg(200)->Arg(600)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_KMeans(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const SvdFactors f = truncated_svd(sampled(n, n), 2);
  for (auto _ : state) benchmark::DoNotOptimize(kmeans(f.left, 2, 7));
}
BENCHMARK(BM_KMeans)->Arg(300)->Arg(3000)->Unit(benchmark::kMillisecond);

void BM_Detect(benchmark::State& state) {
  const auto alg = static_cast<Algorithm>(state.range(0));
  const Matrix a = sampled(200, 300);
  state.SetLabel(to_string(alg));
  for (auto _ : state) benchmark::DoNotOptimize(run_algorithm(alg, a, 2, 3, 11));
}
BENCHMARK(BM_Detect)->DenseRange(0, 4)->Unit(benchmark::kMillisecond);

void BM_Sample(benchmark::State& state) {
  const BiDFMParams p{sample_memberships(600, 2, 1), sample_memberships(900, 3, 2), mixing_p1(), 0.5};
  const Matrix omega = expected_adjacency(p);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sample_adjacency(omega, DistributionSpec::bernoulli(), ++seed));
}
BENCHMARK(BM_Sample)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
