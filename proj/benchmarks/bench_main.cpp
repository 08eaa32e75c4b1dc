#include <random>

#include <benchmark/benchmark.h>

#include "dynspec/spectral.hpp"
#include "dynspec/systems.hpp"
#include "dynspec/tentropy.hpp"

namespace {

using namespace dynspec;

TransferMatrix random_operator(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> state(0, n - 1);
  std::uniform_real_distribution<double> weight(0.2, 5.0);
  std::vector<int> map(n);
  Vec psi(n);
  for (int i = 0; i < n; ++i) {
    map[i] = state(rng);
    psi[i] = weight(rng);
  }
  return build_pf_operator(FiniteMapSystem(n, std::move(map)), psi);
}

void BM_SpectralRadius(benchmark::State& state) {
  const TransferMatrix a = random_operator(static_cast<int>(state.range(0)), 7);
  const Potential phi(Vec(a.n_states(), 0.3));
  for (auto _ : state) benchmark::DoNotOptimize(spectral_potential(a, phi).dominant_eigenvalue);
}
BENCHMARK(BM_SpectralRadius)->Arg(8)->Arg(32)->Arg(128);

void BM_TEntropy(benchmark::State& state) {
  const TransferMatrix a = random_operator(static_cast<int>(state.range(0)), 11);
  const std::vector<InvariantMeasure> verts = ergodic_measures(a.system());
  for (auto _ : state) benchmark::DoNotOptimize(t_entropy(a, verts.front(), 16).value);
}
BENCHMARK(BM_TEntropy)->Arg(6)->Arg(12);

}  // namespace

BENCHMARK_MAIN();
