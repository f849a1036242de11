#include <benchmark/benchmark.h>

#include "bench_common.hpp"
#include "gpg/fos.hpp"
#include "gpg/linkage.hpp"

using namespace gpg;

namespace {

// Frequency counting plus similarity-matrix construction, per ERC
// strategy. With constants in play, all-const's unbounded alphabet is the
// slow case that on-line binning exists to avoid.
void BM_count_and_similarity(benchmark::State& state) {
  auto strategy = static_cast<ErcStrategy>(state.range(0));
  int n_pop = static_cast<int>(state.range(1));
  Rng rng(3);
  TreeTemplate tpl(4, 2);
  SymbolSet sets = default_symbol_set(5);
  sets.erc = ErcDescriptor{-10.0, 10.0};
  auto pop = gpgbench::random_population(rng, tpl, sets, n_pop);

  for (auto _ : state) {
    ErcBinTable bins(100);
    FrequencyModel model = count_frequencies(pop, strategy, bins, tpl);
    BiasCoefficients bias = capture_bias(model);
    auto sim = similarity_matrix_biased_mi(model, bias);
    benchmark::DoNotOptimize(sim.data());
  }
  state.SetItemsProcessed(state.iterations() * n_pop);
}
BENCHMARK(BM_count_and_similarity)
    ->Args({static_cast<int>(ErcStrategy::AllConst), 2000})
    ->Args({static_cast<int>(ErcStrategy::NoConst), 2000})
    ->Args({static_cast<int>(ErcStrategy::BinConst), 2000})
    ->Args({static_cast<int>(ErcStrategy::BinConst), 8000});

// Counting cost against template size at fixed population; the loop is
// O(n_pop * ell^2).
void BM_count_by_height(benchmark::State& state) {
  int height = static_cast<int>(state.range(0));
  Rng rng(4);
  TreeTemplate tpl(height, 2);
  SymbolSet sets = default_symbol_set(6);
  auto pop = gpgbench::random_population(rng, tpl, sets, 500);

  for (auto _ : state) {
    ErcBinTable bins(100);
    FrequencyModel model = count_frequencies(pop, ErcStrategy::BinConst, bins, tpl);
    benchmark::DoNotOptimize(&model);
  }
}
BENCHMARK(BM_count_by_height)->Arg(2)->Arg(3)->Arg(4)->Arg(5);

void BM_build_linkage_tree(benchmark::State& state) {
  int ell = static_cast<int>(state.range(0));
  Rng rng(5);
  std::vector<double> sim(static_cast<std::size_t>(ell) * ell, 0.0);
  for (int i = 0; i < ell; ++i)
    for (int j = i + 1; j < ell; ++j) {
      double v = uniform_unit(rng);
      sim[static_cast<std::size_t>(i) * ell + j] = v;
      sim[static_cast<std::size_t>(j) * ell + i] = v;
    }
  for (auto _ : state) {
    Fos fos = build_linkage_tree(sim, ell);
    benchmark::DoNotOptimize(&fos);
  }
}
BENCHMARK(BM_build_linkage_tree)->Arg(7)->Arg(31)->Arg(63);

void BM_build_random_tree(benchmark::State& state) {
  int ell = static_cast<int>(state.range(0));
  Rng rng(6);
  for (auto _ : state) {
    Fos fos = build_random_tree(rng, ell);
    benchmark::DoNotOptimize(&fos);
  }
}
BENCHMARK(BM_build_random_tree)->Arg(31)->Arg(63);

}  // namespace
