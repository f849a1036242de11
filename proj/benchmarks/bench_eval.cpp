#include <benchmark/benchmark.h>

#include "bench_common.hpp"
#include "gpg/fitness.hpp"

using namespace gpg;

namespace {

// Tree evaluation over a training-sized matrix, by template height.
void BM_evaluate_genotype(benchmark::State& state) {
  int height = static_cast<int>(state.range(0));
  int rows = static_cast<int>(state.range(1));
  Rng rng(1);
  TreeTemplate tpl(height, 2);
  SymbolSet sets = default_symbol_set(6);
  Matrix x = gpgbench::random_features(rng, rows, 6);
  auto pop = gpgbench::random_population(rng, tpl, sets, 256);

  Evaluator eval(tpl);
  std::vector<double> out(rows);
  std::size_t i = 0;
  for (auto _ : state) {
    eval.evaluate(pop[i % pop.size()], sets, x, out);
    benchmark::DoNotOptimize(out.data());
    ++i;
  }
  state.SetItemsProcessed(state.iterations() * rows);
}
BENCHMARK(BM_evaluate_genotype)->Args({2, 154})->Args({4, 154})->Args({4, 751})->Args({5, 751});

void BM_scaled_mse(benchmark::State& state) {
  int rows = static_cast<int>(state.range(0));
  Rng rng(2);
  std::vector<double> y(rows), p(rows);
  for (int i = 0; i < rows; ++i) {
    y[i] = uniform_real(rng, -5, 5);
    p[i] = uniform_real(rng, -5, 5);
  }
  for (auto _ : state) {
    double v = scaled_mse(y, p);
    benchmark::DoNotOptimize(v);
  }
  state.SetItemsProcessed(state.iterations() * rows);
}
BENCHMARK(BM_scaled_mse)->Arg(154)->Arg(751);

void BM_scaled_mse_fast(benchmark::State& state) {
  int rows = static_cast<int>(state.range(0));
  Rng rng(2);
  std::vector<double> y(rows), p(rows);
  for (int i = 0; i < rows; ++i) {
    y[i] = uniform_real(rng, -5, 5);
    p[i] = uniform_real(rng, -5, 5);
  }
  TargetMoments m = target_moments(y);
  for (auto _ : state) {
    double v = scaled_mse_fast(m, y, p);
    benchmark::DoNotOptimize(v);
  }
  state.SetItemsProcessed(state.iterations() * rows);
}
BENCHMARK(BM_scaled_mse_fast)->Arg(154)->Arg(751);

}  // namespace
