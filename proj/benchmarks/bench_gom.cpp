#include <benchmark/benchmark.h>

#include "bench_common.hpp"
#include "gpg/gomea.hpp"

using namespace gpg;

namespace {

// One full GOM application against a fixed population, the per-individual
// unit of work inside a generation.
void BM_gom_application(benchmark::State& state) {
  int height = static_cast<int>(state.range(0));
  int rows = static_cast<int>(state.range(1));
  Rng rng(7);
  TreeTemplate tpl(height, 2);
  SymbolSet sets = default_symbol_set(5);
  Matrix x = gpgbench::random_features(rng, rows, 5);
  std::vector<double> y(rows);
  for (int i = 0; i < rows; ++i) y[i] = x.at(i, 0) * x.at(i, 1) + x.at(i, 2);

  TrainingEvaluator eval(tpl, sets, x, y);
  Population pop;
  for (int i = 0; i < 256; ++i) {
    Solution s;
    s.tree = init_half_and_half(rng, tpl, sets);
    eval.evaluate(s);
    pop.members.push_back(std::move(s));
  }
  Fos fos = build_random_tree(rng, tpl.size());

  std::size_t i = 0;
  for (auto _ : state) {
    Solution off = gom(pop.members[i % pop.members.size()], pop, fos, eval, tpl, sets, rng);
    benchmark::DoNotOptimize(&off);
    ++i;
  }
}
BENCHMARK(BM_gom_application)->Args({4, 154})->Args({4, 751});

}  // namespace
