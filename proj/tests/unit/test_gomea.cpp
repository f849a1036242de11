#include <doctest.h>

#include <cmath>

#include "gpg/gomea.hpp"

using namespace gpg;

namespace {

// y = 2*x0 - x1 with a third noise feature; exactly representable.
Dataset toy_dataset(int n = 40, std::uint64_t seed = 5) {
  Rng rng(seed);
  Dataset d;
  d.name = "toy";
  d.features = Matrix(n, 3);
  d.target.resize(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < 3; ++j) d.features.at(i, j) = uniform_real(rng, -2, 2);
    d.target[i] = 2.0 * d.features.at(i, 0) - d.features.at(i, 1);
  }
  return d;
}

struct GomFixture {
  TreeTemplate tpl{2, 2};
  SymbolSet sets = default_symbol_set(3);
  Dataset data = toy_dataset();
  SplitData train;
  GomFixture() { train = take_rows(data, all_rows()); }
  std::vector<int> all_rows() {
    std::vector<int> rows(data.rows());
    for (int i = 0; i < data.rows(); ++i) rows[i] = i;
    return rows;
  }

  GenotypeTree terminal_tree(std::uint16_t feature) {
    GenotypeTree t;
    t.height = 2;
    t.arity = 2;
    t.symbols.assign(tpl.size(), Symbol::feature(2));
    t.symbols[0] = Symbol::feature(feature);
    return t;
  }
};

Fos singleton_ladder(Rng& rng, int ell) { return build_random_tree(rng, ell); }

}  // namespace

TEST_CASE("gom with identical donors consumes no evaluations") {
  GomFixture fx;
  TrainingEvaluator eval(fx.tpl, fx.sets, fx.train.x, fx.train.y);

  Population pop;
  Solution proto;
  proto.tree = fx.terminal_tree(0);
  eval.evaluate(proto);
  for (int i = 0; i < 8; ++i) pop.members.push_back(proto);

  Rng rng(3);
  Fos fos = singleton_ladder(rng, fx.tpl.size());
  std::int64_t evals_before = eval.evaluations();
  Solution off = gom(pop.members[0], pop, fos, eval, fx.tpl, fx.sets, rng);
  CHECK(eval.evaluations() == evals_before);
  CHECK(off.tree == proto.tree);
  CHECK(off.fitness == proto.fitness);
}

TEST_CASE("gom keeps equal-fitness changes") {
  GomFixture fx;
  // Make feature 2 identical to feature 0, so swapping them is a semantic
  // change with exactly equal fitness.
  for (int i = 0; i < fx.data.rows(); ++i) fx.train.x.at(i, 2) = fx.train.x.at(i, 0);
  TrainingEvaluator eval(fx.tpl, fx.sets, fx.train.x, fx.train.y);

  Solution parent;
  parent.tree = fx.terminal_tree(0);
  eval.evaluate(parent);
  Solution donor;
  donor.tree = fx.terminal_tree(2);
  donor.tree.symbols[1] = Symbol::feature(0);  // make introns match the parent's
  donor.tree.symbols[2] = Symbol::feature(2);
  eval.evaluate(donor);
  REQUIRE(donor.fitness == parent.fitness);

  Population pop;
  pop.members = {donor, donor};
  Rng rng(9);
  Fos fos = singleton_ladder(rng, fx.tpl.size());
  Solution off = gom(parent, pop, fos, eval, fx.tpl, fx.sets, rng);
  CHECK(off.tree.symbols[0] == Symbol::feature(2));  // neutral move kept
  CHECK(off.fitness == parent.fitness);
}

TEST_CASE("gom reverts worsening steps exactly") {
  GomFixture fx;
  TrainingEvaluator eval(fx.tpl, fx.sets, fx.train.x, fx.train.y);

  // Parents sit at a local optimum, so donors mostly worsen them; the
  // observer audits that each rejected step restores the backup exactly.
  Solution parent;
  parent.tree = fx.terminal_tree(0);
  eval.evaluate(parent);

  Rng pop_rng(21);
  Population pop;
  for (int i = 0; i < 16; ++i) {
    Solution s;
    s.tree = init_half_and_half(pop_rng, fx.tpl, fx.sets);
    eval.evaluate(s);
    pop.members.push_back(std::move(s));
  }

  Rng rng(33);
  for (int trial = 0; trial < 100; ++trial) {
    Fos fos = singleton_ladder(rng, fx.tpl.size());
    Solution shadow = parent;  // expected backup state
    GomObserver audit = [&](const GomStepInfo& info) {
      if (info.evaluated && !info.accepted) {
        CHECK(info.offspring->tree == shadow.tree);
        CHECK(info.offspring->fitness == shadow.fitness);
        CHECK(info.offspring->scale.intercept == shadow.scale.intercept);
        CHECK(info.offspring->scale.slope == shadow.scale.slope);
      } else {
        shadow = *info.offspring;
      }
    };
    Solution off = gom(parent, pop, fos, eval, fx.tpl, fx.sets, rng, &audit);
    CHECK(off.fitness <= parent.fitness);
  }
}

TEST_CASE("gom skips the full location set") {
  GomFixture fx;
  TrainingEvaluator eval(fx.tpl, fx.sets, fx.train.x, fx.train.y);
  Solution parent;
  parent.tree = fx.terminal_tree(0);
  eval.evaluate(parent);
  Solution other;
  other.tree = fx.terminal_tree(1);
  eval.evaluate(other);

  Fos fos;
  fos.ell = fx.tpl.size();
  fos.subsets.push_back({});
  for (int i = 0; i < fos.ell; ++i) fos.subsets[0].push_back(i);
  fos.children.emplace_back(-1, -1);

  Population pop;
  pop.members = {other, other};
  Rng rng(1);
  std::int64_t evals_before = eval.evaluations();
  Solution off = gom(parent, pop, fos, eval, fx.tpl, fx.sets, rng);
  CHECK(off.tree == parent.tree);
  CHECK(eval.evaluations() == evals_before);
}

TEST_CASE("gom evaluation count is bounded by the non-root FOS size") {
  GomFixture fx;
  TrainingEvaluator eval(fx.tpl, fx.sets, fx.train.x, fx.train.y);
  Rng rng(55);
  Population pop;
  for (int i = 0; i < 12; ++i) {
    Solution s;
    s.tree = init_half_and_half(rng, fx.tpl, fx.sets);
    eval.evaluate(s);
    pop.members.push_back(std::move(s));
  }
  const int ell = fx.tpl.size();
  for (int i = 0; i < 20; ++i) {
    Fos fos = build_random_tree(rng, ell);
    std::int64_t before = eval.evaluations();
    gom(pop.members[i % pop.size()], pop, fos, eval, fx.tpl, fx.sets, rng);
    CHECK(eval.evaluations() - before <= 2 * ell - 2);
  }
}

TEST_CASE("has_converged is syntactic") {
  GomFixture fx;
  Population pop;
  Solution s;
  s.tree = fx.terminal_tree(0);
  s.fitness = 1.0;
  pop.members.assign(5, s);
  CHECK(has_converged(pop));

  pop.members[3].tree.symbols[4] = Symbol::feature(1);  // intron differs
  CHECK_FALSE(has_converged(pop));

  SUBCASE("fresh random populations are unconverged") {
    TreeTemplate tpl(4, 2);
    SymbolSet sets = default_symbol_set(3);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      Rng rng(seed);
      Population p;
      for (int i = 0; i < 2; ++i) {
        Solution r;
        r.tree = init_half_and_half(rng, tpl, sets);
        r.fitness = 0;
        p.members.push_back(std::move(r));
      }
      CHECK_FALSE(has_converged(p));
    }
  }
}

TEST_CASE("a clone population makes every GOM step a no-op") {
  Dataset data = toy_dataset();
  Rng split_rng(7);
  SplitIndices idx = split(data, split_rng);
  SymbolSet sets = make_symbol_set(data, idx.train, false);
  TreeTemplate tpl(2, sets.arity());
  SplitData train = take_rows(data, idx.train);
  TrainingEvaluator eval(tpl, sets, train.x, train.y);

  Rng rng(99);
  Solution proto;
  proto.tree = init_half_and_half(rng, tpl, sets);
  eval.evaluate(proto);
  Population clones;
  clones.members.assign(10, proto);

  std::int64_t evals_before = eval.evaluations();
  Fos fos = build_random_tree(rng, tpl.size());
  for (const Solution& member : clones.members) {
    Solution off = gom(member, clones, fos, eval, tpl, sets, rng);
    CHECK(off.tree == proto.tree);
  }
  CHECK(eval.evaluations() == evals_before);
}

TEST_CASE("run_gomea honors generation budgets and is deterministic") {
  Dataset data = toy_dataset(60, 11);
  Rng split_rng(3);
  SplitIndices idx = split(data, split_rng);

  GomeaConfig cfg;
  cfg.n_pop = 30;
  cfg.height = 2;
  cfg.fos = FosKind::LtBiasedMi;
  cfg.budget.generations = 20;
  cfg.seed = 77;

  RunResult a = run_gomea(cfg, data, idx);
  RunResult b = run_gomea(cfg, data, idx);

  CHECK(a.generations == 20);
  CHECK(a.trace.size() == 20);
  CHECK(std::is_sorted(a.trace.rbegin(), a.trace.rend()));  // non-increasing
  CHECK(a.best_fitness == b.best_fitness);
  REQUIRE(a.best_genotype.has_value());
  REQUIRE(b.best_genotype.has_value());
  CHECK(a.best_genotype->tree == b.best_genotype->tree);  // bitwise reproducible
  CHECK(a.evaluations == b.evaluations);
  CHECK(a.evaluations <= 30 + 20LL * 30 * (2 * 7 - 2));

  SUBCASE("empty budget is a configuration error") {
    GomeaConfig bad = cfg;
    bad.budget = {};
    CHECK_THROWS(run_gomea(bad, data, idx));
  }
  SUBCASE("tiny population is rejected") {
    GomeaConfig bad = cfg;
    bad.n_pop = 1;
    CHECK_THROWS(run_gomea(bad, data, idx));
  }
}

TEST_CASE("generation-1 biased similarity is exactly the identity") {
  Dataset data = toy_dataset(80, 3);
  Rng split_rng(11);
  SplitIndices idx = split(data, split_rng);

  GomeaConfig cfg;
  cfg.n_pop = 200;
  cfg.height = 2;
  cfg.fos = FosKind::LtBiasedMi;
  cfg.budget.generations = 1;
  cfg.seed = 5;

  SymbolSet sets = make_symbol_set(data, idx.train, false);
  TreeTemplate tpl(cfg.height, sets.arity());
  SplitData train = take_rows(data, idx.train);
  GomeaRunState state(cfg, tpl, sets, train.x, train.y);
  state.initialize();

  std::vector<double> sim = state.current_similarity();
  const int ell = tpl.size();
  for (int i = 0; i < ell; ++i)
    for (int j = 0; j < ell; ++j)
      CHECK(sim[static_cast<std::size_t>(i) * ell + j] == (i == j ? 1.0 : 0.0));

  // With zero linkage everywhere, the first linkage tree is the
  // deterministic all-tie merge order.
  Fos fos = build_linkage_tree(sim, ell);
  Fos ladder = build_linkage_tree(std::vector<double>(static_cast<std::size_t>(ell) * ell, 0.0),
                                  ell);
  CHECK(fos.subsets == ladder.subsets);
}

TEST_CASE("wall-clock budgets terminate and may restart converged runs") {
  Dataset data = toy_dataset(30, 17);
  Rng split_rng(9);
  SplitIndices idx = split(data, split_rng);

  GomeaConfig cfg;
  cfg.n_pop = 8;
  cfg.height = 1;
  cfg.fos = FosKind::RandomTree;
  cfg.budget.seconds = 0.2;
  cfg.seed = 23;

  RunResult r = run_gomea(cfg, data, idx);
  CHECK(r.generations >= 1);
  CHECK(r.seconds >= 0.2);
  CHECK(std::is_sorted(r.trace.rbegin(), r.trace.rend()));
  // Tiny populations over a tiny symbol space converge fast, so the run
  // should have gone through at least one restart in 200 ms.
  CHECK(r.restarts >= 1);
}

TEST_CASE("restart retains the all-time best") {
  Dataset data = toy_dataset(50, 13);
  Rng split_rng(5);
  SplitIndices idx = split(data, split_rng);

  GomeaConfig cfg;
  cfg.n_pop = 20;
  cfg.height = 2;
  cfg.fos = FosKind::LtBiasedMi;
  cfg.budget.generations = 50;
  cfg.seed = 3;

  SymbolSet sets = make_symbol_set(data, idx.train, false);
  TreeTemplate tpl(cfg.height, sets.arity());
  SplitData train = take_rows(data, idx.train);
  GomeaRunState state(cfg, tpl, sets, train.x, train.y);
  state.initialize();
  for (int i = 0; i < 5; ++i) state.step_generation();
  double best_before = state.best().fitness;
  GenotypeTree tree_before = state.best().tree;

  state.restart();
  CHECK(state.restarts() == 1);
  CHECK(state.best().fitness == best_before);
  CHECK(state.best().tree == tree_before);

  state.step_generation();
  CHECK(state.best().fitness <= best_before);
  CHECK(std::is_sorted(state.trace().rbegin(), state.trace().rend()));
}

TEST_CASE("overflowing predictions map to the worst-fitness sentinel") {
  TreeTemplate tpl(1, 2);
  SymbolSet sets = default_symbol_set(1);
  Matrix x(4, 1);
  for (int i = 0; i < 4; ++i) x.at(i, 0) = 1e300;
  std::vector<double> y{1, 2, 3, 4};
  TrainingEvaluator eval(tpl, sets, x, y);

  Solution s;
  s.tree.height = 1;
  s.tree.arity = 2;
  s.tree.symbols = {Symbol::function(OpMul), Symbol::feature(0), Symbol::feature(0)};
  eval.evaluate(s);
  CHECK(s.fitness == kWorstFitness);
  CHECK(!std::isnan(s.fitness));
}
