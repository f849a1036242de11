#include "gpg/gptrad.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace gpg {

bool SizeLimit::ok(const ExprNode& tree) const {
  if (kind == SizeLimitKind::Height) return expr_height(tree) <= height;
  return expr_node_count(tree) <= max_nodes;
}

namespace {

Symbol draw_terminal(Rng& rng, const SymbolSet& sets) {
  std::size_t options = static_cast<std::size_t>(sets.num_features) + (sets.erc ? 1 : 0);
  std::size_t pick = uniform_index(rng, options);
  if (sets.erc && pick == static_cast<std::size_t>(sets.num_features))
    return Symbol::constant(uniform_real(rng, sets.erc->lo, sets.erc->hi));
  return Symbol::feature(static_cast<std::uint16_t>(pick));
}

ExprNode build_tree(Rng& rng, int depth_left, bool full, const SymbolSet& sets) {
  bool make_function = depth_left > 0 && (full || coin(rng));
  if (!make_function) return ExprNode::terminal(draw_terminal(rng, sets));
  const FunctionDef& f = sets.functions[uniform_index(rng, sets.functions.size())];
  ExprNode node{Symbol::function(f.op), {}};
  node.children.reserve(f.arity);
  for (int k = 0; k < f.arity; ++k)
    node.children.push_back(build_tree(rng, depth_left - 1, full, sets));
  return node;
}

// Pre-order node access over a value-semantic tree.
ExprNode* node_at(ExprNode& root, int index) {
  int seen = 0;
  ExprNode* found = nullptr;
  auto walk = [&](auto&& self, ExprNode& node) -> void {
    if (found) return;
    if (seen++ == index) {
      found = &node;
      return;
    }
    for (auto& c : node.children) self(self, c);
  };
  walk(walk, root);
  return found;
}

const ExprNode* node_at(const ExprNode& root, int index) {
  return node_at(const_cast<ExprNode&>(root), index);
}

int node_depth(const ExprNode& root, int index) {
  int seen = 0;
  int found = -1;
  auto walk = [&](auto&& self, const ExprNode& node, int d) -> void {
    if (found >= 0) return;
    if (seen++ == index) {
      found = d;
      return;
    }
    for (const auto& c : node.children) self(self, c, d + 1);
  };
  walk(walk, root, 0);
  return found;
}

}  // namespace

ExprNode init_ramped_half_and_half(Rng& rng, int h_max, const SymbolSet& sets) {
  if (h_max < 2) throw std::invalid_argument("ramped half-and-half: h_max >= 2 required");
  int depth = 2 + static_cast<int>(uniform_index(rng, static_cast<std::size_t>(h_max - 1)));
  bool full = coin(rng);
  // Grow draws are resampled until they reach the drawn height, so ramped
  // trees have height exactly in [2, h_max]; Full satisfies it directly.
  for (int tries = 0; tries < 100; ++tries) {
    ExprNode t = build_tree(rng, depth, full, sets);
    if (expr_height(t) == depth) return t;
  }
  return build_tree(rng, depth, /*full=*/true, sets);
}

ExprNode grow_tree(Rng& rng, int max_height, const SymbolSet& sets) {
  return build_tree(rng, max_height, /*full=*/false, sets);
}

int tournament_select(const std::vector<TradSolution>& pop, int k, Rng& rng) {
  if (pop.empty()) throw std::invalid_argument("tournament_select: empty population");
  if (k < 1) throw std::invalid_argument("tournament_select: k >= 1 required");
  int best = static_cast<int>(uniform_index(rng, pop.size()));
  for (int i = 1; i < k; ++i) {
    int challenger = static_cast<int>(uniform_index(rng, pop.size()));
    if (pop[challenger].fitness < pop[best].fitness) best = challenger;
  }
  return best;
}

ExprNode subtree_crossover(const ExprNode& a, const ExprNode& b, Rng& rng,
                           const SizeLimit& limit) {
  ExprNode offspring = a;
  int target = static_cast<int>(uniform_index(rng, expr_node_count(a)));
  int source = static_cast<int>(uniform_index(rng, expr_node_count(b)));
  *node_at(offspring, target) = *node_at(b, source);
  if (!limit.ok(offspring)) return a;
  return offspring;
}

ExprNode subtree_mutation(const ExprNode& a, Rng& rng, const SizeLimit& limit,
                          const SymbolSet& sets) {
  ExprNode offspring = a;
  int target = static_cast<int>(uniform_index(rng, expr_node_count(a)));
  ExprNode* node = node_at(offspring, target);

  int cap;
  if (limit.kind == SizeLimitKind::Height) {
    cap = limit.height - node_depth(a, target);
  } else {
    // Smallest possible subtree of height d has 2d+1 nodes (binary
    // functions); cap so that at least that much fits in the budget.
    int budget = limit.max_nodes - (expr_node_count(a) - expr_node_count(*node));
    cap = std::max(0, (budget - 1) / 2);
  }
  *node = grow_tree(rng, cap, sets);
  if (!limit.ok(offspring)) return a;
  return offspring;
}

ExprTrainingEvaluator::ExprTrainingEvaluator(const Matrix& train_x, std::vector<double> train_y)
    : x_(&train_x), y_(std::move(train_y)) {
  moments_ = target_moments(y_);
  pred_.resize(x_->rows);
}

void ExprTrainingEvaluator::evaluate(TradSolution& s) {
  eval_.evaluate(s.tree, *x_, pred_);
  s.fitness = scaled_mse_fast(moments_, y_, pred_, &s.scale);
  ++count_;
}

TradRunState::TradRunState(const TradConfig& cfg, const SymbolSet& sets, const Matrix& train_x,
                           std::vector<double> train_y)
    : cfg_(cfg), sets_(&sets), eval_(train_x, std::move(train_y)), rng_(cfg.seed) {
  if (cfg.n_pop < 2) throw std::invalid_argument("gptrad: population size must be at least 2");
  if (std::abs(cfg.crossover_rate + cfg.mutation_rate - 1.0) > 1e-12)
    throw std::invalid_argument("gptrad: crossover and mutation rates must sum to 1");
  if (cfg.tournament_size < 1) throw std::invalid_argument("gptrad: tournament size >= 1");
}

void TradRunState::initialize() {
  pop_.clear();
  pop_.reserve(cfg_.n_pop);
  for (int i = 0; i < cfg_.n_pop; ++i) {
    TradSolution s;
    s.tree = init_ramped_half_and_half(rng_, cfg_.limit.height, *sets_);
    if (!cfg_.limit.ok(s.tree)) s.tree = ExprNode::terminal(draw_terminal(rng_, *sets_));
    eval_.evaluate(s);
    pop_.push_back(std::move(s));
  }
  for (const TradSolution& s : pop_)
    if (!best_.evaluated() || s.fitness < best_.fitness) best_ = s;
}

void TradRunState::step_generation() {
  std::vector<TradSolution> next;
  next.reserve(cfg_.n_pop);

  // Elitism: the best solution is cloned, not re-evaluated.
  int elite = 0;
  for (int i = 1; i < static_cast<int>(pop_.size()); ++i)
    if (pop_[i].fitness < pop_[elite].fitness) elite = i;
  next.push_back(pop_[elite]);

  while (static_cast<int>(next.size()) < cfg_.n_pop) {
    TradSolution child;
    if (coin(rng_, cfg_.crossover_rate)) {
      const TradSolution& pa = pop_[tournament_select(pop_, cfg_.tournament_size, rng_)];
      const TradSolution& pb = pop_[tournament_select(pop_, cfg_.tournament_size, rng_)];
      child.tree = subtree_crossover(pa.tree, pb.tree, rng_, cfg_.limit);
    } else {
      const TradSolution& pa = pop_[tournament_select(pop_, cfg_.tournament_size, rng_)];
      child.tree = subtree_mutation(pa.tree, rng_, cfg_.limit, *sets_);
    }
    eval_.evaluate(child);
    next.push_back(std::move(child));
  }
  pop_ = std::move(next);
  ++generations_;

  for (const TradSolution& s : pop_)
    if (s.fitness < best_.fitness) best_ = s;
  trace_.push_back(best_.fitness);
}

bool TradRunState::converged() const {
  for (std::size_t i = 1; i < pop_.size(); ++i)
    if (!expr_equal(pop_[i].tree, pop_[0].tree)) return false;
  return true;
}

RunResult run_gptrad(const TradConfig& cfg, const Dataset& data, const SplitIndices& split) {
  if (cfg.budget.empty()) throw std::invalid_argument("gptrad: budget must not be empty");

  SymbolSet sets = make_symbol_set(data, split.train, cfg.use_erc);
  SplitData train = take_rows(data, split.train);

  auto started = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  };

  TradRunState state(cfg, sets, train.x, std::move(train.y));
  state.initialize();

  for (;;) {
    if (cfg.budget.generations && state.generations() >= *cfg.budget.generations) break;
    if (cfg.budget.seconds && elapsed() >= *cfg.budget.seconds) break;
    state.step_generation();
  }

  RunResult result;
  result.best_expr = state.best().tree;
  result.best_fitness = state.best().fitness;
  result.best_scale = state.best().scale;
  result.trace = state.trace();
  result.evaluations = state.evaluations();
  result.generations = state.generations();
  result.seconds = elapsed();
  return result;
}

}  // namespace gpg
