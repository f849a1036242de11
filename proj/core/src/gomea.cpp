#include "gpg/gomea.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <stdexcept>

namespace gpg {

SymbolSet make_symbol_set(const Dataset& data, const std::vector<int>& train_rows, bool use_erc) {
  std::optional<ErcDescriptor> erc;
  if (use_erc) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < data.num_features(); ++j) {
      const double* col = data.features.col(j);
      for (int r : train_rows) {
        lo = std::min(lo, col[r]);
        hi = std::max(hi, col[r]);
      }
    }
    erc = ErcDescriptor{lo, hi};
  }
  return default_symbol_set(data.num_features(), erc);
}

TrainingEvaluator::TrainingEvaluator(const TreeTemplate& tpl, const SymbolSet& sets,
                                     const Matrix& train_x, std::vector<double> train_y)
    : eval_(tpl), sets_(&sets), x_(&train_x), y_(std::move(train_y)) {
  moments_ = target_moments(y_);
  pred_.resize(x_->rows);
}

void TrainingEvaluator::evaluate(Solution& s) {
  eval_.evaluate(s.tree, *sets_, *x_, pred_);
  s.fitness = scaled_mse_fast(moments_, y_, pred_, &s.scale);
  ++count_;
}

namespace {

bool override_segment(Solution& offspring, const Solution& donor,
                      const std::vector<std::int32_t>& subset) {
  bool any_diff = false;
  for (std::int32_t pos : subset) {
    if (!(offspring.tree.symbols[pos] == donor.tree.symbols[pos])) {
      offspring.tree.symbols[pos] = donor.tree.symbols[pos];
      any_diff = true;
    }
  }
  return any_diff;
}

}  // namespace

Solution gom(const Solution& parent, const Population& pop, const Fos& fos,
             TrainingEvaluator& eval, const TreeTemplate& tpl, const SymbolSet& sets, Rng& rng,
             const GomObserver* observer) {
  if (!parent.evaluated()) throw std::invalid_argument("gom: parent must be evaluated");

  Solution offspring = parent;
  Solution backup = parent;

  std::vector<int> order(fos.size());
  std::iota(order.begin(), order.end(), 0);
  shuffle(rng, order);

  for (int idx : order) {
    if (fos.is_full_set(idx)) continue;  // replacing everything is not mixing
    const auto& subset = fos.subsets[idx];
    const Solution& donor = pop.members[uniform_index(rng, pop.members.size())];

    GomStepInfo info;
    info.fos_index = idx;
    info.offspring = &offspring;

    // Offspring and backup agree outside `subset`, so restoring or syncing
    // only those positions keeps them in lockstep.
    info.segment_differs = override_segment(offspring, donor, subset);
    if (info.segment_differs &&
        semantic_change_check(tpl, backup.tree, offspring.tree, sets)) {
      info.semantic_change = true;
      info.evaluated = true;
      eval.evaluate(offspring);
      if (offspring.fitness <= backup.fitness) {
        info.accepted = true;
        for (std::int32_t pos : subset) backup.tree.symbols[pos] = offspring.tree.symbols[pos];
        backup.fitness = offspring.fitness;
        backup.scale = offspring.scale;
      } else {
        for (std::int32_t pos : subset) offspring.tree.symbols[pos] = backup.tree.symbols[pos];
        offspring.fitness = backup.fitness;
        offspring.scale = backup.scale;
      }
    } else {
      // Intron-only (or empty) change: same behavior, keep without evaluating.
      for (std::int32_t pos : subset) backup.tree.symbols[pos] = offspring.tree.symbols[pos];
    }
    if (observer) (*observer)(info);
  }
  return offspring;
}

bool has_converged(const Population& pop) {
  for (int i = 1; i < pop.size(); ++i)
    if (!(pop.members[i].tree == pop.members[0].tree)) return false;
  return true;
}

GomeaRunState::GomeaRunState(const GomeaConfig& cfg, const TreeTemplate& tpl,
                             const SymbolSet& sets, const Matrix& train_x,
                             std::vector<double> train_y)
    : cfg_(cfg),
      tpl_(&tpl),
      sets_(&sets),
      eval_(tpl, sets, train_x, std::move(train_y)),
      rng_(cfg.seed),
      bins_(cfg.erc_bin_capacity) {
  if (cfg.n_pop < 2) throw std::invalid_argument("gomea: population size must be at least 2");
  if (cfg.height < 1) throw std::invalid_argument("gomea: tree height must be at least 1");
}

void GomeaRunState::initialize() {
  pop_.members.clear();
  pop_.members.reserve(cfg_.n_pop);
  for (int i = 0; i < cfg_.n_pop; ++i) {
    Solution s;
    s.tree = init_half_and_half(rng_, *tpl_, *sets_);
    eval_.evaluate(s);
    pop_.members.push_back(std::move(s));
  }
  for (const Solution& s : pop_.members)
    if (!best_.evaluated() || s.fitness < best_.fitness) best_ = s;

  if (cfg_.fos == FosKind::LtBiasedMi) {
    // The bias anchors to this freshly initialized population: with it the
    // biased MI between all location pairs is zero at this generation.
    bins_.clear();
    tree_scratch_.resize(pop_.members.size());
    for (int i = 0; i < pop_.size(); ++i) tree_scratch_[i] = pop_.members[i].tree;
    FrequencyModel model = count_frequencies(tree_scratch_, cfg_.erc_strategy, bins_, *tpl_);
    bias_ = capture_bias(model);
  }
}

Fos GomeaRunState::learn_fos() {
  if (cfg_.fos == FosKind::RandomTree) return build_random_tree(rng_, tpl_->size());
  return build_linkage_tree(current_similarity(), tpl_->size());
}

std::vector<double> GomeaRunState::current_similarity() {
  if (cfg_.fos == FosKind::RandomTree)
    throw std::invalid_argument("random-tree runs have no similarity matrix");
  if (!cfg_.persist_bins) bins_.clear();
  tree_scratch_.resize(pop_.members.size());
  for (int i = 0; i < pop_.size(); ++i) tree_scratch_[i] = pop_.members[i].tree;
  FrequencyModel model = count_frequencies(tree_scratch_, cfg_.erc_strategy, bins_, *tpl_);
  if (cfg_.fos == FosKind::LtBiasedMi) return similarity_matrix_biased_mi(model, bias_);
  return similarity_matrix_mi(model);
}

void GomeaRunState::step_generation() {
  Fos fos = learn_fos();
  Population offspring;
  offspring.members.reserve(pop_.size());
  for (int i = 0; i < pop_.size(); ++i)
    offspring.members.push_back(gom(pop_.members[i], pop_, fos, eval_, *tpl_, *sets_, rng_));
  pop_ = std::move(offspring);
  ++generations_;

  for (const Solution& s : pop_.members)
    if (s.fitness < best_.fitness) best_ = s;
  trace_.push_back(best_.fitness);
}

void GomeaRunState::restart() {
  ++restarts_;
  initialize();
}

RunResult run_gomea(const GomeaConfig& cfg, const Dataset& data, const SplitIndices& split) {
  if (cfg.budget.empty()) throw std::invalid_argument("gomea: budget must not be empty");

  SymbolSet sets = make_symbol_set(data, split.train, cfg.use_erc);
  TreeTemplate tpl(cfg.height, sets.arity());
  SplitData train = take_rows(data, split.train);

  auto started = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  };

  GomeaRunState state(cfg, tpl, sets, train.x, std::move(train.y));
  state.initialize();

  for (;;) {
    if (cfg.budget.generations && state.generations() >= *cfg.budget.generations) break;
    if (cfg.budget.seconds && elapsed() >= *cfg.budget.seconds) break;
    // Without mutation a converged population cannot move; under a
    // wall-clock budget the run restarts from scratch instead of idling.
    if (cfg.budget.seconds && state.converged()) state.restart();
    state.step_generation();
  }

  RunResult result;
  result.best_genotype = state.best();
  result.best_expr = extract_expr(tpl, state.best().tree, sets);
  result.best_fitness = state.best().fitness;
  result.best_scale = state.best().scale;
  result.trace = state.trace();
  result.evaluations = state.evaluations();
  result.generations = state.generations();
  result.restarts = state.restarts();
  result.seconds = elapsed();
  return result;
}

}  // namespace gpg
