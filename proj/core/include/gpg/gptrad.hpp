#pragma once

#include <cstdint>
#include <vector>

#include "gpg/dataset.hpp"
#include "gpg/eval.hpp"
#include "gpg/fitness.hpp"
#include "gpg/gomea.hpp"
#include "gpg/rng.hpp"
#include "gpg/symbol.hpp"

namespace gpg {

// Traditional tree-based GP baseline. Trees have no template padding;
// solution size is bounded either by height (GP-Trad^h) or by node count
// (GP-Trad^l, with the node budget of a full r-ary tree of the same height).
enum class SizeLimitKind { Height, NodeCount };

struct SizeLimit {
  SizeLimitKind kind = SizeLimitKind::Height;
  int height = 4;     // bound and ramp top for the height variant
  int max_nodes = 0;  // bound for the node-count variant

  bool ok(const ExprNode& tree) const;
};

struct TradConfig {
  int n_pop = 1000;
  SizeLimit limit;
  double crossover_rate = 0.9;
  double mutation_rate = 0.1;
  int tournament_size = 7;
  bool use_erc = false;
  Budget budget;
  std::uint64_t seed = 0;
};

struct TradSolution {
  ExprNode tree;
  double fitness = std::numeric_limits<double>::quiet_NaN();
  LinearScale scale;

  bool evaluated() const { return !std::isnan(fitness); }
};

// Ramped Half-and-Half: target depth uniform in [2, h_max], Full or Grow
// with probability 0.5 each.
ExprNode init_ramped_half_and_half(Rng& rng, int h_max, const SymbolSet& sets);

// Grow-style random subtree of height at most `max_height`.
ExprNode grow_tree(Rng& rng, int max_height, const SymbolSet& sets);

// Index of the best of k uniform picks (with replacement); ties go to the
// earliest sampled.
int tournament_select(const std::vector<TradSolution>& pop, int k, Rng& rng);

// Uniform node in each parent; b's subtree replaces a's node. Offspring
// violating the limit are discarded in favor of a copy of a.
ExprNode subtree_crossover(const ExprNode& a, const ExprNode& b, Rng& rng, const SizeLimit& limit);

// Uniform node replaced by a Grow subtree whose depth cap respects the
// limit where possible; same fallback as crossover.
ExprNode subtree_mutation(const ExprNode& a, Rng& rng, const SizeLimit& limit,
                          const SymbolSet& sets);

// Evaluates expression trees against the training split.
class ExprTrainingEvaluator {
 public:
  ExprTrainingEvaluator(const Matrix& train_x, std::vector<double> train_y);

  void evaluate(TradSolution& s);
  std::int64_t evaluations() const { return count_; }

 private:
  ExprEvaluator eval_;
  const Matrix* x_;
  std::vector<double> y_;
  TargetMoments moments_;
  std::vector<double> pred_;
  std::int64_t count_ = 0;
};

// Stepwise state for one GP-Trad run (generational loop with elitism).
class TradRunState {
 public:
  TradRunState(const TradConfig& cfg, const SymbolSet& sets, const Matrix& train_x,
               std::vector<double> train_y);

  void initialize();
  void step_generation();

  const std::vector<TradSolution>& population() const { return pop_; }
  const TradSolution& best() const { return best_; }
  bool converged() const;
  int generations() const { return generations_; }
  std::int64_t evaluations() const { return eval_.evaluations(); }
  const std::vector<double>& trace() const { return trace_; }

 private:
  TradConfig cfg_;
  const SymbolSet* sets_;
  ExprTrainingEvaluator eval_;
  Rng rng_;
  std::vector<TradSolution> pop_;
  TradSolution best_;
  std::vector<double> trace_;
  int generations_ = 0;
};

RunResult run_gptrad(const TradConfig& cfg, const Dataset& data, const SplitIndices& split);

}  // namespace gpg
