#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "gpg/dataset.hpp"
#include "gpg/eval.hpp"
#include "gpg/fitness.hpp"
#include "gpg/fos.hpp"
#include "gpg/genotype.hpp"
#include "gpg/linkage.hpp"
#include "gpg/rng.hpp"

namespace gpg {

struct Budget {
  std::optional<int> generations;
  std::optional<double> seconds;

  bool empty() const { return !generations && !seconds; }
};

enum class FosKind { LtBiasedMi, LtMi, RandomTree };

struct GomeaConfig {
  int n_pop = 2000;
  int height = 4;
  FosKind fos = FosKind::LtBiasedMi;
  bool use_erc = false;  // whether the terminal set includes the ERC
  ErcStrategy erc_strategy = ErcStrategy::BinConst;
  int erc_bin_capacity = 100;
  bool persist_bins = false;  // keep the ERC bin table across generations
  Budget budget;
  std::uint64_t seed = 0;
};

// Terminal set over the dataset's features; ERC bounds, when enabled, are
// the global [min, max] over the training rows of the feature matrix.
SymbolSet make_symbol_set(const Dataset& data, const std::vector<int>& train_rows, bool use_erc);

struct Solution {
  GenotypeTree tree;
  double fitness = std::numeric_limits<double>::quiet_NaN();  // NaN = unevaluated
  LinearScale scale;

  bool evaluated() const { return !std::isnan(fitness); }
};

struct Population {
  std::vector<Solution> members;

  int size() const { return static_cast<int>(members.size()); }
};

// Computes training fitness (linearly scaled MSE) for template genotypes.
// Owns the evaluation scratch space; one instance per thread.
class TrainingEvaluator {
 public:
  TrainingEvaluator(const TreeTemplate& tpl, const SymbolSet& sets, const Matrix& train_x,
                    std::vector<double> train_y);

  void evaluate(Solution& s);
  std::int64_t evaluations() const { return count_; }

  const Matrix& features() const { return *x_; }
  const std::vector<double>& targets() const { return y_; }

 private:
  Evaluator eval_;
  const SymbolSet* sets_;
  const Matrix* x_;
  std::vector<double> y_;
  TargetMoments moments_;
  std::vector<double> pred_;
  std::int64_t count_ = 0;
};

// Per-step trace of GOM, used by tests to audit accept/revert behavior.
struct GomStepInfo {
  int fos_index = -1;
  bool segment_differs = false;  // donor segment differed from recipient
  bool semantic_change = false;
  bool evaluated = false;
  bool accepted = false;
  const Solution* offspring = nullptr;
};
using GomObserver = std::function<void(const GomStepInfo&)>;

// Gene-pool optimal mixing: overrides FOS-subset positions with donor
// symbols, keeps non-worsening changes, reverts the rest. The full
// location set is skipped. Donors come from `pop` uniformly at random.
Solution gom(const Solution& parent, const Population& pop, const Fos& fos,
             TrainingEvaluator& eval, const TreeTemplate& tpl, const SymbolSet& sets, Rng& rng,
             const GomObserver* observer = nullptr);

// True iff all genotypes are pairwise identical, introns included.
bool has_converged(const Population& pop);

// Outcome shape shared by the GOMEA and traditional-GP runners: the best
// solution is exported as an expression tree (for GOMEA, the active part
// of the winning genotype).
struct RunResult {
  ExprNode best_expr;
  double best_fitness = kWorstFitness;
  LinearScale best_scale;
  std::vector<double> trace;  // best training fitness after each generation
  std::int64_t evaluations = 0;
  double seconds = 0.0;
  int generations = 0;
  int restarts = 0;
  std::optional<Solution> best_genotype;  // template-tree runs only
};

// One GOMEA run as an explicit state machine, so the interleaved scheme
// and the matrix-dump tool can drive generations one at a time.
class GomeaRunState {
 public:
  GomeaRunState(const GomeaConfig& cfg, const TreeTemplate& tpl, const SymbolSet& sets,
                const Matrix& train_x, std::vector<double> train_y);

  void initialize();       // fresh population, evaluation, bias capture
  void step_generation();  // learn FOS, apply GOM to every member, replace

  const Population& population() const { return pop_; }
  const Solution& best() const { return best_; }  // all-time best, survives restarts
  bool converged() const { return has_converged(pop_); }
  int generations() const { return generations_; }
  std::int64_t evaluations() const { return eval_.evaluations(); }
  const std::vector<double>& trace() const { return trace_; }
  int restarts() const { return restarts_; }

  // Re-initializes the population (new random draws, bias recaptured); the
  // all-time best is retained.
  void restart();

  // Similarity matrix over the current population per the configured FOS
  // kind; only defined for the linkage-tree kinds.
  std::vector<double> current_similarity();

  const BiasCoefficients& bias() const { return bias_; }
  const TreeTemplate& tpl() const { return *tpl_; }
  const SymbolSet& symbol_set() const { return *sets_; }

 private:
  Fos learn_fos();

  GomeaConfig cfg_;
  const TreeTemplate* tpl_;
  const SymbolSet* sets_;
  TrainingEvaluator eval_;
  Rng rng_;
  Population pop_;
  Solution best_;
  BiasCoefficients bias_;
  ErcBinTable bins_;
  std::vector<GenotypeTree> tree_scratch_;
  std::vector<double> trace_;
  int generations_ = 0;
  int restarts_ = 0;
};

// Full run: initialization, generational loop under the configured budget,
// restarts on convergence under wall-clock budgets.
RunResult run_gomea(const GomeaConfig& cfg, const Dataset& data, const SplitIndices& split);

}  // namespace gpg
