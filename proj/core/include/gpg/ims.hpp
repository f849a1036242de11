#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "gpg/dataset.hpp"
#include "gpg/eval.hpp"
#include "gpg/gomea.hpp"
#include "gpg/gptrad.hpp"

namespace gpg {

// One evolutionary run as seen by the interleaved multistart scheme.
class ImsRun {
 public:
  virtual ~ImsRun() = default;
  virtual void step_generation() = 0;  // first call initializes the population
  virtual int generations() const = 0;
  virtual double best_fitness() const = 0;  // best-so-far training fitness
  virtual ExprNode best_expr() const = 0;
  virtual bool converged() const = 0;
  virtual std::int64_t evaluations() const = 0;
};

using ImsRunFactory =
    std::function<std::unique_ptr<ImsRun>(int run_index, int n_pop, std::uint64_t seed)>;

struct ImsConfig {
  int n_base = 500;  // population size of the first run
  int cadence = 4;   // generations of R_i per generation of R_{i+1}
  Budget global;     // total generations across runs, or wall-clock seconds
  std::uint64_t master_seed = 0;
};

struct RunSlot {
  enum class Status { Active, Terminated };

  int index = 0;            // 1-based
  int population_size = 0;  // 2^{i-1} * n_base
  Status status = Status::Active;
  std::unique_ptr<ImsRun> run;
};

struct ArchiveEntry {
  ExprNode expr;
  int run_index = 0;
  double train_fitness = kWorstFitness;
};

// Sequential interleaving of runs with doubling population sizes. Run
// R_{i+1} executes its k-th generation once its nearest alive predecessor
// has executed cadence*k generations; the earliest alive run cycles freely.
class ImsScheduler {
 public:
  ImsScheduler(ImsConfig cfg, ImsRunFactory factory);

  struct StepResult {
    int run_index = 0;
    int generation = 0;  // the run's generation counter after the step
  };

  // Advances exactly one generation of exactly one run, then applies the
  // termination rules. Run starts allocate population 2^{i-1} * n_base.
  StepResult schedule_step();

  // Terminates every alive run that is strictly beaten by a later alive
  // run, and every converged run. Returns the indices terminated, after
  // their bests have been archived. Never cascades to earlier runs.
  std::vector<int> check_termination(int just_finished);

  // Runs schedule_step until the global budget is exhausted.
  void run_to_budget();

  struct FinalSelection {
    ExprNode expr;
    int run_index = 0;
    double validation_fitness = kWorstFitness;
    double train_fitness = kWorstFitness;
  };

  // Appends surviving runs' bests to the archive, re-evaluates every entry
  // on the validation split, returns the entry with minimal validation
  // fitness (ties: earliest entry). Throws if the archive is empty.
  FinalSelection finalize(const Matrix& val_x, std::span<const double> val_y);

  const std::vector<RunSlot>& slots() const { return slots_; }
  const std::vector<ArchiveEntry>& archive() const { return archive_; }
  std::int64_t total_generations() const { return total_generations_; }
  std::int64_t total_evaluations() const;
  bool budget_exhausted() const;

 private:
  RunSlot& slot(int index) { return slots_[index - 1]; }
  int leader() const;       // lowest alive run index, 0 if none
  int next_alive_after(int index) const;
  void start_run(int index);

  ImsConfig cfg_;
  ImsRunFactory factory_;
  std::vector<RunSlot> slots_;
  std::vector<ArchiveEntry> archive_;
  int cursor_ = 0;  // run to execute next; 0 = leader
  std::int64_t total_generations_ = 0;
  double started_seconds_ = -1.0;
  bool survivors_archived_ = false;
};

// Convenience drivers wiring a base configuration to the scheme.
struct ImsResult {
  ExprNode best_expr;
  double validation_fitness = kWorstFitness;
  double train_fitness = kWorstFitness;
  int origin_run = 0;
  std::int64_t evaluations = 0;
  std::int64_t generations = 0;
  double seconds = 0.0;
  int runs_started = 0;
  int archive_size = 0;
};

ImsResult run_ims_gomea(const GomeaConfig& base, const ImsConfig& ims, const Dataset& data,
                        const SplitIndices& split);
ImsResult run_ims_gptrad(const TradConfig& base, const ImsConfig& ims, const Dataset& data,
                         const SplitIndices& split);

}  // namespace gpg
