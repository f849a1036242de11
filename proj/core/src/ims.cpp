#include "gpg/ims.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>

namespace gpg {

namespace {

double now_seconds() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

}  // namespace

ImsScheduler::ImsScheduler(ImsConfig cfg, ImsRunFactory factory)
    : cfg_(cfg), factory_(std::move(factory)) {
  if (cfg_.n_base < 2) throw std::invalid_argument("ims: n_base >= 2 required");
  if (cfg_.cadence < 1) throw std::invalid_argument("ims: cadence g >= 1 required");
  if (cfg_.global.empty()) throw std::invalid_argument("ims: global budget must not be empty");
}

int ImsScheduler::leader() const {
  for (const RunSlot& s : slots_)
    if (s.status == RunSlot::Status::Active) return s.index;
  return 0;
}

int ImsScheduler::next_alive_after(int index) const {
  for (const RunSlot& s : slots_)
    if (s.index > index && s.status == RunSlot::Status::Active) return s.index;
  return 0;
}

void ImsScheduler::start_run(int index) {
  if (index > 30) throw std::runtime_error("ims: run index too large, population would overflow");
  RunSlot slot;
  slot.index = index;
  slot.population_size = cfg_.n_base << (index - 1);
  slot.run = factory_(index, slot.population_size, derive_seed(cfg_.master_seed, index));
  slots_.push_back(std::move(slot));
}

ImsScheduler::StepResult ImsScheduler::schedule_step() {
  int target = cursor_;
  if (target != 0 && target <= static_cast<int>(slots_.size()) &&
      slot(target).status == RunSlot::Status::Terminated)
    target = 0;
  if (target == 0) {
    target = leader();
    if (target == 0) target = static_cast<int>(slots_.size()) + 1;  // fresh frontier run
  }
  if (target > static_cast<int>(slots_.size())) start_run(target);

  RunSlot& s = slot(target);
  s.run->step_generation();
  ++total_generations_;
  StepResult result{target, s.run->generations()};

  check_termination(target);

  // Descend to the next run once this one completed a cadence block (the
  // trigger stands even if the block's run was just terminated); otherwise
  // the earliest alive run takes the next step.
  if (s.run->generations() % cfg_.cadence == 0) {
    int next = next_alive_after(target);
    cursor_ = next != 0 ? next : static_cast<int>(slots_.size()) + 1;
  } else {
    cursor_ = 0;
  }
  return result;
}

std::vector<int> ImsScheduler::check_termination(int /*just_finished*/) {
  // Decide against a snapshot of the alive set, then apply all at once.
  std::vector<int> doomed;
  for (const RunSlot& si : slots_) {
    if (si.status != RunSlot::Status::Active) continue;
    bool dies = si.run->converged();
    if (!dies) {
      for (const RunSlot& sj : slots_) {
        if (sj.status != RunSlot::Status::Active || sj.index <= si.index) continue;
        if (sj.run->generations() > 0 && sj.run->best_fitness() < si.run->best_fitness()) {
          dies = true;
          break;
        }
      }
    }
    if (dies) doomed.push_back(si.index);
  }
  for (int index : doomed) {
    RunSlot& s = slot(index);
    archive_.push_back({s.run->best_expr(), index, s.run->best_fitness()});
    s.status = RunSlot::Status::Terminated;
  }
  return doomed;
}

bool ImsScheduler::budget_exhausted() const {
  if (cfg_.global.generations && total_generations_ >= *cfg_.global.generations) return true;
  if (cfg_.global.seconds && started_seconds_ >= 0.0 &&
      now_seconds() - started_seconds_ >= *cfg_.global.seconds)
    return true;
  return false;
}

void ImsScheduler::run_to_budget() {
  if (started_seconds_ < 0.0) started_seconds_ = now_seconds();
  while (!budget_exhausted()) schedule_step();
}

std::int64_t ImsScheduler::total_evaluations() const {
  std::int64_t total = 0;
  for (const RunSlot& s : slots_) total += s.run->evaluations();
  return total;
}

ImsScheduler::FinalSelection ImsScheduler::finalize(const Matrix& val_x,
                                                    std::span<const double> val_y) {
  if (!survivors_archived_) {
    for (RunSlot& s : slots_) {
      if (s.status != RunSlot::Status::Active || s.run->generations() == 0) continue;
      archive_.push_back({s.run->best_expr(), s.index, s.run->best_fitness()});
    }
    survivors_archived_ = true;
  }
  if (archive_.empty()) throw std::runtime_error("ims: empty archive, no generation executed");

  ExprEvaluator eval;
  std::vector<double> pred(val_x.rows);
  FinalSelection pick;
  bool have = false;
  for (const ArchiveEntry& entry : archive_) {
    eval.evaluate(entry.expr, val_x, pred);
    double fit = scaled_mse(val_y, pred);
    if (!have || fit < pick.validation_fitness) {
      have = true;
      pick = {entry.expr, entry.run_index, fit, entry.train_fitness};
    }
  }
  return pick;
}

namespace {

class GomeaImsRun : public ImsRun {
 public:
  GomeaImsRun(const GomeaConfig& cfg, const TreeTemplate& tpl, const SymbolSet& sets,
              const Matrix& x, const std::vector<double>& y)
      : state_(cfg, tpl, sets, x, y), tpl_(&tpl), sets_(&sets) {}

  void step_generation() override {
    if (!initialized_) {
      state_.initialize();
      initialized_ = true;
    }
    state_.step_generation();
  }
  int generations() const override { return state_.generations(); }
  double best_fitness() const override { return state_.best().fitness; }
  ExprNode best_expr() const override {
    return extract_expr(*tpl_, state_.best().tree, *sets_);
  }
  bool converged() const override { return initialized_ && state_.converged(); }
  std::int64_t evaluations() const override { return state_.evaluations(); }

 private:
  GomeaRunState state_;
  const TreeTemplate* tpl_;
  const SymbolSet* sets_;
  bool initialized_ = false;
};

class TradImsRun : public ImsRun {
 public:
  TradImsRun(const TradConfig& cfg, const SymbolSet& sets, const Matrix& x,
             const std::vector<double>& y)
      : state_(cfg, sets, x, y) {}

  void step_generation() override {
    if (!initialized_) {
      state_.initialize();
      initialized_ = true;
    }
    state_.step_generation();
  }
  int generations() const override { return state_.generations(); }
  double best_fitness() const override { return state_.best().fitness; }
  ExprNode best_expr() const override { return state_.best().tree; }
  bool converged() const override { return initialized_ && state_.converged(); }
  std::int64_t evaluations() const override { return state_.evaluations(); }

 private:
  TradRunState state_;
  bool initialized_ = false;
};

template <typename MakeRun>
ImsResult drive_ims(const ImsConfig& ims, const Dataset& data, const SplitIndices& split,
                    MakeRun make_run) {
  SplitData validation = take_rows(data, split.validation);

  auto started = std::chrono::steady_clock::now();
  ImsScheduler scheduler(ims, make_run);
  scheduler.run_to_budget();
  auto selection = scheduler.finalize(validation.x, validation.y);

  ImsResult result;
  result.best_expr = selection.expr;
  result.validation_fitness = selection.validation_fitness;
  result.train_fitness = selection.train_fitness;
  result.origin_run = selection.run_index;
  result.evaluations = scheduler.total_evaluations();
  result.generations = scheduler.total_generations();
  result.runs_started = static_cast<int>(scheduler.slots().size());
  result.archive_size = static_cast<int>(scheduler.archive().size());
  result.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

}  // namespace

ImsResult run_ims_gomea(const GomeaConfig& base, const ImsConfig& ims, const Dataset& data,
                        const SplitIndices& split) {
  SymbolSet sets = make_symbol_set(data, split.train, base.use_erc);
  TreeTemplate tpl(base.height, sets.arity());
  SplitData train = take_rows(data, split.train);

  auto factory = [&](int, int n_pop, std::uint64_t seed) -> std::unique_ptr<ImsRun> {
    GomeaConfig cfg = base;
    cfg.n_pop = n_pop;
    cfg.seed = seed;
    return std::make_unique<GomeaImsRun>(cfg, tpl, sets, train.x, train.y);
  };
  return drive_ims(ims, data, split, factory);
}

ImsResult run_ims_gptrad(const TradConfig& base, const ImsConfig& ims, const Dataset& data,
                         const SplitIndices& split) {
  SymbolSet sets = make_symbol_set(data, split.train, base.use_erc);
  SplitData train = take_rows(data, split.train);

  auto factory = [&](int, int n_pop, std::uint64_t seed) -> std::unique_ptr<ImsRun> {
    TradConfig cfg = base;
    cfg.n_pop = n_pop;
    cfg.seed = seed;
    return std::make_unique<TradImsRun>(cfg, sets, train.x, train.y);
  };
  return drive_ims(ims, data, split, factory);
}

}  // namespace gpg
