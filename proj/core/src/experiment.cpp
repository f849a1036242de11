#include "gpg/experiment.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "gpg/tree_template.hpp"

namespace gpg {

std::string algorithm_name(AlgorithmId id) {
  switch (id) {
    case AlgorithmId::GomeaLtBiasedMi: return "gomea-lt-mib";
    case AlgorithmId::GomeaLtMi: return "gomea-lt-mi";
    case AlgorithmId::GomeaRt: return "gomea-rt";
    case AlgorithmId::GpTradH: return "gptrad-h";
    case AlgorithmId::GpTradL: return "gptrad-l";
  }
  throw std::invalid_argument("unknown algorithm id");
}

AlgorithmId parse_algorithm(const std::string& name) {
  if (name == "gomea-lt-mib") return AlgorithmId::GomeaLtBiasedMi;
  if (name == "gomea-lt-mi") return AlgorithmId::GomeaLtMi;
  if (name == "gomea-rt") return AlgorithmId::GomeaRt;
  if (name == "gptrad-h") return AlgorithmId::GpTradH;
  if (name == "gptrad-l") return AlgorithmId::GpTradL;
  throw std::invalid_argument(
      "algo: expected one of gomea-lt-mib, gomea-lt-mi, gomea-rt, gptrad-h, gptrad-l, got '" +
      name + "'");
}

bool is_gomea(AlgorithmId id) {
  return id == AlgorithmId::GomeaLtBiasedMi || id == AlgorithmId::GomeaLtMi ||
         id == AlgorithmId::GomeaRt;
}

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

int parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    int v = std::stoi(value, &used);
    if (used != value.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument(key + ": expected an integer, got '" + value + "'");
  }
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument(key + ": expected a number, got '" + value + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw std::invalid_argument(key + ": expected true/false, got '" + value + "'");
}

}  // namespace

void apply_config_entry(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "dataset") cfg.dataset_path = value;
  else if (key == "algo") cfg.algorithm = parse_algorithm(value);
  else if (key == "erc") {
    if (value != "none" && value != "all" && value != "no" && value != "bin")
      throw std::invalid_argument("erc: expected none/all/no/bin, got '" + value + "'");
    cfg.erc = value;
  } else if (key == "h" || key == "height") cfg.height = parse_int(key, value);
  else if (key == "npop") cfg.n_pop = parse_int(key, value);
  else if (key == "ims_g") cfg.ims_g = parse_int(key, value);
  else if (key == "ims_nbase") cfg.ims_n_base = parse_int(key, value);
  else if (key == "generations") cfg.budget.generations = parse_int(key, value);
  else if (key == "seconds") cfg.budget.seconds = parse_double(key, value);
  else if (key == "repetitions") cfg.repetitions = parse_int(key, value);
  else if (key == "seed") cfg.master_seed = static_cast<std::uint64_t>(std::stoull(value));
  else if (key == "out") cfg.output_path = value;
  else if (key == "jobs") cfg.jobs = parse_int(key, value);
  else if (key == "gamma") cfg.erc_bin_capacity = parse_int(key, value);
  else if (key == "persist_bins") cfg.persist_bins = parse_bool(key, value);
  else throw std::invalid_argument("unknown configuration key '" + key + "'");
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  ExperimentConfig cfg;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected key = value");
    apply_config_entry(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

void validate_config(const ExperimentConfig& cfg) {
  if (cfg.dataset_path.empty()) throw std::invalid_argument("dataset: path is required");
  bool has_ims = cfg.ims_g.has_value() || cfg.ims_n_base.has_value();
  if (has_ims && (!cfg.ims_g || !cfg.ims_n_base))
    throw std::invalid_argument("ims_g/ims_nbase: both fields are required for an IMS block");
  if (cfg.n_pop && has_ims)
    throw std::invalid_argument("npop: a fixed population size and an IMS block are exclusive");
  if (!cfg.n_pop && !has_ims)
    throw std::invalid_argument("npop: either a fixed population size or an IMS block is required");
  if (cfg.budget.empty())
    throw std::invalid_argument("generations/seconds: a budget is required");
  if (cfg.repetitions < 1) throw std::invalid_argument("repetitions: must be at least 1");
  if (cfg.height < 1) throw std::invalid_argument("h: must be at least 1");
  if (cfg.jobs < 1) throw std::invalid_argument("jobs: must be at least 1");
  if (!is_gomea(cfg.algorithm) && cfg.height < 2)
    throw std::invalid_argument("h: gptrad needs h >= 2 for ramped initialization");
}

std::uint64_t split_seed_for(std::uint64_t master, int repetition) {
  return derive_seed(master, static_cast<std::uint64_t>(repetition), 0x53504c49ULL);  // "SPLI"
}

std::uint64_t run_seed_for(std::uint64_t master, int repetition) {
  return derive_seed(master, static_cast<std::uint64_t>(repetition), 0x52554e53ULL);  // "RUNS"
}

namespace {

ErcStrategy erc_strategy_of(const ExperimentConfig& cfg) {
  if (cfg.erc == "all") return ErcStrategy::AllConst;
  if (cfg.erc == "no") return ErcStrategy::NoConst;
  return ErcStrategy::BinConst;
}

FosKind fos_kind_of(AlgorithmId id) {
  switch (id) {
    case AlgorithmId::GomeaLtBiasedMi: return FosKind::LtBiasedMi;
    case AlgorithmId::GomeaLtMi: return FosKind::LtMi;
    default: return FosKind::RandomTree;
  }
}

GomeaConfig gomea_config_of(const ExperimentConfig& cfg, std::uint64_t run_seed) {
  GomeaConfig g;
  g.n_pop = cfg.n_pop.value_or(2);
  g.height = cfg.height;
  g.fos = fos_kind_of(cfg.algorithm);
  g.use_erc = cfg.erc != "none";
  g.erc_strategy = erc_strategy_of(cfg);
  g.erc_bin_capacity = cfg.erc_bin_capacity;
  g.persist_bins = cfg.persist_bins;
  g.budget = cfg.budget;
  g.seed = run_seed;
  return g;
}

TradConfig trad_config_of(const ExperimentConfig& cfg, std::uint64_t run_seed) {
  TradConfig t;
  t.n_pop = cfg.n_pop.value_or(2);
  t.limit.height = cfg.height;
  if (cfg.algorithm == AlgorithmId::GpTradL) {
    t.limit.kind = SizeLimitKind::NodeCount;
    t.limit.max_nodes = template_size(cfg.height, 2);
  }
  t.use_erc = cfg.erc != "none";
  t.budget = cfg.budget;
  t.seed = run_seed;
  return t;
}

RunRecord execute_repetition(const ExperimentConfig& cfg, const Dataset& data, int rep) {
  std::uint64_t split_seed = split_seed_for(cfg.master_seed, rep);
  std::uint64_t run_seed = run_seed_for(cfg.master_seed, rep);

  Rng split_rng(split_seed);
  SplitIndices idx = split(data, split_rng);

  ExprNode best;
  std::int64_t evaluations = 0;
  double elapsed = 0.0;

  if (cfg.n_pop) {
    if (is_gomea(cfg.algorithm)) {
      RunResult r = run_gomea(gomea_config_of(cfg, run_seed), data, idx);
      best = std::move(r.best_expr);
      evaluations = r.evaluations;
      elapsed = r.seconds;
    } else {
      RunResult r = run_gptrad(trad_config_of(cfg, run_seed), data, idx);
      best = std::move(r.best_expr);
      evaluations = r.evaluations;
      elapsed = r.seconds;
    }
  } else {
    ImsConfig ims;
    ims.cadence = *cfg.ims_g;
    ims.n_base = *cfg.ims_n_base;
    ims.global = cfg.budget;
    ims.master_seed = run_seed;
    ImsResult r = is_gomea(cfg.algorithm)
                      ? run_ims_gomea(gomea_config_of(cfg, run_seed), ims, data, idx)
                      : run_ims_gptrad(trad_config_of(cfg, run_seed), ims, data, idx);
    best = std::move(r.best_expr);
    evaluations = r.evaluations;
    elapsed = r.seconds;
  }

  RunRecord record;
  record.run_id = rep;
  record.seed = run_seed;
  record.algo = algorithm_name(cfg.algorithm);
  record.dataset = data.name;
  record.split_seed = split_seed;

  ExprEvaluator eval;
  auto nmse_on = [&](const std::vector<int>& rows) {
    SplitData part = take_rows(data, rows);
    std::vector<double> pred(part.x.rows);
    eval.evaluate(best, part.x, pred);
    return nmse(part.y, pred);
  };
  record.train_nmse = nmse_on(idx.train);
  record.val_nmse = nmse_on(idx.validation);
  record.test_nmse = nmse_on(idx.test);
  record.evaluations = evaluations;
  record.elapsed_s = elapsed;
  record.expression = to_infix(best, default_symbol_set(data.num_features()));
  return record;
}

}  // namespace

std::vector<RunRecord> run_experiment(const ExperimentConfig& cfg) {
  validate_config(cfg);
  Dataset data = load_csv(cfg.dataset_path);

  std::vector<RunRecord> records(cfg.repetitions);
  if (cfg.jobs <= 1) {
    for (int rep = 0; rep < cfg.repetitions; ++rep)
      records[rep] = execute_repetition(cfg, data, rep);
    return records;
  }

  std::vector<std::thread> workers;
  std::mutex error_mutex;
  std::exception_ptr first_error;
  int next_rep = 0;
  std::mutex queue_mutex;

  auto worker = [&] {
    for (;;) {
      int rep;
      {
        std::lock_guard<std::mutex> lock(queue_mutex);
        if (next_rep >= cfg.repetitions) return;
        rep = next_rep++;
      }
      try {
        records[rep] = execute_repetition(cfg, data, rep);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  int n_workers = std::min(cfg.jobs, cfg.repetitions);
  workers.reserve(n_workers);
  for (int i = 0; i < n_workers; ++i) workers.emplace_back(worker);
  for (auto& w : workers) w.join();
  if (first_error) std::rethrow_exception(first_error);
  return records;
}

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void emit_results(const std::vector<RunRecord>& records, const std::string& path) {
  if (records.empty()) throw std::invalid_argument("emit_results: no records");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write results file: " + path);
  out << "run_id,seed,algo,dataset,split_seed,train_nmse,val_nmse,test_nmse,"
         "evaluations,elapsed_s,expression\n";
  for (const RunRecord& r : records) {
    out << r.run_id << ',' << r.seed << ',' << r.algo << ',' << r.dataset << ',' << r.split_seed
        << ',' << fmt17(r.train_nmse) << ',' << fmt17(r.val_nmse) << ',' << fmt17(r.test_nmse)
        << ',' << r.evaluations << ',' << fmt17(r.elapsed_s) << ',' << r.expression << '\n';
  }
  if (!out) throw std::runtime_error("failed writing results file: " + path);
}

std::vector<RunRecord> read_results(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open results file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty results file");

  std::vector<RunRecord> records;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    // The expression is the last field and may contain anything except a
    // newline, so split only the first 10 commas.
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (int i = 0; i < 10; ++i) {
      auto comma = line.find(',', start);
      if (comma == std::string::npos)
        throw std::runtime_error(path + ":" + std::to_string(line_no) + ": malformed row");
      fields.push_back(line.substr(start, comma - start));
      start = comma + 1;
    }
    fields.push_back(line.substr(start));

    RunRecord r;
    r.run_id = std::stoi(fields[0]);
    r.seed = std::stoull(fields[1]);
    r.algo = fields[2];
    r.dataset = fields[3];
    r.split_seed = std::stoull(fields[4]);
    r.train_nmse = std::stod(fields[5]);
    r.val_nmse = std::stod(fields[6]);
    r.test_nmse = std::stod(fields[7]);
    r.evaluations = std::stoll(fields[8]);
    r.elapsed_s = std::stod(fields[9]);
    r.expression = fields[10];
    records.push_back(std::move(r));
  }
  return records;
}

namespace {

double percentile(std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  double pos = q * static_cast<double>(sorted.size() - 1);
  std::size_t lo = static_cast<std::size_t>(pos);
  std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

double median_of(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  return percentile(values, 0.5);
}

std::vector<SummaryRow> summarize(const std::vector<RunRecord>& records) {
  std::vector<std::pair<std::string, std::string>> groups;
  for (const RunRecord& r : records) {
    std::pair<std::string, std::string> key{r.algo, r.dataset};
    if (std::find(groups.begin(), groups.end(), key) == groups.end()) groups.push_back(key);
  }

  std::vector<SummaryRow> rows;
  for (const auto& [algo, dataset] : groups) {
    std::vector<double> train, val, test, elapsed;
    for (const RunRecord& r : records) {
      if (r.algo != algo || r.dataset != dataset) continue;
      train.push_back(r.train_nmse);
      val.push_back(r.val_nmse);
      test.push_back(r.test_nmse);
      elapsed.push_back(r.elapsed_s);
    }
    auto stats = [](std::vector<double> v, double& median, double& iqr) {
      std::sort(v.begin(), v.end());
      median = percentile(v, 0.5);
      iqr = percentile(v, 0.75) - percentile(v, 0.25);
    };
    SummaryRow row;
    row.algo = algo;
    row.dataset = dataset;
    row.runs = static_cast<int>(train.size());
    stats(train, row.train_median, row.train_iqr);
    stats(val, row.val_median, row.val_iqr);
    stats(test, row.test_median, row.test_iqr);
    row.elapsed_median = median_of(elapsed);
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_summary(const std::vector<SummaryRow>& rows, std::ostream& out) {
  out << "algo,dataset,runs,train_median,train_iqr,val_median,val_iqr,"
         "test_median,test_iqr,elapsed_median\n";
  for (const SummaryRow& r : rows) {
    out << r.algo << ',' << r.dataset << ',' << r.runs << ',' << fmt17(r.train_median) << ','
        << fmt17(r.train_iqr) << ',' << fmt17(r.val_median) << ',' << fmt17(r.val_iqr) << ','
        << fmt17(r.test_median) << ',' << fmt17(r.test_iqr) << ',' << fmt17(r.elapsed_median)
        << '\n';
  }
}

void dump_similarity_matrix(const ExperimentConfig& cfg, int generation,
                            const std::string& out_path) {
  if (!is_gomea(cfg.algorithm))
    throw std::invalid_argument("algo: dump-mi requires a gomea configuration");
  if (cfg.algorithm == AlgorithmId::GomeaRt)
    throw std::invalid_argument("algo: the random tree has no similarity matrix");
  if (generation < 1) throw std::invalid_argument("generation: must be at least 1");
  if (!cfg.n_pop) throw std::invalid_argument("npop: dump-mi requires a fixed population size");

  Dataset data = load_csv(cfg.dataset_path);
  Rng split_rng(split_seed_for(cfg.master_seed, 0));
  SplitIndices idx = split(data, split_rng);

  GomeaConfig g = gomea_config_of(cfg, run_seed_for(cfg.master_seed, 0));
  SymbolSet sets = make_symbol_set(data, idx.train, g.use_erc);
  TreeTemplate tpl(g.height, sets.arity());
  SplitData train = take_rows(data, idx.train);

  GomeaRunState state(g, tpl, sets, train.x, std::move(train.y));
  state.initialize();
  for (int i = 1; i < generation; ++i) state.step_generation();

  std::vector<double> sim = state.current_similarity();
  const int ell = tpl.size();
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot write matrix file: " + out_path);
  for (int i = 0; i < ell; ++i) {
    for (int j = 0; j < ell; ++j) {
      if (j > 0) out << ',';
      out << fmt17(sim[static_cast<std::size_t>(i) * ell + j]);
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("failed writing matrix file: " + out_path);
}

}  // namespace gpg
