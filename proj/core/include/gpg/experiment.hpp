#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gpg/gomea.hpp"
#include "gpg/gptrad.hpp"
#include "gpg/ims.hpp"

namespace gpg {

enum class AlgorithmId { GomeaLtBiasedMi, GomeaLtMi, GomeaRt, GpTradH, GpTradL };

std::string algorithm_name(AlgorithmId id);
AlgorithmId parse_algorithm(const std::string& name);

bool is_gomea(AlgorithmId id);

struct ExperimentConfig {
  std::string dataset_path;
  AlgorithmId algorithm = AlgorithmId::GomeaLtBiasedMi;
  std::string erc = "none";  // none | all | no | bin
  int height = 4;
  std::optional<int> n_pop;   // fixed-population runs ...
  std::optional<int> ims_g;   // ... or an IMS block (both fields)
  std::optional<int> ims_n_base;
  Budget budget;
  int repetitions = 1;
  std::uint64_t master_seed = 42;
  std::string output_path = "results.csv";
  int jobs = 1;  // repetitions run concurrently as independent jobs
  int erc_bin_capacity = 100;
  bool persist_bins = false;
};

// Flat key-value file ("key = value", '#' comments). Precedence is
// CLI override > file > defaults; overrides reuse apply_config_entry.
ExperimentConfig load_config_file(const std::string& path);
void apply_config_entry(ExperimentConfig& cfg, const std::string& key, const std::string& value);
void validate_config(const ExperimentConfig& cfg);

struct RunRecord {
  int run_id = 0;
  std::uint64_t seed = 0;
  std::string algo;
  std::string dataset;
  std::uint64_t split_seed = 0;
  double train_nmse = 0.0;
  double val_nmse = 0.0;
  double test_nmse = 0.0;
  std::int64_t evaluations = 0;
  double elapsed_s = 0.0;
  std::string expression;
};

// Seed derivation: repetition index and role hashed into the master seed,
// so any two algorithms given the same master seed see identical splits
// per repetition (paired comparisons), while run streams stay independent.
std::uint64_t split_seed_for(std::uint64_t master, int repetition);
std::uint64_t run_seed_for(std::uint64_t master, int repetition);

std::vector<RunRecord> run_experiment(const ExperimentConfig& cfg);

void emit_results(const std::vector<RunRecord>& records, const std::string& path);
std::vector<RunRecord> read_results(const std::string& path);

struct SummaryRow {
  std::string algo;
  std::string dataset;
  int runs = 0;
  double train_median = 0.0, train_iqr = 0.0;
  double val_median = 0.0, val_iqr = 0.0;
  double test_median = 0.0, test_iqr = 0.0;
  double elapsed_median = 0.0;
};

std::vector<SummaryRow> summarize(const std::vector<RunRecord>& records);
void write_summary(const std::vector<SummaryRow>& rows, std::ostream& out);

// Runs the configured GOMEA to the requested generation (1 = initial
// population) and writes its similarity matrix as an ell x ell CSV.
void dump_similarity_matrix(const ExperimentConfig& cfg, int generation,
                            const std::string& out_path);

double median_of(std::vector<double> values);

}  // namespace gpg
