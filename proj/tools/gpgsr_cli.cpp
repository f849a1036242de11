#include <exception>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gpg/experiment.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::vector<std::pair<std::string, std::string>> overrides;
};

void add_config_flags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "Key-value configuration file");
  auto track = [&flags](const std::string& key) {
    return [&flags, key](const std::string& value) { flags.overrides.emplace_back(key, value); };
  };
  cmd->add_option_function<std::string>("--dataset", track("dataset"), "Dataset CSV path");
  cmd->add_option_function<std::string>(
      "--algo", track("algo"), "gomea-lt-mib | gomea-lt-mi | gomea-rt | gptrad-h | gptrad-l");
  cmd->add_option_function<std::string>("--erc", track("erc"),
                                        "ERC handling: none | all | no | bin");
  cmd->add_option_function<std::string>("--height", track("h"), "Tree height h");
  cmd->add_option_function<std::string>("--npop", track("npop"), "Fixed population size");
  cmd->add_option_function<std::string>("--ims-g", track("ims_g"), "IMS cadence g");
  cmd->add_option_function<std::string>("--ims-nbase", track("ims_nbase"),
                                        "IMS base population size");
  cmd->add_option_function<std::string>("--generations", track("generations"),
                                        "Generation budget");
  cmd->add_option_function<std::string>("--seconds", track("seconds"), "Wall-clock budget");
  cmd->add_option_function<std::string>("--reps", track("repetitions"), "Repetitions");
  cmd->add_option_function<std::string>("--seed", track("seed"), "Master seed");
  cmd->add_option_function<std::string>("--out", track("out"), "Output CSV path");
  cmd->add_option_function<std::string>("--jobs", track("jobs"),
                                        "Concurrent repetition jobs");
  cmd->add_option_function<std::string>("--gamma", track("gamma"),
                                        "bin-const bin capacity");
  cmd->add_option_function<std::string>("--persist-bins", track("persist_bins"),
                                        "Keep ERC bins across generations");
}

gpg::ExperimentConfig resolve_config(const CommonFlags& flags) {
  gpg::ExperimentConfig cfg;
  if (!flags.config_path.empty()) cfg = gpg::load_config_file(flags.config_path);
  for (const auto& [key, value] : flags.overrides) gpg::apply_config_entry(cfg, key, value);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Symbolic regression with GP-GOMEA, a traditional-GP baseline, "
               "and an interleaved multistart scheme"};
  app.require_subcommand(1);

  CommonFlags run_flags;
  CLI::App* run_cmd = app.add_subcommand("run", "Execute a configured experiment");
  add_config_flags(run_cmd, run_flags);

  std::string summarize_input;
  std::string summarize_output;
  CLI::App* summarize_cmd =
      app.add_subcommand("summarize", "Median/IQR per algorithm and dataset from a results CSV");
  summarize_cmd->add_option("results", summarize_input, "Results CSV produced by `run`")
      ->required();
  summarize_cmd->add_option("--out", summarize_output, "Write the summary CSV here (default stdout)");

  CommonFlags dump_flags;
  int dump_generation = 1;
  std::string dump_output = "similarity.csv";
  CLI::App* dump_cmd =
      app.add_subcommand("dump-mi", "Write the similarity matrix at a given generation");
  add_config_flags(dump_cmd, dump_flags);
  dump_cmd->add_option("--generation", dump_generation, "Generation to dump (1 = initial)");
  dump_cmd->add_option("--matrix-out", dump_output, "Matrix CSV path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      gpg::ExperimentConfig cfg = resolve_config(run_flags);
      std::vector<gpg::RunRecord> records = gpg::run_experiment(cfg);
      gpg::emit_results(records, cfg.output_path);
      std::cout << "wrote " << records.size() << " run record(s) to " << cfg.output_path << "\n";
      for (const gpg::SummaryRow& row : gpg::summarize(records)) {
        std::cout << row.algo << " on " << row.dataset << ": median train NMSE "
                  << row.train_median << ", validation " << row.val_median << ", test "
                  << row.test_median << " over " << row.runs << " run(s)\n";
      }
    } else if (summarize_cmd->parsed()) {
      auto records = gpg::read_results(summarize_input);
      auto rows = gpg::summarize(records);
      if (summarize_output.empty()) {
        gpg::write_summary(rows, std::cout);
      } else {
        std::ofstream out(summarize_output);
        if (!out) throw std::runtime_error("cannot write summary file: " + summarize_output);
        gpg::write_summary(rows, out);
        std::cout << "wrote summary to " << summarize_output << "\n";
      }
    } else if (dump_cmd->parsed()) {
      gpg::ExperimentConfig cfg = resolve_config(dump_flags);
      gpg::dump_similarity_matrix(cfg, dump_generation, dump_output);
      std::cout << "wrote similarity matrix to " << dump_output << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
