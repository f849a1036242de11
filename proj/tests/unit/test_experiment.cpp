#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "gpg/experiment.hpp"
#include "infix_parser.hpp"

using namespace gpg;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& content, const std::string& ext = ".cfg") {
    static int counter = 0;
    path = "/tmp/gpgsr_exp_" + std::to_string(counter++) + ext;
    std::ofstream out(path);
    out << content;
  }
  ~TempFile() { std::remove(path.c_str()); }
};

TempFile small_dataset() {
  std::ostringstream csv;
  csv << "a,b,y\n";
  Rng rng(77);
  for (int i = 0; i < 40; ++i) {
    double a = uniform_real(rng, -2, 2);
    double b = uniform_real(rng, -2, 2);
    csv << a << "," << b << "," << (a * b + a) << "\n";
  }
  return TempFile(csv.str(), ".csv");
}

}  // namespace

TEST_CASE("algorithm names round-trip") {
  for (auto id : {AlgorithmId::GomeaLtBiasedMi, AlgorithmId::GomeaLtMi, AlgorithmId::GomeaRt,
                  AlgorithmId::GpTradH, AlgorithmId::GpTradL})
    CHECK(parse_algorithm(algorithm_name(id)) == id);
  CHECK_THROWS(parse_algorithm("gomea"));
}

TEST_CASE("config file parsing and overrides") {
  TempFile cfg_file(
      "# experiment\n"
      "dataset = some.csv\n"
      "algo = gomea-rt\n"
      "npop = 100\n"
      "generations = 5\n"
      "seed = 99\n");
  ExperimentConfig cfg = load_config_file(cfg_file.path);
  CHECK(cfg.dataset_path == "some.csv");
  CHECK(cfg.algorithm == AlgorithmId::GomeaRt);
  CHECK(cfg.n_pop == 100);
  CHECK(cfg.budget.generations == 5);
  CHECK(cfg.master_seed == 99);

  SUBCASE("overrides win over the file") {
    apply_config_entry(cfg, "npop", "64");
    apply_config_entry(cfg, "algo", "gptrad-h");
    CHECK(cfg.n_pop == 64);
    CHECK(cfg.algorithm == AlgorithmId::GpTradH);
  }
  SUBCASE("unknown keys and bad values name the field") {
    CHECK_THROWS_WITH_AS(apply_config_entry(cfg, "bogus", "1"),
                         doctest::Contains("bogus"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(apply_config_entry(cfg, "npop", "many"),
                         doctest::Contains("npop"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(apply_config_entry(cfg, "erc", "sometimes"),
                         doctest::Contains("erc"), std::invalid_argument);
  }
}

TEST_CASE("config validation") {
  ExperimentConfig cfg;
  cfg.dataset_path = "x.csv";
  cfg.budget.generations = 5;

  SUBCASE("needs exactly one population scheme") {
    CHECK_THROWS(validate_config(cfg));  // neither
    cfg.n_pop = 10;
    CHECK_NOTHROW(validate_config(cfg));
    cfg.ims_g = 4;
    cfg.ims_n_base = 10;
    CHECK_THROWS(validate_config(cfg));  // both
    cfg.n_pop.reset();
    CHECK_NOTHROW(validate_config(cfg));
  }
  SUBCASE("half an IMS block is rejected") {
    cfg.ims_g = 4;
    CHECK_THROWS(validate_config(cfg));
  }
  SUBCASE("budget required") {
    cfg.n_pop = 10;
    cfg.budget = {};
    CHECK_THROWS(validate_config(cfg));
  }
}

TEST_CASE("seed derivation pairs splits across algorithms") {
  for (int rep = 0; rep < 5; ++rep) {
    CHECK(split_seed_for(42, rep) == split_seed_for(42, rep));
    CHECK(split_seed_for(42, rep) != run_seed_for(42, rep));
    if (rep > 0) CHECK(split_seed_for(42, rep) != split_seed_for(42, rep - 1));
  }
  CHECK(split_seed_for(42, 0) != split_seed_for(43, 0));
}

TEST_CASE("run_experiment produces paired, reproducible records") {
  TempFile data = small_dataset();
  ExperimentConfig cfg;
  cfg.dataset_path = data.path;
  cfg.algorithm = AlgorithmId::GomeaLtBiasedMi;
  cfg.height = 2;
  cfg.n_pop = 24;
  cfg.budget.generations = 6;
  cfg.repetitions = 3;
  cfg.master_seed = 7;

  auto records = run_experiment(cfg);
  REQUIRE(records.size() == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(records[i].run_id == i);
    CHECK(records[i].algo == "gomea-lt-mib");
    CHECK(records[i].train_nmse >= 0.0);
    CHECK(records[i].split_seed == split_seed_for(7, i));
  }

  SUBCASE("another algorithm reuses the split seeds (paired protocol)") {
    ExperimentConfig other = cfg;
    other.algorithm = AlgorithmId::GomeaRt;
    auto other_records = run_experiment(other);
    for (int i = 0; i < 3; ++i) CHECK(other_records[i].split_seed == records[i].split_seed);
  }
  SUBCASE("parallel jobs produce the same records as sequential") {
    ExperimentConfig par = cfg;
    par.jobs = 3;
    auto par_records = run_experiment(par);
    for (int i = 0; i < 3; ++i) {
      CHECK(par_records[i].train_nmse == records[i].train_nmse);
      CHECK(par_records[i].expression == records[i].expression);
    }
  }
  SUBCASE("single repetition yields a single record") {
    ExperimentConfig one = cfg;
    one.repetitions = 1;
    CHECK(run_experiment(one).size() == 1);
  }
}

TEST_CASE("emit_results writes the pinned schema deterministically") {
  TempFile data = small_dataset();
  ExperimentConfig cfg;
  cfg.dataset_path = data.path;
  cfg.algorithm = AlgorithmId::GpTradL;
  cfg.height = 3;
  cfg.n_pop = 20;
  cfg.budget.generations = 4;
  cfg.repetitions = 2;
  cfg.master_seed = 11;

  auto records = run_experiment(cfg);
  TempFile out_a("", ".csv"), out_b("", ".csv");
  emit_results(records, out_a.path);
  emit_results(records, out_b.path);

  std::ifstream fa(out_a.path), fb(out_b.path);
  std::stringstream sa, sb;
  sa << fa.rdbuf();
  sb << fb.rdbuf();
  CHECK(sa.str() == sb.str());  // byte-identical re-emission

  std::string header;
  std::getline(sa, header);
  CHECK(header ==
        "run_id,seed,algo,dataset,split_seed,train_nmse,val_nmse,test_nmse,"
        "evaluations,elapsed_s,expression");

  SUBCASE("read_results round-trips") {
    auto parsed = read_results(out_a.path);
    REQUIRE(parsed.size() == records.size());
    for (std::size_t i = 0; i < parsed.size(); ++i) {
      CHECK(parsed[i].run_id == records[i].run_id);
      CHECK(parsed[i].seed == records[i].seed);
      CHECK(parsed[i].train_nmse == records[i].train_nmse);  // 17 digits survive
      CHECK(parsed[i].expression == records[i].expression);
    }
  }
  SUBCASE("empty record list is rejected") {
    CHECK_THROWS(emit_results({}, "/tmp/gpgsr_none.csv"));
  }
}

TEST_CASE("emitted expressions re-evaluate to the recorded test NMSE") {
  TempFile data = small_dataset();
  ExperimentConfig cfg;
  cfg.dataset_path = data.path;
  cfg.algorithm = AlgorithmId::GomeaLtMi;
  cfg.height = 2;
  cfg.n_pop = 30;
  cfg.budget.generations = 8;
  cfg.repetitions = 2;
  cfg.master_seed = 13;

  Dataset d = load_csv(data.path);
  for (const RunRecord& record : run_experiment(cfg)) {
    Rng split_rng(record.split_seed);
    SplitIndices idx = split(d, split_rng);
    SplitData test_part = take_rows(d, idx.test);

    ExprNode parsed = test::parse_infix(record.expression, default_symbol_set(d.num_features()));
    auto pred = evaluate(parsed, test_part.x);
    CHECK(nmse(test_part.y, pred) ==
          doctest::Approx(record.test_nmse).epsilon(1e-9));
  }
}

TEST_CASE("summarize groups by algorithm and dataset") {
  std::vector<RunRecord> records;
  for (int i = 0; i < 5; ++i) {
    RunRecord r;
    r.run_id = i;
    r.algo = "gomea-lt-mib";
    r.dataset = "toy";
    r.train_nmse = i + 1.0;  // 1..5 -> median 3
    r.val_nmse = 2.0 * (i + 1);
    r.test_nmse = 10.0;
    records.push_back(r);
  }
  RunRecord other;
  other.algo = "gomea-rt";
  other.dataset = "toy";
  other.train_nmse = 42.0;
  records.push_back(other);

  auto rows = summarize(records);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].algo == "gomea-lt-mib");
  CHECK(rows[0].runs == 5);
  CHECK(rows[0].train_median == doctest::Approx(3.0));
  CHECK(rows[0].train_iqr == doctest::Approx(2.0));
  CHECK(rows[1].algo == "gomea-rt");
  CHECK(rows[1].train_median == doctest::Approx(42.0));

  std::ostringstream out;
  write_summary(rows, out);
  CHECK(out.str().find("algo,dataset,runs,") == 0);
}

TEST_CASE("dump_similarity_matrix writes the expected shapes and values") {
  TempFile data = small_dataset();
  ExperimentConfig cfg;
  cfg.dataset_path = data.path;
  cfg.algorithm = AlgorithmId::GomeaLtBiasedMi;
  cfg.height = 2;
  cfg.n_pop = 600;
  cfg.budget.generations = 3;
  cfg.master_seed = 17;

  TempFile out("", ".csv");
  SUBCASE("generation 1 biased matrix is the identity") {
    dump_similarity_matrix(cfg, 1, out.path);
    std::ifstream in(out.path);
    std::string line;
    int row = 0;
    while (std::getline(in, line)) {
      std::stringstream ss(line);
      std::string cell;
      int col = 0;
      while (std::getline(ss, cell, ',')) {
        double v = std::stod(cell);
        if (row == col) CHECK(v == 1.0);
        else CHECK(std::abs(v) <= 1e-9);
        ++col;
      }
      CHECK(col == 7);
      ++row;
    }
    CHECK(row == 7);
  }
  SUBCASE("unbiased matrix is symmetric with entropies on the diagonal") {
    cfg.algorithm = AlgorithmId::GomeaLtMi;
    dump_similarity_matrix(cfg, 2, out.path);
    std::ifstream in(out.path);
    std::vector<std::vector<double>> m;
    std::string line;
    while (std::getline(in, line)) {
      std::vector<double> row;
      std::stringstream ss(line);
      std::string cell;
      while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
      m.push_back(row);
    }
    REQUIRE(m.size() == 7);
    for (int i = 0; i < 7; ++i)
      for (int j = 0; j < 7; ++j) CHECK(m[i][j] == m[j][i]);
    for (int i = 0; i < 7; ++i) CHECK(m[i][i] >= 0.0);
  }
  SUBCASE("a tiny population at generation 2 leaves [0, 1]") {
    cfg.n_pop = 10;
    cfg.budget.generations = 2;
    cfg.master_seed = 1;
    dump_similarity_matrix(cfg, 2, out.path);
    std::ifstream in(out.path);
    std::string line;
    double lo = 1e9;
    while (std::getline(in, line)) {
      std::stringstream ss(line);
      std::string cell;
      while (std::getline(ss, cell, ',')) lo = std::min(lo, std::stod(cell));
    }
    CHECK(lo < 0.0);  // small-sample biased MI dips below zero
  }
  SUBCASE("random-tree configurations are rejected") {
    cfg.algorithm = AlgorithmId::GomeaRt;
    CHECK_THROWS(dump_similarity_matrix(cfg, 1, out.path));
  }
  SUBCASE("gptrad configurations are rejected") {
    cfg.algorithm = AlgorithmId::GpTradH;
    CHECK_THROWS(dump_similarity_matrix(cfg, 1, out.path));
  }
}
