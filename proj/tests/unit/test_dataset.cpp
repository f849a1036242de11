#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <set>

#include "gpg/dataset.hpp"

using namespace gpg;

namespace {

struct TempCsv {
  std::string path;
  explicit TempCsv(const std::string& content) {
    static int counter = 0;
    path = "/tmp/gpgsr_test_" + std::to_string(counter++) + ".csv";
    std::ofstream out(path);
    out << content;
  }
  ~TempCsv() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("load_csv basic shape") {
  TempCsv file("1,2,3\n4,5,6\n7,8,9\n10,11,12\n13,14,15\n");
  Dataset d = load_csv(file.path);
  CHECK(d.rows() == 5);
  CHECK(d.num_features() == 2);
  CHECK(d.features.at(1, 0) == 4.0);
  CHECK(d.features.at(1, 1) == 5.0);
  CHECK(d.target[1] == 6.0);
}

TEST_CASE("load_csv detects and skips a header row") {
  TempCsv file("f1,f2,y\n1,2,3\n4,5,6\n");
  Dataset d = load_csv(file.path);
  CHECK(d.rows() == 2);
  CHECK(d.num_features() == 2);
  CHECK(d.target[0] == 3.0);
}

TEST_CASE("load_csv errors name the offending cell") {
  SUBCASE("non-numeric cell past the header") {
    TempCsv file("1,2,3\n4,oops,6\n");
    CHECK_THROWS_WITH_AS(load_csv(file.path),
                         doctest::Contains("row 2, column 2"), std::runtime_error);
  }
  SUBCASE("empty file") {
    TempCsv file("");
    CHECK_THROWS(load_csv(file.path));
  }
  SUBCASE("header-only file") {
    TempCsv file("a,b,c\n");
    CHECK_THROWS(load_csv(file.path));
  }
  SUBCASE("ragged row") {
    TempCsv file("1,2,3\n4,5\n");
    CHECK_THROWS(load_csv(file.path));
  }
  SUBCASE("missing file") {
    CHECK_THROWS(load_csv("/tmp/gpgsr_definitely_missing.csv"));
  }
}

TEST_CASE("split follows floor(n/2), floor(n/4), remainder") {
  SUBCASE("n = 308 gives 154/77/77") {
    Dataset d;
    d.features = Matrix(308, 1);
    d.target.assign(308, 0.0);
    Rng rng(5);
    SplitIndices s = split(d, rng);
    CHECK(s.train.size() == 154);
    CHECK(s.validation.size() == 77);
    CHECK(s.test.size() == 77);
  }
  SUBCASE("n = 4 gives 2/1/1") {
    Dataset d;
    d.features = Matrix(4, 1);
    d.target.assign(4, 0.0);
    Rng rng(5);
    SplitIndices s = split(d, rng);
    CHECK(s.train.size() == 2);
    CHECK(s.validation.size() == 1);
    CHECK(s.test.size() == 1);
  }
  SUBCASE("n = 3 is rejected") {
    Dataset d;
    d.features = Matrix(3, 1);
    d.target.assign(3, 0.0);
    Rng rng(5);
    CHECK_THROWS(split(d, rng));
  }
}

TEST_CASE("split partitions are disjoint, covering, and seed-deterministic") {
  Dataset d;
  d.features = Matrix(101, 2);
  d.target.assign(101, 0.0);

  Rng rng_a(99);
  Rng rng_b(99);
  SplitIndices a = split(d, rng_a);
  SplitIndices b = split(d, rng_b);
  CHECK(a.train == b.train);
  CHECK(a.validation == b.validation);
  CHECK(a.test == b.test);

  std::set<int> all;
  for (int i : a.train) all.insert(i);
  for (int i : a.validation) all.insert(i);
  for (int i : a.test) all.insert(i);
  CHECK(all.size() == 101);
  CHECK(*all.begin() == 0);
  CHECK(*all.rbegin() == 100);

  Rng rng_c(100);
  SplitIndices c = split(d, rng_c);
  CHECK(a.train != c.train);  // different seed, different permutation
}

TEST_CASE("take_rows materializes the selected rows in order") {
  Dataset d;
  d.features = Matrix(5, 2);
  d.target.resize(5);
  for (int i = 0; i < 5; ++i) {
    d.features.at(i, 0) = i;
    d.features.at(i, 1) = 10 + i;
    d.target[i] = 100 + i;
  }
  SplitData part = take_rows(d, {4, 1});
  CHECK(part.x.rows == 2);
  CHECK(part.x.at(0, 0) == 4.0);
  CHECK(part.x.at(1, 1) == 11.0);
  CHECK(part.y == std::vector<double>{104.0, 101.0});
}
