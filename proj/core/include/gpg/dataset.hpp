#pragma once

#include <string>
#include <vector>

#include "gpg/eval.hpp"
#include "gpg/rng.hpp"

namespace gpg {

struct Dataset {
  std::string name;
  Matrix features;  // n x d, column-major
  std::vector<double> target;

  int rows() const { return features.rows; }
  int num_features() const { return features.cols; }
};

// CSV: comma-separated, all fields numeric, optional header row detected by
// a non-numeric first row, last column is the target.
Dataset load_csv(const std::string& path);

struct SplitIndices {
  std::vector<int> train;
  std::vector<int> validation;
  std::vector<int> test;
};

// Uniformly random permutation split: floor(n/2) train, floor(n/4)
// validation, remainder test.
SplitIndices split(const Dataset& data, Rng& rng);

// Materialized rows of one split part.
struct SplitData {
  Matrix x;
  std::vector<double> y;
};

SplitData take_rows(const Dataset& data, const std::vector<int>& rows);

}  // namespace gpg
