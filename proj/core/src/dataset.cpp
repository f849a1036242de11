#include "gpg/dataset.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace gpg {

namespace {

bool parse_field(const std::string& field, double& out) {
  const char* begin = field.c_str();
  char* end = nullptr;
  out = std::strtod(begin, &end);
  if (end == begin) return false;
  while (*end == ' ' || *end == '\t' || *end == '\r') ++end;
  return *end == '\0';
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace

Dataset load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset file: " + path);

  std::vector<std::vector<double>> rows;
  std::string line;
  int line_no = 0;
  bool first_content_row = true;
  std::size_t expected_cols = 0;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    auto fields = split_line(line);
    std::vector<double> values(fields.size());
    bool all_numeric = true;
    std::size_t bad_col = 0;
    for (std::size_t c = 0; c < fields.size(); ++c) {
      if (!parse_field(fields[c], values[c])) {
        all_numeric = false;
        bad_col = c;
        break;
      }
    }

    if (!all_numeric) {
      // A non-numeric first row is a header; anywhere else it is an error.
      if (first_content_row) {
        first_content_row = false;
        expected_cols = fields.size();
        continue;
      }
      throw std::runtime_error(path + ": non-numeric cell at row " + std::to_string(line_no) +
                               ", column " + std::to_string(bad_col + 1));
    }

    if (first_content_row) {
      first_content_row = false;
      expected_cols = fields.size();
    } else if (fields.size() != expected_cols) {
      throw std::runtime_error(path + ": row " + std::to_string(line_no) + " has " +
                               std::to_string(fields.size()) + " fields, expected " +
                               std::to_string(expected_cols));
    }
    rows.push_back(std::move(values));
  }

  if (rows.empty()) throw std::runtime_error(path + ": no data rows");
  if (expected_cols < 2) throw std::runtime_error(path + ": need at least one feature column and a target");

  int n = static_cast<int>(rows.size());
  int d = static_cast<int>(expected_cols) - 1;
  Dataset data;
  data.name = path;
  if (auto slash = path.find_last_of('/'); slash != std::string::npos)
    data.name = path.substr(slash + 1);
  if (auto dot = data.name.find_last_of('.'); dot != std::string::npos)
    data.name = data.name.substr(0, dot);
  data.features = Matrix(n, d);
  data.target.resize(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) {
      if (!std::isfinite(rows[i][j]))
        throw std::runtime_error(path + ": non-finite value at row " + std::to_string(i + 1));
      data.features.at(i, j) = rows[i][j];
    }
    data.target[i] = rows[i][d];
    if (!std::isfinite(data.target[i]))
      throw std::runtime_error(path + ": non-finite target at row " + std::to_string(i + 1));
  }
  return data;
}

SplitIndices split(const Dataset& data, Rng& rng) {
  int n = data.rows();
  if (n < 4) throw std::invalid_argument("split: need at least 4 rows");
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  shuffle(rng, perm);

  int n_train = n / 2;
  int n_val = n / 4;
  SplitIndices s;
  s.train.assign(perm.begin(), perm.begin() + n_train);
  s.validation.assign(perm.begin() + n_train, perm.begin() + n_train + n_val);
  s.test.assign(perm.begin() + n_train + n_val, perm.end());
  return s;
}

SplitData take_rows(const Dataset& data, const std::vector<int>& rows) {
  SplitData out;
  out.x = Matrix(static_cast<int>(rows.size()), data.num_features());
  out.y.resize(rows.size());
  for (int j = 0; j < data.num_features(); ++j) {
    const double* src = data.features.col(j);
    double* dst = out.x.col(j);
    for (std::size_t i = 0; i < rows.size(); ++i) dst[i] = src[rows[i]];
  }
  for (std::size_t i = 0; i < rows.size(); ++i) out.y[i] = data.target[rows[i]];
  return out;
}

}  // namespace gpg
