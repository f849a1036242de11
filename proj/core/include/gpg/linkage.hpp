#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "gpg/genotype.hpp"
#include "gpg/symbol.hpp"
#include "gpg/tree_template.hpp"

namespace gpg {

// How constants are keyed when counting symbol frequencies.
enum class ErcStrategy {
  AllConst,  // every distinct constant bit pattern is its own symbol
  NoConst,   // constants contribute no counts at all
  BinConst,  // constants snap to the nearest of the first gamma seen
};

// On-line binning table: the first `capacity` distinct constants become
// bins; later constants map to the nearest bin, ties toward the smaller.
class ErcBinTable {
 public:
  explicit ErcBinTable(int capacity = 100) : capacity_(capacity) {}

  // Returns the representative constant for `value`, inserting a new bin
  // while capacity remains. O(log capacity) lookup.
  double bin_constant(double value);

  int capacity() const { return capacity_; }
  const std::vector<double>& bins() const { return bins_; }
  void clear() { bins_.clear(); }

 private:
  int capacity_;
  std::vector<double> bins_;  // sorted ascending, unique
};

// Discrete counting identity of a symbol at a location.
struct SymbolKey {
  std::uint32_t tag = 0;  // SymbolKind
  std::uint64_t payload = 0;

  friend bool operator==(const SymbolKey&, const SymbolKey&) = default;
};

struct SymbolKeyHash {
  std::size_t operator()(const SymbolKey& k) const {
    std::uint64_t x = k.payload + 0x9e3779b97f4a7c15ULL * (k.tag + 1);
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    return static_cast<std::size_t>(x ^ (x >> 31));
  }
};

// Per-location and pairwise symbol distributions over a population.
// Under no-const, constants carry no mass: marginal and joint counts at a
// location can sum to less than the population size.
//
// Joint counts use a dense table when the pair's symbol alphabet is small
// (which binning guarantees) and fall back to a hash map for unbounded
// alphabets such as all-const constants.
class FrequencyModel {
 public:
  struct LocationDist {
    std::unordered_map<SymbolKey, std::uint32_t, SymbolKeyHash> ids;  // key -> dense id
    std::vector<std::uint32_t> counts;                                // by dense id
  };

  int locations() const { return ell_; }
  int population_size() const { return n_pop_; }

  const LocationDist& location(int i) const { return locs_[i]; }
  int distinct_symbols(int i) const { return static_cast<int>(locs_[i].counts.size()); }

  // Count of the (id_i, id_j) symbol pair at locations (i, j), i != j.
  std::uint32_t joint_count(int i, int j, std::uint32_t id_i, std::uint32_t id_j) const;

  // Applies fn to every nonzero joint count of the pair (i, j).
  template <typename Fn>
  void for_each_joint_count(int i, int j, Fn&& fn) const {
    if (i > j) std::swap(i, j);
    const JointDist& joint = joint_[pair_index(i, j)];
    if (joint.dense) {
      for (std::uint32_t c : joint.cells)
        if (c != 0) fn(c);
    } else {
      for (const auto& [key, c] : joint.map) fn(c);
    }
  }

 private:
  friend FrequencyModel count_frequencies(std::span<const GenotypeTree>, ErcStrategy,
                                          ErcBinTable&, const TreeTemplate&);

  struct JointDist {
    bool dense = true;
    std::uint32_t nj = 0;                       // dense row stride
    std::vector<std::uint32_t> cells;           // dense: |s_i| x |s_j|
    std::unordered_map<std::uint64_t, std::uint32_t> map;  // sparse: (id_i<<32)|id_j
  };

  int ell_ = 0;
  int n_pop_ = 0;
  std::vector<LocationDist> locs_;
  std::vector<JointDist> joint_;
  std::size_t pair_index(int i, int j) const;
};

// Counts per-location and pairwise symbol occurrences in O(n_pop * ell^2).
FrequencyModel count_frequencies(std::span<const GenotypeTree> population, ErcStrategy strategy,
                                 ErcBinTable& bins, const TreeTemplate& tpl);

// Base-2 empirical entropies; 0 log 0 contributes 0.
double entropy(const FrequencyModel& model, int i);
double joint_entropy(const FrequencyModel& model, int i, int j);

// MI(i,j) = H(i) + H(j) - H(i,j); MI(i,i) = H(i).
double mutual_information(const FrequencyModel& model, int i, int j);

// Linear bias coefficients captured from the initial population: with them
// the biased MI is zero between all location pairs at initialization.
struct BiasCoefficients {
  std::vector<double> beta_loc;   // 1/H(i) at capture, 0 when H(i) = 0
  std::vector<double> beta_pair;  // ell x ell, 2/H(i,j) at capture, 0 when H(i,j) = 0

  int locations() const { return static_cast<int>(beta_loc.size()); }
  double pair(int i, int j) const { return beta_pair[static_cast<std::size_t>(i) * locations() + j]; }
};

BiasCoefficients capture_bias(const FrequencyModel& initial_model);

// beta_i H(i) + beta_j H(j) - beta_ij H(i,j); may leave [0, 1].
double biased_mi(const FrequencyModel& model, const BiasCoefficients& bias, int i, int j);

// Full ell x ell similarity matrices (row-major). The unbiased matrix
// carries H(i) on the diagonal, the biased one carries 1 by convention.
std::vector<double> similarity_matrix_mi(const FrequencyModel& model);
std::vector<double> similarity_matrix_biased_mi(const FrequencyModel& model,
                                                const BiasCoefficients& bias);

}  // namespace gpg
