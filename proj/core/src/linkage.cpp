#include "gpg/linkage.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace gpg {

double ErcBinTable::bin_constant(double value) {
  auto it = std::lower_bound(bins_.begin(), bins_.end(), value);
  if (it != bins_.end() && *it == value) return value;
  if (static_cast<int>(bins_.size()) < capacity_) {
    bins_.insert(it, value);
    return value;
  }
  // Full: nearest bin, ties toward the smaller.
  if (it == bins_.begin()) return *it;
  if (it == bins_.end()) return bins_.back();
  double above = *it;
  double below = *(it - 1);
  return (value - below <= above - value) ? below : above;
}

std::size_t FrequencyModel::pair_index(int i, int j) const {
  // i < j required; upper-triangle row-major layout
  return static_cast<std::size_t>(i) * (2 * ell_ - i - 1) / 2 + (j - i - 1);
}

std::uint32_t FrequencyModel::joint_count(int i, int j, std::uint32_t id_i,
                                          std::uint32_t id_j) const {
  if (i == j) throw std::invalid_argument("joint distribution needs two distinct locations");
  if (i > j) {
    std::swap(i, j);
    std::swap(id_i, id_j);
  }
  const JointDist& joint = joint_[pair_index(i, j)];
  if (joint.dense) {
    if (id_i >= locs_[i].counts.size() || id_j >= locs_[j].counts.size()) return 0;
    return joint.cells[static_cast<std::size_t>(id_i) * joint.nj + id_j];
  }
  auto it = joint.map.find((static_cast<std::uint64_t>(id_i) << 32) | id_j);
  return it == joint.map.end() ? 0 : it->second;
}

namespace {

constexpr std::uint32_t kNoKey = 0xffffffffu;

std::uint32_t intern_symbol(FrequencyModel::LocationDist& loc, const Symbol& sym,
                            ErcStrategy strategy, ErcBinTable& bins) {
  SymbolKey key;
  switch (sym.kind) {
    case SymbolKind::Function:
      key = {0, sym.id};
      break;
    case SymbolKind::Feature:
      key = {1, sym.id};
      break;
    case SymbolKind::Constant:
      if (strategy == ErcStrategy::NoConst) return kNoKey;
      if (strategy == ErcStrategy::BinConst)
        key = {2, std::bit_cast<std::uint64_t>(bins.bin_constant(sym.value))};
      else
        key = {2, std::bit_cast<std::uint64_t>(sym.value)};
      break;
  }
  auto [it, inserted] = loc.ids.try_emplace(key, static_cast<std::uint32_t>(loc.counts.size()));
  if (inserted) loc.counts.push_back(0);
  ++loc.counts[it->second];
  return it->second;
}

}  // namespace

FrequencyModel count_frequencies(std::span<const GenotypeTree> population, ErcStrategy strategy,
                                 ErcBinTable& bins, const TreeTemplate& tpl) {
  if (population.empty()) throw std::invalid_argument("count_frequencies: empty population");
  const int ell = tpl.size();
  const int n_pop = static_cast<int>(population.size());

  FrequencyModel model;
  model.ell_ = ell;
  model.n_pop_ = n_pop;
  model.locs_.resize(ell);
  model.joint_.resize(static_cast<std::size_t>(ell) * (ell - 1) / 2);

  // Dense symbol ids per individual and location; kNoKey marks skipped
  // constants under no-const.
  std::vector<std::uint32_t> ids(static_cast<std::size_t>(n_pop) * ell);
  for (int t = 0; t < n_pop; ++t) {
    const GenotypeTree& tree = population[t];
    std::uint32_t* row = ids.data() + static_cast<std::size_t>(t) * ell;
    for (int i = 0; i < ell; ++i)
      row[i] = intern_symbol(model.locs_[i], tree.symbols[i], strategy, bins);
  }

  // Dense tables once the alphabet product is small enough to beat hashing.
  const std::size_t dense_limit =
      std::min<std::size_t>(1u << 16, 32 * static_cast<std::size_t>(n_pop));

  for (int i = 0; i < ell; ++i) {
    const std::size_t ni = model.locs_[i].counts.size();
    for (int j = i + 1; j < ell; ++j) {
      const std::size_t nj = model.locs_[j].counts.size();
      FrequencyModel::JointDist& joint = model.joint_[model.pair_index(i, j)];
      joint.dense = ni * nj <= dense_limit;
      if (joint.dense) {
        joint.nj = static_cast<std::uint32_t>(nj);
        joint.cells.assign(ni * nj, 0);
        for (int t = 0; t < n_pop; ++t) {
          const std::uint32_t* row = ids.data() + static_cast<std::size_t>(t) * ell;
          if (row[i] == kNoKey || row[j] == kNoKey) continue;
          ++joint.cells[static_cast<std::size_t>(row[i]) * nj + row[j]];
        }
      } else {
        for (int t = 0; t < n_pop; ++t) {
          const std::uint32_t* row = ids.data() + static_cast<std::size_t>(t) * ell;
          if (row[i] == kNoKey || row[j] == kNoKey) continue;
          ++joint.map[(static_cast<std::uint64_t>(row[i]) << 32) | row[j]];
        }
      }
    }
  }
  return model;
}

namespace {

double entropy_term(std::uint32_t count, double inv_n) {
  if (count == 0) return 0.0;
  double p = count * inv_n;
  return -p * std::log2(p);
}

}  // namespace

double entropy(const FrequencyModel& model, int i) {
  double inv_n = 1.0 / model.population_size();
  double h = 0.0;
  for (std::uint32_t c : model.location(i).counts) h += entropy_term(c, inv_n);
  return h;
}

double joint_entropy(const FrequencyModel& model, int i, int j) {
  if (i == j) return entropy(model, i);
  double inv_n = 1.0 / model.population_size();
  double h = 0.0;
  model.for_each_joint_count(i, j, [&](std::uint32_t c) { h += entropy_term(c, inv_n); });
  return h;
}

double mutual_information(const FrequencyModel& model, int i, int j) {
  if (i == j) return entropy(model, i);
  return entropy(model, i) + entropy(model, j) - joint_entropy(model, i, j);
}

BiasCoefficients capture_bias(const FrequencyModel& model) {
  const int ell = model.locations();
  BiasCoefficients bias;
  bias.beta_loc.resize(ell);
  bias.beta_pair.assign(static_cast<std::size_t>(ell) * ell, 0.0);
  for (int i = 0; i < ell; ++i) {
    double h = entropy(model, i);
    bias.beta_loc[i] = h > 0.0 ? 1.0 / h : 0.0;
  }
  for (int i = 0; i < ell; ++i) {
    for (int j = i + 1; j < ell; ++j) {
      double h = joint_entropy(model, i, j);
      double b = h > 0.0 ? 2.0 / h : 0.0;
      bias.beta_pair[static_cast<std::size_t>(i) * ell + j] = b;
      bias.beta_pair[static_cast<std::size_t>(j) * ell + i] = b;
    }
  }
  return bias;
}

namespace {

// Sub-rounding-noise linkage is no linkage; snapping it to zero makes the
// capture-generation matrix exactly the identity, so the first linkage
// tree is the deterministic all-tie merge order.
double snap_tiny(double v) { return std::abs(v) <= 1e-12 ? 0.0 : v; }

}  // namespace

double biased_mi(const FrequencyModel& model, const BiasCoefficients& bias, int i, int j) {
  if (i == j) return 1.0;
  // A location that was deterministic at capture carries no linkage signal:
  // its pairs stay at zero, so it merges last.
  if (bias.beta_loc[i] == 0.0 || bias.beta_loc[j] == 0.0) return 0.0;
  return snap_tiny(bias.beta_loc[i] * entropy(model, i) + bias.beta_loc[j] * entropy(model, j) -
                   bias.pair(i, j) * joint_entropy(model, i, j));
}

std::vector<double> similarity_matrix_mi(const FrequencyModel& model) {
  const int ell = model.locations();
  std::vector<double> h(ell);
  for (int i = 0; i < ell; ++i) h[i] = entropy(model, i);

  std::vector<double> sim(static_cast<std::size_t>(ell) * ell, 0.0);
  for (int i = 0; i < ell; ++i) {
    sim[static_cast<std::size_t>(i) * ell + i] = h[i];
    for (int j = i + 1; j < ell; ++j) {
      double mi = h[i] + h[j] - joint_entropy(model, i, j);
      sim[static_cast<std::size_t>(i) * ell + j] = mi;
      sim[static_cast<std::size_t>(j) * ell + i] = mi;
    }
  }
  return sim;
}

std::vector<double> similarity_matrix_biased_mi(const FrequencyModel& model,
                                                const BiasCoefficients& bias) {
  const int ell = model.locations();
  std::vector<double> h(ell);
  for (int i = 0; i < ell; ++i) h[i] = entropy(model, i);

  std::vector<double> sim(static_cast<std::size_t>(ell) * ell, 1.0);
  for (int i = 0; i < ell; ++i) {
    for (int j = i + 1; j < ell; ++j) {
      double v = 0.0;
      if (bias.beta_loc[i] != 0.0 && bias.beta_loc[j] != 0.0)
        v = snap_tiny(bias.beta_loc[i] * h[i] + bias.beta_loc[j] * h[j] -
                      bias.pair(i, j) * joint_entropy(model, i, j));
      sim[static_cast<std::size_t>(i) * ell + j] = v;
      sim[static_cast<std::size_t>(j) * ell + i] = v;
    }
  }
  return sim;
}

}  // namespace gpg
