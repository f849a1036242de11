#include "gpg/fos.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gpg {

namespace {

// Shared cluster bookkeeping for both builders. Cluster ids follow creation
// order, so they coincide with FOS subset indices.
struct ClusterForest {
  Fos fos;
  std::vector<int> sizes;
  std::vector<int> active;  // cluster ids, kept sorted ascending

  explicit ClusterForest(int ell) {
    fos.ell = ell;
    fos.subsets.reserve(2 * ell - 1);
    fos.children.reserve(2 * ell - 1);
    sizes.reserve(2 * ell - 1);
    active.reserve(ell);
    for (int i = 0; i < ell; ++i) {
      fos.subsets.push_back({i});
      fos.children.emplace_back(-1, -1);
      sizes.push_back(1);
      active.push_back(i);
    }
  }

  int merge(int a, int b) {
    if (a > b) std::swap(a, b);
    std::vector<std::int32_t> merged;
    merged.reserve(fos.subsets[a].size() + fos.subsets[b].size());
    std::merge(fos.subsets[a].begin(), fos.subsets[a].end(), fos.subsets[b].begin(),
               fos.subsets[b].end(), std::back_inserter(merged));
    int id = static_cast<int>(fos.subsets.size());
    fos.subsets.push_back(std::move(merged));
    fos.children.emplace_back(a, b);
    sizes.push_back(sizes[a] + sizes[b]);
    active.erase(std::remove_if(active.begin(), active.end(),
                                [&](int c) { return c == a || c == b; }),
                 active.end());
    active.push_back(id);
    return id;
  }
};

}  // namespace

Fos build_linkage_tree(const std::vector<double>& similarity, int ell) {
  if (ell < 1) throw std::invalid_argument("build_linkage_tree: ell >= 1 required");
  if (static_cast<int>(similarity.size()) != ell * ell)
    throw std::invalid_argument("build_linkage_tree: similarity must be ell x ell");
  for (int i = 0; i < ell; ++i)
    for (int j = 0; j < ell; ++j)
      if (i != j && !std::isfinite(similarity[static_cast<std::size_t>(i) * ell + j]))
        throw std::invalid_argument("build_linkage_tree: non-finite similarity entry");

  ClusterForest forest(ell);
  const int max_clusters = 2 * ell - 1;

  // Similarity between clusters, grown as merges create new ids.
  std::vector<double> sim(static_cast<std::size_t>(max_clusters) * max_clusters, 0.0);
  auto s = [&](int a, int b) -> double& {
    return sim[static_cast<std::size_t>(a) * max_clusters + b];
  };
  for (int i = 0; i < ell; ++i)
    for (int j = 0; j < ell; ++j)
      if (i != j) s(i, j) = similarity[static_cast<std::size_t>(i) * ell + j];

  // Nearest = maximal similarity; ties toward the smallest cluster id.
  auto nearest = [&](int c) {
    int best = -1;
    double best_sim = 0.0;
    for (int other : forest.active) {
      if (other == c) continue;
      double v = s(c, other);
      if (best == -1 || v > best_sim) {
        best = other;
        best_sim = v;
      }
    }
    return best;
  };

  std::vector<int> chain;
  chain.reserve(ell);
  while (forest.active.size() > 1) {
    if (chain.empty()) chain.push_back(forest.active.front());
    int top = chain.back();
    int nn = nearest(top);
    if (chain.size() >= 2 && nn == chain[chain.size() - 2]) {
      chain.pop_back();
      chain.pop_back();
      int a = std::min(top, nn);
      int b = std::max(top, nn);
      int wa = forest.sizes[a];
      int wb = forest.sizes[b];
      int m = forest.merge(a, b);
      for (int c : forest.active) {
        if (c == m) continue;
        double v = (wa * s(c, a) + wb * s(c, b)) / (wa + wb);
        s(c, m) = v;
        s(m, c) = v;
      }
    } else {
      chain.push_back(nn);
    }
  }
  return std::move(forest.fos);
}

Fos build_random_tree(Rng& rng, int ell) {
  if (ell < 1) throw std::invalid_argument("build_random_tree: ell >= 1 required");
  ClusterForest forest(ell);
  while (forest.active.size() > 1) {
    std::size_t k = forest.active.size();
    std::size_t ia = uniform_index(rng, k);
    std::size_t ib = uniform_index(rng, k - 1);
    if (ib >= ia) ++ib;
    forest.merge(forest.active[ia], forest.active[ib]);
  }
  return std::move(forest.fos);
}

bool fos_structure_valid(const Fos& fos) {
  const int ell = fos.ell;
  if (fos.size() != 2 * ell - 1) return false;
  for (int i = 0; i < ell; ++i)
    if (fos.subsets[i] != std::vector<std::int32_t>{i}) return false;
  int full_sets = 0;
  for (int i = 0; i < fos.size(); ++i) {
    const auto& sub = fos.subsets[i];
    if (!std::is_sorted(sub.begin(), sub.end())) return false;
    if (std::adjacent_find(sub.begin(), sub.end()) != sub.end()) return false;
    if (sub.empty() || sub.front() < 0 || sub.back() >= ell) return false;
    if (static_cast<int>(sub.size()) == ell) ++full_sets;
    auto [a, b] = fos.children[i];
    if (i < ell) {
      if (a != -1 || b != -1) return false;
    } else {
      if (a < 0 || b < 0 || a >= i || b >= i || a == b) return false;
      std::vector<std::int32_t> merged;
      std::merge(fos.subsets[a].begin(), fos.subsets[a].end(), fos.subsets[b].begin(),
                 fos.subsets[b].end(), std::back_inserter(merged));
      if (merged != sub) return false;  // also fails on overlap (duplicates)
    }
  }
  return full_sets == 1;
}

}  // namespace gpg
