#pragma once

#include <cstdint>
#include <vector>

#include "gpg/rng.hpp"

namespace gpg {

// Family of Subsets over genotype locations {0..ell-1}, arranged as a
// binary merge hierarchy: the first ell entries are the singletons, each
// later entry is the disjoint union of its two children, the last entry is
// the full location set. 2*ell - 1 subsets in total.
struct Fos {
  int ell = 0;
  std::vector<std::vector<std::int32_t>> subsets;        // members sorted ascending
  std::vector<std::pair<std::int32_t, std::int32_t>> children;  // (-1,-1) for singletons

  int size() const { return static_cast<int>(subsets.size()); }
  bool is_full_set(int i) const { return static_cast<int>(subsets[i].size()) == ell; }
};

// Linkage tree by UPGMA over a symmetric ell x ell similarity matrix
// (row-major). Clusters with maximal similarity merge first; similarity to
// a merged cluster is the size-weighted mean of the parts. Ties break
// toward the smallest lexicographic cluster-id pair. Implemented with
// reciprocal nearest-neighbor chains in O(ell^2) total.
Fos build_linkage_tree(const std::vector<double>& similarity, int ell);

// Same structural shape, built by merging uniformly random cluster pairs.
Fos build_random_tree(Rng& rng, int ell);

bool fos_structure_valid(const Fos& fos);

}  // namespace gpg
