#pragma once

#include <vector>

#include "gpg/rng.hpp"
#include "gpg/symbol.hpp"
#include "gpg/tree_template.hpp"

namespace gpg {

// Fixed-template genotype: one symbol per template position, introns
// included. Positions at maximum depth always hold terminals.
struct GenotypeTree {
  int height = 0;
  int arity = 2;
  std::vector<Symbol> symbols;

  friend bool operator==(const GenotypeTree& a, const GenotypeTree& b) {
    return a.height == b.height && a.arity == b.arity && a.symbols == b.symbols;
  }
};

// Half-and-Half initialization: Full or Grow with probability 0.5 each.
// Every template position is filled, including introns.
GenotypeTree init_half_and_half(Rng& rng, const TreeTemplate& tpl, const SymbolSet& sets);

// Pre-order positions reachable from the root when each function consumes
// its arity-many leftmost children. Returned sorted ascending.
std::vector<std::int32_t> active_nodes(const TreeTemplate& tpl, const GenotypeTree& tree,
                                       const SymbolSet& sets);

// True iff the two trees differ on the active part of `after`: a change
// confined to introns is not a semantic change.
bool semantic_change_check(const TreeTemplate& tpl, const GenotypeTree& before,
                           const GenotypeTree& after, const SymbolSet& sets);

bool is_valid_genotype(const TreeTemplate& tpl, const GenotypeTree& tree, const SymbolSet& sets);

}  // namespace gpg
