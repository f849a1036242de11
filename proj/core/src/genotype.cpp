#include "gpg/genotype.hpp"

#include <algorithm>
#include <cmath>

namespace gpg {

namespace {

Symbol draw_terminal(Rng& rng, const SymbolSet& sets) {
  // The ERC counts as one extra terminal next to the features, so its
  // sampling probability is inversely proportional to the feature count.
  std::size_t options = static_cast<std::size_t>(sets.num_features) + (sets.erc ? 1 : 0);
  std::size_t pick = uniform_index(rng, options);
  if (sets.erc && pick == static_cast<std::size_t>(sets.num_features))
    return Symbol::constant(uniform_real(rng, sets.erc->lo, sets.erc->hi));
  return Symbol::feature(static_cast<std::uint16_t>(pick));
}

Symbol draw_function(Rng& rng, const SymbolSet& sets) {
  return Symbol::function(sets.functions[uniform_index(rng, sets.functions.size())].op);
}

}  // namespace

GenotypeTree init_half_and_half(Rng& rng, const TreeTemplate& tpl, const SymbolSet& sets) {
  GenotypeTree tree;
  tree.height = tpl.height();
  tree.arity = tpl.arity();
  tree.symbols.resize(tpl.size());
  bool full = coin(rng);
  for (int pos = 0; pos < tpl.size(); ++pos) {
    if (tpl.is_max_depth(pos)) {
      tree.symbols[pos] = draw_terminal(rng, sets);
    } else if (full) {
      tree.symbols[pos] = draw_function(rng, sets);
    } else {
      tree.symbols[pos] = coin(rng) ? draw_function(rng, sets) : draw_terminal(rng, sets);
    }
  }
  return tree;
}

std::vector<std::int32_t> active_nodes(const TreeTemplate& tpl, const GenotypeTree& tree,
                                       const SymbolSet& sets) {
  std::vector<std::int32_t> active;
  active.reserve(tpl.size());
  // Explicit stack; positions come out in ascending pre-order because each
  // node precedes its subtree and children are pushed right-to-left.
  std::vector<std::int32_t> stack{0};
  while (!stack.empty()) {
    std::int32_t pos = stack.back();
    stack.pop_back();
    active.push_back(pos);
    const Symbol& s = tree.symbols[pos];
    if (s.kind != SymbolKind::Function) continue;
    int consumed = sets.function_arity(s.id);
    for (int k = consumed - 1; k >= 0; --k) stack.push_back(tpl.child(pos, k));
  }
  // Pre-order DFS with leftmost child on top visits ascending positions.
  return active;
}

bool semantic_change_check(const TreeTemplate& tpl, const GenotypeTree& before,
                           const GenotypeTree& after, const SymbolSet& sets) {
  // Walk the active part of `after`; the active sets agree whenever the
  // symbols along the walk agree, so one pass covers both conditions.
  std::vector<std::int32_t> stack{0};
  while (!stack.empty()) {
    std::int32_t pos = stack.back();
    stack.pop_back();
    const Symbol& a = after.symbols[pos];
    if (!(a == before.symbols[pos])) return true;
    if (a.kind != SymbolKind::Function) continue;
    int consumed = sets.function_arity(a.id);
    for (int k = 0; k < consumed; ++k) stack.push_back(tpl.child(pos, k));
  }
  return false;
}

bool is_valid_genotype(const TreeTemplate& tpl, const GenotypeTree& tree, const SymbolSet& sets) {
  if (tree.height != tpl.height() || tree.arity != tpl.arity()) return false;
  if (static_cast<int>(tree.symbols.size()) != tpl.size()) return false;
  for (int pos = 0; pos < tpl.size(); ++pos) {
    const Symbol& s = tree.symbols[pos];
    switch (s.kind) {
      case SymbolKind::Function:
        if (tpl.is_max_depth(pos)) return false;
        if (sets.function_arity(s.id) > tpl.arity()) return false;
        break;
      case SymbolKind::Feature:
        if (static_cast<int>(s.id) >= sets.num_features) return false;
        break;
      case SymbolKind::Constant:
        if (!std::isfinite(s.value)) return false;
        break;
    }
  }
  return true;
}

}  // namespace gpg
