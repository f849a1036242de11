#pragma once

#include <vector>

#include "gpg/eval.hpp"
#include "gpg/genotype.hpp"
#include "gpg/rng.hpp"
#include "gpg/symbol.hpp"
#include "gpg/tree_template.hpp"

namespace gpgbench {

inline gpg::Matrix random_features(gpg::Rng& rng, int rows, int cols) {
  gpg::Matrix m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m.at(i, j) = gpg::uniform_real(rng, -5.0, 5.0);
  return m;
}

inline std::vector<gpg::GenotypeTree> random_population(gpg::Rng& rng,
                                                        const gpg::TreeTemplate& tpl,
                                                        const gpg::SymbolSet& sets, int n) {
  std::vector<gpg::GenotypeTree> pop;
  pop.reserve(n);
  for (int i = 0; i < n; ++i) pop.push_back(gpg::init_half_and_half(rng, tpl, sets));
  return pop;
}

}  // namespace gpgbench
