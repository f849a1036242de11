#pragma once

// Independent reference implementations used to check the engine. These
// deliberately avoid the library's own code paths: plain O(ell^3) scans,
// string-keyed histograms, long-double normal equations.

#include <span>
#include <string>
#include <vector>

#include "gpg/fos.hpp"
#include "gpg/genotype.hpp"
#include "gpg/linkage.hpp"

namespace gpg::test {

// Greedy UPGMA, scanning every active cluster pair each step; ties break
// toward the smallest lexicographic cluster-id pair (same rule as the
// engine). Returns each subset sorted ascending, in merge order after the
// singletons.
std::vector<std::vector<std::int32_t>> naive_upgma(const std::vector<double>& similarity,
                                                   int ell);

// Subset family as a canonical sorted list, for order-insensitive equality.
std::vector<std::vector<std::int32_t>> canonical_family(
    const std::vector<std::vector<std::int32_t>>& subsets);
std::vector<std::vector<std::int32_t>> canonical_family(const Fos& fos);

// String-keyed histogram entropies over a population of genotypes, with
// all-const semantics (every distinct constant bit pattern is a symbol).
double brute_entropy(std::span<const GenotypeTree> population, int location);
double brute_joint_entropy(std::span<const GenotypeTree> population, int i, int j);
double brute_mutual_information(std::span<const GenotypeTree> population, int i, int j);

// Least-squares (a, b) for y ~ a + b*p via long-double normal equations.
void normal_equations_fit(std::span<const double> y, std::span<const double> p, double& a,
                          double& b);
double normal_equations_scaled_mse(std::span<const double> y, std::span<const double> p);

}  // namespace gpg::test
