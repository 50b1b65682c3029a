#pragma once

// Brute-force enumeration oracles for lattice kernels at small generation
// counts. These walk the full joint outcome space of the tree (and,
// independently, of the observed walk), so they share no code path with the
// simulation engine and serve as its exact reference.

#include <cstdint>

#include "treechain/kernels.hpp"
#include "treechain/test_function.hpp"

namespace treechain {

// E<Z_k, phi>: enumerate every assignment of child-pair outcomes to the
// 2^k - 1 internal vertices. Throws when the kernel has no finite joint
// support or the outcome space exceeds the enumeration budget (~2^24).
double enumerate_tree_expectation(const KernelFamily& kernel, double x0,
                                  std::uint32_t k, const TestFunction& phi);

// E[phi(R_k)]: enumerate walk increment sequences. Independent of the tree
// enumeration; equality of the two is the tree-vs-walk mean identity under test.
double enumerate_walk_expectation(const KernelFamily& kernel, double x0,
                                  std::uint32_t k, const TestFunction& phi);

struct SecondMomentDecomposition {
  double mean = 0.0;                   // E<Z_k, phi>
  double mean_square = 0.0;            // E[<Z_k, phi>^2]
  double pair_product_distinct = 0.0;  // E[phi(X_S1) phi(X_S2)], S1 != S2 uniform
  double marginal_square = 0.0;        // E[phi^2(X_S1)]
};

// Exact ingredients of the second-moment decomposition
//   E[<Z_k,phi>^2] = E[phi phi'] + 2^-k (E[phi^2] - E[phi phi']).
// Requires k >= 1 (distinct pairs need at least two leaves).
SecondMomentDecomposition enumerate_second_moment(const KernelFamily& kernel,
                                                  double x0, std::uint32_t k,
                                                  const TestFunction& phi);

}  // namespace treechain
