#pragma once

// Statistical checks built from the convergence proof's objects: the
// mean-zero martingale with its exactly computed compensator, the
// pair-covariance error term, variance decay of <Z, phi>, and the headline
// law-of-large-numbers verdict.

#include <cstdint>
#include <string>
#include <vector>

#include "treechain/engine.hpp"
#include "treechain/kernels.hpp"
#include "treechain/limits.hpp"
#include "treechain/measures.hpp"
#include "treechain/test_function.hpp"

namespace treechain {

// Number of generations observed by time t at scale n: [n t].
std::uint32_t generations_at(std::uint64_t n, double t);

struct MartingalePath {
  std::uint64_t n = 0;
  std::vector<double> times;        // j / n
  std::vector<double> values;       // M_j, M_0 = 0
  std::vector<double> compensator;  // sum_{i<=j} <Z_{i-1}, P_R phi - phi>
};

// One full-tree run; the compensator increment at step j is the exact
// conditional expectation <Z_{j-1}, P_R phi - phi> (no nested Monte Carlo),
// so M is a mean-zero martingale by construction. Requires the exact walk
// operator and [nT] within the generation cap.
MartingalePath martingale_path(const KernelFamily& kernel, double x0,
                               const TestFunction& phi, double horizon,
                               const VertexRngPolicy& policy, int workers = 1,
                               std::uint32_t cap = kDefaultFullTreeCap);

struct MartingaleEnsemble {
  std::uint64_t n = 0;
  int replicates = 0;
  std::vector<double> terminal;  // M_T per replicate
  std::vector<double> sup_abs;   // sup_{s <= T} |M_s| per replicate
  double mean_terminal = 0.0;
  double se_terminal = 0.0;
};

MartingaleEnsemble martingale_ensemble(const KernelFamily& kernel, double x0,
                                       const TestFunction& phi, double horizon,
                                       int replicates,
                                       const VertexRngPolicy& policy,
                                       int workers = 1,
                                       std::uint32_t cap = kDefaultFullTreeCap);

struct DecayRow {
  std::uint64_t n = 0;
  double value = 0.0;  // median sup |M| or Var<Z, phi>
  double lo = 0.0;
  double hi = 0.0;
};

// Median of sup |M| per scale; requires >= 30 replicates.
std::vector<DecayRow> martingale_sup_decay(const KernelFamily& kernel, double x0,
                                           const TestFunction& phi, double horizon,
                                           const std::vector<std::uint64_t>& n_list,
                                           int replicates,
                                           const VertexRngPolicy& policy,
                                           int workers = 1,
                                           std::uint32_t cap = kDefaultFullTreeCap);

struct PairCovReport {
  std::uint64_t n = 0;
  double t = 0.0;
  std::string phi;
  int replicates = 0;
  double estimate = 0.0;  // Cov[phi(X_S1), phi(X_S2)], S1 != S2 uniform
  double lo = 0.0;        // bootstrap percentile interval
  double hi = 0.0;
  // Analytic bound 2 sup|phi|^2 2^-[nt] on the non-covariance remainder of
  // the error term, with sup|phi| taken over the observed sample (reported,
  // not estimated; it is unmeasurably small for large [nt]).
  double remainder_bound = 0.0;
  bool phi_bounded = true;
};

// Distinct uniform leaf pairs (rejection on collision) simulated jointly at
// depth [nt]; one pair per replicate. Depth may exceed the full-tree cap.
PairCovReport pair_covariance(const KernelFamily& kernel, double x0, double t,
                              const TestFunction& phi, int replicates,
                              const VertexRngPolicy& policy, int workers = 1);

// Unbiased sample variance of <Z_[nt], phi> over full-tree replicates, per
// scale in n_list, with bootstrap intervals. When samples_out is non-null it
// receives the raw replicate values of <Z, phi> per scale (for moment
// estimates and the product-form test).
std::vector<DecayRow> variance_decay(const KernelFamily& kernel, double x0,
                                     const TestFunction& phi, double t,
                                     const std::vector<std::uint64_t>& n_list,
                                     int replicates, const VertexRngPolicy& policy,
                                     int workers = 1,
                                     std::uint32_t cap = kDefaultFullTreeCap,
                                     std::vector<std::vector<double>>* samples_out = nullptr);

struct LlnVerdict {
  std::string family;
  std::uint64_t n = 0;
  double t = 0.0;
  std::uint64_t m = 0;
  std::string distance_kind;  // "ks" or "tv"
  double distance = 0.0;
  double threshold = 0.0;
  bool pass = false;
  double second_moment = 0.0;  // <Z^, x^2> of the sampled surrogate
  double prob_zero = 0.0;      // empirical P(X = 0) (discrete laws)
};

// Samples m uniform leaves of T_[nt] jointly (one spanning subtree), builds
// the m-atom surrogate of Z_t, and compares it to the analytic limit law:
// KS for continuous laws, TV for discrete ones. Requires m >= 1000. When
// atoms_out is non-null it receives the surrogate's atoms.
LlnVerdict lln_check(const KernelFamily& kernel, double x0, double t,
                     std::uint64_t m, const LimitLaw& law, double threshold,
                     const VertexRngPolicy& policy,
                     std::vector<double>* atoms_out = nullptr);

}  // namespace treechain
