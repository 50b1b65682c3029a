#pragma once

// Empirical measures, integration <Z, phi>, distribution distances, and the
// deterministic-measure (product-form second moment) test.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "treechain/engine.hpp"
#include "treechain/rng.hpp"
#include "treechain/test_function.hpp"

namespace treechain {

// Uniform-weight atom collection; total mass 1. Nonempty by construction.
struct EmpiricalMeasure {
  std::vector<double> atoms;

  static EmpiricalMeasure from_atoms(std::vector<double> atoms);
  [[nodiscard]] std::size_t size() const { return atoms.size(); }
};

EmpiricalMeasure empirical_from_buffer(const GenerationBuffer& g);
EmpiricalMeasure empirical_from_leaves(std::span<const double> leaf_states);

// <Z, phi>: the mean of phi over atoms, evaluated with the canonical
// blocked reduction (SIMD-accelerated for the built-in phi kinds).
double integrate(const EmpiricalMeasure& z, const TestFunction& phi);

// sup_x |F_Z(x) - F(x)| for a right-continuous target CDF. When the target
// itself has jumps (point masses), pass its left-limit x -> F(x-) as well;
// omitting it is exact for continuous targets.
double ks_distance(const EmpiricalMeasure& z,
                   const std::function<double(double)>& cdf,
                   const std::function<double(double)>& cdf_left = {});

// (1/2) sum_j |freq_j - pmf_j| over all nonnegative integers, the mass of
// pmf beyond the empirical support included. Atoms must be nonnegative
// integers.
double tv_distance_discrete(const EmpiricalMeasure& z,
                            const std::function<double(std::uint64_t)>& pmf);

// First and second moment-measure pairings estimated from replicate values
// of <Z, phi1> and <Z, phi2>.
struct MomentEstimates {
  double first1 = 0.0;  // E<Z, phi1>
  double first1_se = 0.0;
  double first2 = 0.0;  // E<Z, phi2>
  double first2_se = 0.0;
  double second = 0.0;  // E[<Z, phi1><Z, phi2>]
  double second_se = 0.0;
  int replicates = 0;
};

MomentEstimates estimate_moments(std::span<const double> a,
                                 std::span<const double> b);

struct GapEstimate {
  double gap = 0.0;  // E[<Z,phi1><Z,phi2>] - E<Z,phi1> E<Z,phi2>
  double lo = 0.0;   // bootstrap percentile interval
  double hi = 0.0;
  int replicates = 0;
};

// Product-form test of the second moment measure: the gap is a covariance
// and vanishes exactly for measures that are deterministic across
// replicates. Requires >= 30 replicate pairs of <Z,phi1>, <Z,phi2>.
GapEstimate product_form_gap(std::span<const double> a, std::span<const double> b,
                             rng::Stream& bootstrap_stream,
                             int bootstrap_rounds = 1000);

}  // namespace treechain
