#include "treechain/measures.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "treechain/simd/ops.hpp"
#include "treechain/stats.hpp"

namespace treechain {

EmpiricalMeasure EmpiricalMeasure::from_atoms(std::vector<double> atoms) {
  if (atoms.empty())
    throw std::invalid_argument("EmpiricalMeasure: empty atom set");
  return {std::move(atoms)};
}

EmpiricalMeasure empirical_from_buffer(const GenerationBuffer& g) {
  return EmpiricalMeasure::from_atoms(g.states);
}

EmpiricalMeasure empirical_from_leaves(std::span<const double> leaf_states) {
  return EmpiricalMeasure::from_atoms({leaf_states.begin(), leaf_states.end()});
}

double integrate(const EmpiricalMeasure& z, const TestFunction& phi) {
  const auto& ops = simd::active_ops();
  const double* x = z.atoms.data();
  const std::size_t n = z.atoms.size();
  double total;
  switch (phi.kind()) {
    case TestFunction::Kind::identity: total = ops.sum(x, n); break;
    case TestFunction::Kind::square: total = ops.sum_square(x, n); break;
    case TestFunction::Kind::quartic: total = ops.sum_quartic(x, n); break;
    case TestFunction::Kind::indicator_ge:
      total = ops.sum_indicator_ge(x, n, phi.param());
      break;
    default:
      total = simd::blocked_accumulate(n, [&](std::size_t i) { return phi(x[i]); });
      break;
  }
  return total / static_cast<double>(n);
}

double ks_distance(const EmpiricalMeasure& z,
                   const std::function<double(double)>& cdf,
                   const std::function<double(double)>& cdf_left) {
  std::vector<double> sorted = z.atoms;
  std::sort(sorted.begin(), sorted.end());
  const double m = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    const double fl = cdf_left ? cdf_left(sorted[i]) : f;
    d = std::max(d, fl - static_cast<double>(i) / m);
    d = std::max(d, static_cast<double>(i + 1) / m - f);
  }
  return d;
}

double tv_distance_discrete(const EmpiricalMeasure& z,
                            const std::function<double(std::uint64_t)>& pmf) {
  std::uint64_t max_atom = 0;
  for (const double a : z.atoms) {
    if (!(a >= 0.0) || a != std::floor(a) || a > 1e15)
      throw std::invalid_argument(
          "tv_distance_discrete: atoms must be nonnegative integers");
    max_atom = std::max(max_atom, static_cast<std::uint64_t>(a));
  }
  std::vector<std::uint64_t> counts(max_atom + 1, 0);
  for (const double a : z.atoms) ++counts[static_cast<std::uint64_t>(a)];

  const double m = static_cast<double>(z.atoms.size());
  double sum = 0.0, pmf_mass = 0.0;
  for (std::uint64_t j = 0; j <= max_atom; ++j) {
    const double p = pmf(j);
    pmf_mass += p;
    sum += std::fabs(static_cast<double>(counts[j]) / m - p);
  }
  sum += std::max(0.0, 1.0 - pmf_mass);  // pmf tail beyond the empirical support
  return 0.5 * sum;
}

MomentEstimates estimate_moments(std::span<const double> a,
                                 std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2)
    throw std::invalid_argument("estimate_moments: need >= 2 aligned replicates");
  MomentEstimates m;
  m.replicates = static_cast<int>(a.size());
  const double n = static_cast<double>(a.size());
  std::vector<double> prod(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) prod[i] = a[i] * b[i];
  m.first1 = stats::mean(a);
  m.first2 = stats::mean(b);
  m.second = stats::mean(prod);
  m.first1_se = std::sqrt(stats::sample_variance(a) / n);
  m.first2_se = std::sqrt(stats::sample_variance(b) / n);
  m.second_se = std::sqrt(stats::sample_variance(prod) / n);
  return m;
}

GapEstimate product_form_gap(std::span<const double> a, std::span<const double> b,
                             rng::Stream& bootstrap_stream, int bootstrap_rounds) {
  if (a.size() != b.size())
    throw std::invalid_argument("product_form_gap: replicate lists differ in length");
  if (a.size() < 30)
    throw std::invalid_argument("product_form_gap: need >= 30 replicates");
  GapEstimate g;
  g.replicates = static_cast<int>(a.size());
  g.gap = stats::covariance(a, b);
  const auto iv = stats::bootstrap_interval_paired(
      a, b,
      [](std::span<const double> ra, std::span<const double> rb) {
        return stats::covariance(ra, rb);
      },
      bootstrap_rounds, bootstrap_stream);
  g.lo = iv.lo;
  g.hi = iv.hi;
  return g;
}

}  // namespace treechain
