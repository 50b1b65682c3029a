#include "treechain/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "treechain/parallel.hpp"
#include "treechain/simd/ops.hpp"
#include "treechain/stats.hpp"

namespace treechain {

std::uint32_t generations_at(std::uint64_t n, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("generations_at: t must be >= 0");
  const double g = std::floor(static_cast<double>(n) * t);
  if (g > 4e9) throw std::invalid_argument("generations_at: [n t] out of range");
  return static_cast<std::uint32_t>(g);
}

MartingalePath martingale_path(const KernelFamily& kernel, double x0,
                               const TestFunction& phi, double horizon,
                               const VertexRngPolicy& policy, int workers,
                               std::uint32_t cap) {
  if (!kernel.has_exact_walk_operator(phi))
    throw std::domain_error(
        "martingale_path: the compensator needs the exact walk operator");
  const std::uint32_t steps = generations_at(kernel.scale(), horizon);

  std::vector<double> zphi(steps + 1), excess_mean(steps + 1);
  simulate_full_tree(
      kernel, x0, steps, policy,
      [&](std::uint32_t k, std::span<const double> states) {
        const EmpiricalMeasure z{{states.begin(), states.end()}};
        zphi[k] = integrate(z, phi);
        if (k < steps)
          excess_mean[k] =
              simd::blocked_accumulate(
                  states.size(),
                  [&](std::size_t i) { return kernel.walk_excess(phi, states[i]); }) /
              static_cast<double>(states.size());
      },
      workers, cap);

  MartingalePath path;
  path.n = kernel.scale();
  path.times.resize(steps + 1);
  path.values.resize(steps + 1);
  path.compensator.resize(steps + 1);
  double comp = 0.0;
  for (std::uint32_t j = 0; j <= steps; ++j) {
    path.times[j] = static_cast<double>(j) / static_cast<double>(kernel.scale());
    path.compensator[j] = comp = (j == 0 ? 0.0 : comp + excess_mean[j - 1]);
    path.values[j] = zphi[j] - zphi[0] - comp;
  }
  return path;
}

MartingaleEnsemble martingale_ensemble(const KernelFamily& kernel, double x0,
                                       const TestFunction& phi, double horizon,
                                       int replicates,
                                       const VertexRngPolicy& policy, int workers,
                                       std::uint32_t cap) {
  if (replicates < 2)
    throw std::invalid_argument("martingale_ensemble: need >= 2 replicates");
  MartingaleEnsemble e;
  e.n = kernel.scale();
  e.replicates = replicates;
  e.terminal.resize(replicates);
  e.sup_abs.resize(replicates);
  parallel_for(static_cast<std::uint64_t>(replicates), workers, [&](std::uint64_t r) {
    const MartingalePath p =
        martingale_path(kernel, x0, phi, horizon, policy.replicate(r), 1, cap);
    e.terminal[r] = p.values.back();
    double sup = 0.0;
    for (const double v : p.values) sup = std::max(sup, std::fabs(v));
    e.sup_abs[r] = sup;
  });
  e.mean_terminal = stats::mean(e.terminal);
  e.se_terminal = std::sqrt(stats::sample_variance(e.terminal) /
                            static_cast<double>(replicates));
  return e;
}

std::vector<DecayRow> martingale_sup_decay(const KernelFamily& kernel, double x0,
                                           const TestFunction& phi, double horizon,
                                           const std::vector<std::uint64_t>& n_list,
                                           int replicates,
                                           const VertexRngPolicy& policy,
                                           int workers, std::uint32_t cap) {
  if (replicates < 30)
    throw std::invalid_argument("martingale_sup_decay: need >= 30 replicates");
  if (n_list.empty())
    throw std::invalid_argument("martingale_sup_decay: empty scale list");
  std::vector<DecayRow> rows;
  rows.reserve(n_list.size());
  for (const std::uint64_t n : n_list) {
    const MartingaleEnsemble e = martingale_ensemble(
        kernel.with_scale(n), x0, phi, horizon, replicates, policy, workers, cap);
    rows.push_back({n, stats::median(e.sup_abs), 0.0, 0.0});
  }
  return rows;
}

PairCovReport pair_covariance(const KernelFamily& kernel, double x0, double t,
                              const TestFunction& phi, int replicates,
                              const VertexRngPolicy& policy, int workers) {
  if (replicates < 30)
    throw std::invalid_argument("pair_covariance: need >= 30 replicates");
  const std::uint32_t d = generations_at(kernel.scale(), t);
  if (d == 0)
    throw std::invalid_argument(
        "pair_covariance: [n t] = 0 has a single vertex; no distinct pairs");

  std::vector<double> a(replicates), b(replicates);
  double sup_abs_phi = 0.0;
  std::vector<double> sup_by_rep(replicates);
  parallel_for(static_cast<std::uint64_t>(replicates), workers, [&](std::uint64_t r) {
    const VertexRngPolicy rep = policy.replicate(r);
    rng::Stream leaf_stream = rep.labeled_stream(rng::salt::kLeafSampling, 0);
    const Vertex v1 = sample_leaf(d, leaf_stream);
    Vertex v2 = sample_leaf(d, leaf_stream);
    while (v2 == v1) v2 = sample_leaf(d, leaf_stream);  // collision prob 2^-d
    const Vertex pair[2] = {v1, v2};
    const auto states = simulate_leaves_joint(kernel, x0, {pair, 2}, rep);
    a[r] = phi(states[0]);
    b[r] = phi(states[1]);
    sup_by_rep[r] = std::max(std::fabs(a[r]), std::fabs(b[r]));
  });
  for (const double s : sup_by_rep) sup_abs_phi = std::max(sup_abs_phi, s);

  PairCovReport report;
  report.n = kernel.scale();
  report.t = t;
  report.phi = phi.name();
  report.replicates = replicates;
  report.estimate = stats::covariance(a, b);
  rng::Stream boot = policy.labeled_stream(rng::salt::kBootstrap, 0);
  const auto iv = stats::bootstrap_interval_paired(
      a, b,
      [](std::span<const double> ra, std::span<const double> rb) {
        return stats::covariance(ra, rb);
      },
      1000, boot);
  report.lo = iv.lo;
  report.hi = iv.hi;
  report.remainder_bound =
       2.0 * sup_abs_phi * sup_abs_phi * std::ldexp(1.0, -static_cast<int>(std::min<std::uint32_t>(d, 2000)));
  report.phi_bounded = phi.is_bounded();
  return report;
}

std::vector<DecayRow> variance_decay(const KernelFamily& kernel, double x0,
                                     const TestFunction& phi, double t,
                                     const std::vector<std::uint64_t>& n_list,
                                     int replicates, const VertexRngPolicy& policy,
                                     int workers, std::uint32_t cap,
                                     std::vector<std::vector<double>>* samples_out) {
  if (replicates < 30)
    throw std::invalid_argument("variance_decay: need >= 30 replicates");
  if (n_list.empty())
    throw std::invalid_argument("variance_decay: empty scale list");
  std::vector<DecayRow> rows;
  rows.reserve(n_list.size());
  if (samples_out) samples_out->clear();
  for (const std::uint64_t n : n_list) {
    const KernelFamily scaled = kernel.with_scale(n);
    const std::uint32_t d = generations_at(n, t);
    std::vector<double> values(replicates);
    parallel_for(static_cast<std::uint64_t>(replicates), workers, [&](std::uint64_t r) {
      const GenerationBuffer g =
          simulate_full_tree(scaled, x0, d, policy.replicate(r), {}, 1, cap);
      values[r] = integrate(empirical_from_buffer(g), phi);
    });
    DecayRow row;
    row.n = n;
    row.value = stats::sample_variance(values);
    rng::Stream boot = policy.labeled_stream(rng::salt::kBootstrap, n);
    const auto iv = stats::bootstrap_interval(
        values, [](std::span<const double> v) { return stats::sample_variance(v); },
        1000, boot);
    row.lo = iv.lo;
    row.hi = iv.hi;
    rows.push_back(row);
    if (samples_out) samples_out->push_back(std::move(values));
  }
  return rows;
}

LlnVerdict lln_check(const KernelFamily& kernel, double x0, double t,
                     std::uint64_t m, const LimitLaw& law, double threshold,
                     const VertexRngPolicy& policy,
                     std::vector<double>* atoms_out) {
  if (m < 1000) throw std::invalid_argument("lln_check: need m >= 1000 leaves");
  if (law.discrete() != kernel.integer_valued() &&
      law.kind() != LimitLaw::Kind::point_mass)
    throw std::invalid_argument(
        "lln_check: law kind does not match the kernel's state kind");
  const std::uint32_t d = generations_at(kernel.scale(), t);

  rng::Stream leaf_stream = policy.labeled_stream(rng::salt::kLeafSampling, 0);
  std::vector<Vertex> leaves;
  leaves.reserve(m);
  for (std::uint64_t i = 0; i < m; ++i) leaves.push_back(sample_leaf(d, leaf_stream));
  const auto states = simulate_leaves_joint(kernel, x0, leaves, policy);
  const EmpiricalMeasure z = empirical_from_leaves(states);

  LlnVerdict verdict;
  verdict.family = kernel.describe();
  verdict.n = kernel.scale();
  verdict.t = t;
  verdict.m = m;
  verdict.threshold = threshold;
  verdict.second_moment = integrate(z, TestFunction::square());
  if (law.discrete()) {
    verdict.distance_kind = "tv";
    verdict.distance =
        tv_distance_discrete(z, [&](std::uint64_t j) { return law.pmf(j); });
    const auto& ops = simd::active_ops();
    const double at_least_0 = ops.sum_indicator_ge(z.atoms.data(), z.atoms.size(), 0.0);
    const double at_least_1 = ops.sum_indicator_ge(z.atoms.data(), z.atoms.size(), 1.0);
    verdict.prob_zero = (at_least_0 - at_least_1) / static_cast<double>(z.atoms.size());
  } else {
    verdict.distance_kind = "ks";
    verdict.distance = ks_distance(z, [&](double x) { return law.cdf(x); },
                                   [&](double x) { return law.cdf_left(x); });
  }
  verdict.pass = verdict.distance < threshold;
  if (atoms_out) *atoms_out = z.atoms;
  return verdict;
}

}  // namespace treechain
