#include "treechain/enumeration.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace treechain {

namespace {

constexpr double kBudget = 1.0 * (1 << 24);

void check_budget(std::size_t outcomes, std::uint64_t vertices) {
  if (std::pow(static_cast<double>(outcomes), static_cast<double>(vertices)) > kBudget)
    throw std::invalid_argument(
        "enumeration: outcome space exceeds the brute-force budget");
}

struct Accumulators {
  double mean = 0.0;
  double mean_square = 0.0;
  double pair_product = 0.0;
  double marginal_square = 0.0;
};

struct TreeEnumerator {
  const std::vector<MixtureRow>& support;
  std::uint32_t k;
  const TestFunction& phi;
  Accumulators acc;

  void contribute(const std::vector<double>& leaves, double prob) {
    const double m = static_cast<double>(leaves.size());
    double s = 0.0, s2 = 0.0;
    for (const double x : leaves) {
      const double v = phi(x);
      s += v;
      s2 += v * v;
    }
    const double zphi = s / m;
    acc.mean += prob * zphi;
    acc.mean_square += prob * zphi * zphi;
    acc.marginal_square += prob * (s2 / m);
    if (leaves.size() > 1)
      acc.pair_product += prob * (s * s - s2) / (m * (m - 1.0));
  }

  void level(std::uint32_t g, const std::vector<double>& states, double prob) {
    if (g == k) {
      contribute(states, prob);
      return;
    }
    std::vector<double> next(states.size() * 2);
    parent(g, 0, states, next, prob);
  }

  void parent(std::uint32_t g, std::size_t i, const std::vector<double>& states,
              std::vector<double>& next, double prob) {
    if (i == states.size()) {
      level(g + 1, next, prob);
      return;
    }
    for (const MixtureRow& row : support) {
      next[2 * i] = states[i] + row.shift0;
      next[2 * i + 1] = states[i] + row.shift1;
      parent(g, i + 1, states, next, prob * row.prob);
    }
  }
};

Accumulators enumerate_tree(const KernelFamily& kernel, double x0, std::uint32_t k,
                            const TestFunction& phi) {
  const auto support = kernel.joint_support();
  if (k > 10) throw std::invalid_argument("enumeration: k too large");
  check_budget(support.size(), (1ull << k) - 1);
  TreeEnumerator e{support, k, phi, {}};
  e.level(0, {x0}, 1.0);
  return e.acc;
}

double walk_rec(const std::vector<std::pair<double, double>>& support, double x,
                std::uint32_t left, const TestFunction& phi) {
  if (left == 0) return phi(x);
  double acc = 0.0;
  for (const auto& [delta, p] : support)
    acc += p * walk_rec(support, x + delta, left - 1, phi);
  return acc;
}

}  // namespace

double enumerate_tree_expectation(const KernelFamily& kernel, double x0,
                                  std::uint32_t k, const TestFunction& phi) {
  return enumerate_tree(kernel, x0, k, phi).mean;
}

double enumerate_walk_expectation(const KernelFamily& kernel, double x0,
                                  std::uint32_t k, const TestFunction& phi) {
  if (!kernel.walk_support_finite())
    throw std::invalid_argument("enumeration: walk support is not finite");
  const auto support = kernel.walk_support();
  check_budget(support.size(), k);
  return walk_rec(support, x0, k, phi);
}

SecondMomentDecomposition enumerate_second_moment(const KernelFamily& kernel,
                                                  double x0, std::uint32_t k,
                                                  const TestFunction& phi) {
  if (k == 0)
    throw std::invalid_argument(
        "enumerate_second_moment: distinct pairs need k >= 1");
  const Accumulators acc = enumerate_tree(kernel, x0, k, phi);
  return {acc.mean, acc.mean_square, acc.pair_product, acc.marginal_square};
}

}  // namespace treechain
