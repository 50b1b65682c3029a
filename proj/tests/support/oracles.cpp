#include "support/oracles.hpp"
#include <algorithm>
#include <cmath>
#include <vector>
namespace treechain::testsupport {
double two_sample_ks(std::span<const double> a, std::span<const double> b) {
  std::vector<double> sa(a.begin(), a.end()), sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < sa.size() && j < sb.size()) {
    if (sa[i] <= sb[j]) ++i; else ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / sa.size() -
                              static_cast<double>(j) / sb.size()));
  }
  return d;
}
double two_sample_ks_critical(std::size_t m, std::size_t n, double alpha) {
  const double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
  return c * std::sqrt((static_cast<double>(m) + n) / (static_cast<double>(m) * n));
}
}
