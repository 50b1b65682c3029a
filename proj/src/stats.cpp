#include "treechain/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "treechain/simd/ops.hpp"

namespace treechain::stats {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double poisson_pmf(std::uint64_t j, double mu) {
  if (!(mu >= 0.0)) throw std::invalid_argument("poisson_pmf: negative mean");
  if (mu == 0.0) return j == 0 ? 1.0 : 0.0;
  // log-space to stay finite for large j or mu
  const double logp = -mu + static_cast<double>(j) * std::log(mu) -
                      std::lgamma(static_cast<double>(j) + 1.0);
  return std::exp(logp);
}

namespace {

// Series representation of P(a,x), valid for x < a + 1.
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int i = 0; i < 500; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction for Q(a,x) (modified Lentz), valid for x >= a + 1.
double gamma_q_cf(double a, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double gamma_p(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw std::invalid_argument("gamma_p: bad arguments");
  if (x == 0.0) return 0.0;
  return x < a + 1.0 ? gamma_p_series(a, x) : 1.0 - gamma_q_cf(a, x);
}

double gamma_q(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw std::invalid_argument("gamma_q: bad arguments");
  if (x == 0.0) return 1.0;
  return x < a + 1.0 ? 1.0 - gamma_p_series(a, x) : gamma_q_cf(a, x);
}

double chi_square_sf(double statistic, int dof) {
  if (dof <= 0) throw std::invalid_argument("chi_square_sf: dof must be positive");
  return gamma_q(0.5 * dof, 0.5 * statistic);
}

ChiSquare chi_square_gof(std::span<const std::uint64_t> counts,
                         std::span<const double> probs) {
  if (counts.size() != probs.size() || counts.size() < 2)
    throw std::invalid_argument("chi_square_gof: need >= 2 aligned cells");
  std::uint64_t total = 0;
  for (const auto c : counts) total += c;
  if (total == 0) throw std::invalid_argument("chi_square_gof: empty sample");
  ChiSquare r;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double expected = probs[i] * static_cast<double>(total);
    if (!(expected > 0.0))
      throw std::invalid_argument("chi_square_gof: zero expected cell");
    const double diff = static_cast<double>(counts[i]) - expected;
    r.statistic += diff * diff / expected;
  }
  r.dof = static_cast<int>(counts.size()) - 1;
  r.p_value = chi_square_sf(r.statistic, r.dof);
  return r;
}

double mean(std::span<const double> v) {
  if (v.empty()) throw std::invalid_argument("mean: empty sample");
  return simd::active_ops().sum(v.data(), v.size()) / static_cast<double>(v.size());
}

double sample_variance(std::span<const double> v) {
  if (v.size() < 2) throw std::invalid_argument("sample_variance: need >= 2 values");
  const double m = mean(v);
  const double ss = simd::blocked_accumulate(v.size(), [&](std::size_t i) {
    const double d = v[i] - m;
    return d * d;
  });
  return ss / static_cast<double>(v.size() - 1);
}

double median(std::span<const double> v) {
  if (v.empty()) throw std::invalid_argument("median: empty sample");
  std::vector<double> s(v.begin(), v.end());
  std::sort(s.begin(), s.end());
  const std::size_t n = s.size();
  return (n % 2 == 1) ? s[n / 2] : 0.5 * (s[n / 2 - 1] + s[n / 2]);
}

double covariance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2)
    throw std::invalid_argument("covariance: need >= 2 aligned pairs");
  const double a0 = a[0], b0 = b[0];
  const double n = static_cast<double>(a.size());
  const double sab = simd::blocked_accumulate(
      a.size(), [&](std::size_t i) { return (a[i] - a0) * (b[i] - b0); });
  const double sa =
      simd::blocked_accumulate(a.size(), [&](std::size_t i) { return a[i] - a0; });
  const double sb =
      simd::blocked_accumulate(b.size(), [&](std::size_t i) { return b[i] - b0; });
  return sab / n - (sa / n) * (sb / n);
}

namespace {

Interval percentiles(std::vector<double>& boots) {
  std::sort(boots.begin(), boots.end());
  const std::size_t n = boots.size();
  const std::size_t lo = (n * 25) / 1000;
  const std::size_t hi = (n * 975) / 1000;
  return {boots[lo], boots[hi >= n ? n - 1 : hi]};
}

}  // namespace

Interval bootstrap_interval(std::span<const double> values,
                            const std::function<double(std::span<const double>)>& stat,
                            int rounds, rng::Stream& stream) {
  if (values.empty() || rounds < 10)
    throw std::invalid_argument("bootstrap_interval: bad arguments");
  const std::size_t n = values.size();
  std::vector<double> resample(n), boots;
  boots.reserve(rounds);
  for (int r = 0; r < rounds; ++r) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto idx = static_cast<std::size_t>(stream.next_u01() * static_cast<double>(n));
      resample[i] = values[idx >= n ? n - 1 : idx];
    }
    boots.push_back(stat(resample));
  }
  return percentiles(boots);
}

Interval bootstrap_interval_paired(
    std::span<const double> a, std::span<const double> b,
    const std::function<double(std::span<const double>, std::span<const double>)>& stat,
    int rounds, rng::Stream& stream) {
  if (a.size() != b.size() || a.empty() || rounds < 10)
    throw std::invalid_argument("bootstrap_interval_paired: bad arguments");
  const std::size_t n = a.size();
  std::vector<double> ra(n), rb(n);
  std::vector<double> boots;
  boots.reserve(rounds);
  for (int r = 0; r < rounds; ++r) {
    for (std::size_t i = 0; i < n; ++i) {
      auto idx = static_cast<std::size_t>(stream.next_u01() * static_cast<double>(n));
      if (idx >= n) idx = n - 1;
      ra[i] = a[idx];
      rb[i] = b[idx];
    }
    boots.push_back(stat(ra, rb));
  }
  return percentiles(boots);
}

}  // namespace treechain::stats
