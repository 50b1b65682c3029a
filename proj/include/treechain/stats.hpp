#pragma once

// Shared statistical helpers: distribution functions, chi-square
// goodness-of-fit, deterministic bootstrap intervals, and the blocked
// covariance used by the pair-covariance and product-form diagnostics.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "treechain/rng.hpp"

namespace treechain::stats {

double normal_cdf(double z);
double poisson_pmf(std::uint64_t j, double mu);

// Regularized incomplete gamma functions P(a,x) and Q(a,x) = 1 - P(a,x).
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// Upper tail of the chi-square distribution with `dof` degrees of freedom.
double chi_square_sf(double statistic, int dof);

struct ChiSquare {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
};

// Pearson goodness-of-fit of observed counts against cell probabilities.
ChiSquare chi_square_gof(std::span<const std::uint64_t> counts,
                         std::span<const double> probs);

double mean(std::span<const double> v);
double sample_variance(std::span<const double> v);  // unbiased
double median(std::span<const double> v);

// Covariance (1/N) sum (a_i - a~)(b_i - b~) computed on data shifted by the
// first element, so constant inputs give exactly zero.
double covariance(std::span<const double> a, std::span<const double> b);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// Percentile bootstrap (2.5%, 97.5%) of a statistic of one sample.
Interval bootstrap_interval(std::span<const double> values,
                            const std::function<double(std::span<const double>)>& stat,
                            int rounds, rng::Stream& stream);

// Paired variant: resamples index-aligned pairs.
Interval bootstrap_interval_paired(
    std::span<const double> a, std::span<const double> b,
    const std::function<double(std::span<const double>, std::span<const double>)>& stat,
    int rounds, rng::Stream& stream);

}  // namespace treechain::stats
