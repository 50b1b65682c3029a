#include "treechain/limits.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "treechain/stats.hpp"

namespace treechain {

LimitLaw LimitLaw::normal(double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("LimitLaw::normal: t must be >= 0");
  if (t == 0.0) return point_mass(0.0);
  return {Kind::normal, t, t};
}

LimitLaw LimitLaw::poisson(double lambda, double t) {
  if (!(lambda > 0.0) || !(t >= 0.0))
    throw std::invalid_argument("LimitLaw::poisson: need lambda > 0 and t >= 0");
  if (t == 0.0) return point_mass(0.0);
  return {Kind::poisson, t, lambda * t};
}

LimitLaw LimitLaw::point_mass(double x0) { return {Kind::point_mass, 0.0, x0}; }

double LimitLaw::cdf(double x) const {
  switch (kind_) {
    case Kind::normal: return stats::normal_cdf(x / std::sqrt(param_));
    case Kind::point_mass: return x >= param_ ? 1.0 : 0.0;
    case Kind::poisson:
      throw std::domain_error("LimitLaw::cdf: poisson law is queried via pmf");
  }
  return 0.0;
}

double LimitLaw::cdf_left(double x) const {
  if (kind_ == Kind::point_mass) return x > param_ ? 1.0 : 0.0;
  return cdf(x);
}

double LimitLaw::pmf(std::uint64_t j) const {
  switch (kind_) {
    case Kind::poisson: return stats::poisson_pmf(j, param_);
    case Kind::point_mass:
      return static_cast<double>(j) == param_ ? 1.0 : 0.0;
    case Kind::normal:
      throw std::domain_error("LimitLaw::pmf: normal law is queried via cdf");
  }
  return 0.0;
}

std::string LimitLaw::describe() const {
  char buf[64];
  switch (kind_) {
    case Kind::normal:
      std::snprintf(buf, sizeof buf, "normal(0,%g)", param_);
      return buf;
    case Kind::poisson:
      std::snprintf(buf, sizeof buf, "poisson(%g)", param_);
      return buf;
    case Kind::point_mass:
      std::snprintf(buf, sizeof buf, "point_mass(%g)", param_);
      return buf;
  }
  return "?";
}

GeneratorSpec GeneratorSpec::brownian() { return GeneratorSpec(0.0); }

GeneratorSpec GeneratorSpec::poisson(double lambda) {
  if (!(lambda > 0.0))
    throw std::invalid_argument("GeneratorSpec::poisson: lambda must be positive");
  return GeneratorSpec(lambda);
}

GeneratorSpec GeneratorSpec::for_family(const KernelFamily& kernel) {
  switch (kernel.family()) {
    case Family::donsker: return brownian();
    case Family::poisson: return poisson(kernel.rate());
    default:
      throw std::domain_error(
          "GeneratorSpec::for_family: no built-in limit for this family");
  }
}

double GeneratorSpec::apply(const TestFunction& phi, double x) const {
  if (lambda_ > 0.0) return lambda_ * (phi(x + 1.0) - phi(x));
  return 0.5 * phi.second_derivative(x);
}

std::string GeneratorSpec::name() const {
  if (lambda_ > 0.0) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "poisson_difference(lambda=%g)", lambda_);
    return buf;
  }
  return "half_second_derivative";
}

std::vector<double> Grid::points() const {
  if (!(step > 0.0) || !(max >= min))
    throw std::invalid_argument("Grid: need step > 0 and max >= min");
  std::vector<double> pts;
  const auto count = static_cast<std::size_t>(std::floor((max - min) / step + 1e-9)) + 1;
  pts.reserve(count);
  for (std::size_t i = 0; i < count; ++i) pts.push_back(min + static_cast<double>(i) * step);
  return pts;
}

double generator_estimate(const KernelFamily& kernel, const TestFunction& phi,
                          double x) {
  return kernel.generator_apply(phi, x);
}

GapReport generator_gap(const KernelFamily& kernel, const TestFunction& phi,
                        const GeneratorSpec& gen, const Grid& grid) {
  GapReport report;
  report.phi = phi.name();
  report.family = kernel.describe();
  report.n = kernel.scale();
  report.grid_min = grid.min;
  report.grid_max = grid.max;
  report.grid_step = grid.step;
  double gap = 0.0;
  for (const double x : grid.points())
    gap = std::max(gap, std::fabs(gen.apply(phi, x) - kernel.generator_apply(phi, x)));
  report.gap = gap;
  return report;
}

double function_gap(const TestFunction& phi, const TestFunction& phi_n,
                    const Grid& grid) {
  double gap = 0.0;
  for (const double x : grid.points())
    gap = std::max(gap, std::fabs(phi(x) - phi_n(x)));
  return gap;
}

}  // namespace treechain
