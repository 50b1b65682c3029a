#pragma once

// Analytic limit laws for the built-in kernel families, limiting
// generators, and the finite-n generator gap checks.

#include <cstdint>
#include <string>
#include <vector>

#include "treechain/kernels.hpp"
#include "treechain/test_function.hpp"

namespace treechain {

// Law of the limiting walk state R_t for the built-in examples.
class LimitLaw {
 public:
  enum class Kind { normal, poisson, point_mass };

  static LimitLaw normal(double t);                  // N(0, t); t = 0 degenerates
  static LimitLaw poisson(double lambda, double t);  // Poi(lambda t)
  static LimitLaw point_mass(double x0);

  [[nodiscard]] Kind kind() const { return kind_; }
  [[nodiscard]] bool discrete() const { return kind_ == Kind::poisson; }
  [[nodiscard]] double time() const { return t_; }
  [[nodiscard]] double mean_param() const { return param_; }  // variance t / lambda t / x0

  // CDF for continuous laws (normal, point_mass); throws on poisson.
  [[nodiscard]] double cdf(double x) const;
  // Left limit x -> F(x-); differs from cdf only at point-mass jumps.
  [[nodiscard]] double cdf_left(double x) const;
  // PMF for the poisson law (and integer point masses); throws on normal.
  [[nodiscard]] double pmf(std::uint64_t j) const;

  [[nodiscard]] std::string describe() const;

 private:
  LimitLaw(Kind kind, double t, double param) : kind_(kind), t_(t), param_(param) {}

  Kind kind_;
  double t_;
  double param_;
};

// Closed-form action of the limiting generator on test functions.
class GeneratorSpec {
 public:
  static GeneratorSpec brownian();               // phi -> phi''(x) / 2
  static GeneratorSpec poisson(double lambda);   // phi -> lambda (phi(x+1) - phi(x))
  // The limiting generator matching a built-in kernel family.
  static GeneratorSpec for_family(const KernelFamily& kernel);

  double apply(const TestFunction& phi, double x) const;
  [[nodiscard]] std::string name() const;

 private:
  explicit GeneratorSpec(double lambda) : lambda_(lambda) {}
  double lambda_;  // <= 0 encodes brownian
};

struct Grid {
  double min = -2.0;
  double max = 2.0;
  double step = 0.1;

  [[nodiscard]] std::vector<double> points() const;  // throws when empty
};

// G_{R~n} phi (x) = n (P_R phi - phi)(x), the discrete generator.
double generator_estimate(const KernelFamily& kernel, const TestFunction& phi,
                          double x);

struct GapReport {
  std::string phi;
  std::string family;
  std::uint64_t n = 0;
  double grid_min = 0.0, grid_max = 0.0, grid_step = 0.0;
  double gap = 0.0;
};

// sup over the grid of |G_R phi - G_{R~n} phi|: the finite surrogate of the
// generator-approximation hypothesis.
GapReport generator_gap(const KernelFamily& kernel, const TestFunction& phi,
                        const GeneratorSpec& gen, const Grid& grid);

// sup over the grid of |phi - phi_n|: the test-function approximation
// hypothesis. The built-in choice phi_n = phi makes it identically zero; a
// genuinely n-dependent phi_n may be passed through the same hook.
double function_gap(const TestFunction& phi, const TestFunction& phi_n,
                    const Grid& grid);

}  // namespace treechain
