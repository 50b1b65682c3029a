#pragma once

// Test functions phi paired against empirical measures and generators.
// The limit theory wants bounded continuous phi; identity/square/quartic are
// admitted as locally bounded surrogates on the reachable state range and
// reports flag them as such.

#include <string>
#include <utility>
#include <vector>

namespace treechain {

class TestFunction {
 public:
  enum class Kind { identity, square, quartic, indicator_ge, exp_bounded, table };

  static TestFunction identity() { return TestFunction(Kind::identity, 0.0); }
  static TestFunction square() { return TestFunction(Kind::square, 0.0); }
  static TestFunction quartic() { return TestFunction(Kind::quartic, 0.0); }
  // x -> 1{x >= c}; closed threshold, matching the right-continuous CDF
  // convention used by the distance code.
  static TestFunction indicator_ge(double c) {
    return TestFunction(Kind::indicator_ge, c);
  }
  // x -> exp(-a x^2) for a > 0; bounded by 1 with closed-form Gaussian
  // expectations.
  static TestFunction exp_bounded(double a);
  // Piecewise-linear interpolation of sorted (x, y) knots, constant beyond
  // the end knots.
  static TestFunction from_table(std::vector<std::pair<double, double>> knots);
  static TestFunction constant(double c) { return from_table({{0.0, c}}); }

  [[nodiscard]] Kind kind() const { return kind_; }
  [[nodiscard]] double param() const { return param_; }
  [[nodiscard]] const std::vector<std::pair<double, double>>& knots() const {
    return knots_;
  }

  double operator()(double x) const;

  [[nodiscard]] bool is_polynomial() const {
    return kind_ == Kind::identity || kind_ == Kind::square || kind_ == Kind::quartic;
  }
  [[nodiscard]] bool is_bounded() const { return !is_polynomial(); }

  // Second derivative; exact for the built-in kinds, central second
  // difference with step max(1e-4, 1e-4 |x|) for tables.
  [[nodiscard]] double second_derivative(double x) const;

  [[nodiscard]] std::string name() const;

 private:
  TestFunction(Kind kind, double param) : kind_(kind), param_(param) {}

  Kind kind_;
  double param_;
  std::vector<std::pair<double, double>> knots_;
};

}  // namespace treechain
