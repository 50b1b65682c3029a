#pragma once

// Joint transition kernels p_n(x, dx0 x dx1) for the built-in families, the
// derived walk kernel p_R (half-half mixture of the two child marginals),
// and the exact one-step walk operator P_R phi used by generator checks and
// martingale compensators.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "treechain/rng.hpp"
#include "treechain/test_function.hpp"

namespace treechain {

enum class Family { donsker, poisson, symmetric_product, custom };

// Law of a single increment Y. Every kind consumes exactly one 64-bit word
// per draw, so child generation costs a fixed number of stream slots per
// vertex regardless of outcome.
class IncrementLaw {
 public:
  enum class Kind { rademacher, gaussian, bernoulli_jump, point_mass, table };

  static IncrementLaw rademacher();
  static IncrementLaw gaussian(double sigma);
  static IncrementLaw bernoulli_jump(double rate);  // 1 w.p. rate, else 0
  static IncrementLaw point_mass(double c);
  static IncrementLaw from_table(std::vector<std::pair<double, double>> rows);

  [[nodiscard]] Kind kind() const { return kind_; }
  [[nodiscard]] double param() const { return param_; }
  [[nodiscard]] const std::vector<std::pair<double, double>>& table() const {
    return rows_;
  }

  [[nodiscard]] double mean() const;
  [[nodiscard]] double raw_moment(int k) const;  // E[Y^k], k = 1..4
  [[nodiscard]] bool finite_support() const { return kind_ != Kind::gaussian; }
  // (value, prob) pairs; throws for gaussian.
  [[nodiscard]] std::vector<std::pair<double, double>> support() const;

  [[nodiscard]] double sample_from_word(std::uint64_t word) const;
  double sample(rng::Stream& stream) const { return sample_from_word(stream.next()); }

  [[nodiscard]] std::string describe() const;

 private:
  IncrementLaw(Kind kind, double param) : kind_(kind), param_(param) {}

  Kind kind_;
  double param_;  // sigma / rate / shift
  std::vector<std::pair<double, double>> rows_;
  std::vector<double> cdf_;
};

// One row of a custom joint kernel: children (x + shift0, x + shift1) with
// probability prob.
struct MixtureRow {
  double shift0 = 0.0;
  double shift1 = 0.0;
  double prob = 1.0;
};

struct Expectation {
  double value = 0.0;
  double std_error = 0.0;  // zero in exact mode
  bool exact = true;
};

// A scaling-indexed kernel family. Immutable after construction; concurrent
// sampling only needs distinct streams.
class KernelFamily {
 public:
  // Children (x + Y/sqrt(n), x - Y/sqrt(n)); Y must have mean 0, variance 1.
  static KernelFamily donsker(IncrementLaw y, std::uint64_t n);
  // Children (x, x + Y) with Y ~ Bernoulli(2 lambda / n); requires n > 2 lambda.
  static KernelFamily poisson(double lambda, std::uint64_t n);
  // Children independently x + D, D ~ q.
  static KernelFamily symmetric_product(IncrementLaw q, std::uint64_t n);
  // Finite mixture of additive shift pairs; probs must sum to 1.
  static KernelFamily custom(std::vector<MixtureRow> rows, std::uint64_t n);

  [[nodiscard]] Family family() const { return family_; }
  [[nodiscard]] std::uint64_t scale() const { return n_; }
  [[nodiscard]] KernelFamily with_scale(std::uint64_t n) const;
  [[nodiscard]] const IncrementLaw& increment_law() const { return law_; }
  [[nodiscard]] double rate() const { return lambda_; }
  [[nodiscard]] const std::vector<MixtureRow>& mixture() const { return rows_; }

  [[nodiscard]] bool integer_valued() const { return family_ == Family::poisson; }
  [[nodiscard]] int draws_per_vertex() const {
    return family_ == Family::symmetric_product ? 2 : 1;
  }
  [[nodiscard]] std::string family_name() const;
  [[nodiscard]] std::string describe() const;

  // Throws std::domain_error on a state outside the family's state space
  // (poisson states must be nonnegative integers).
  std::pair<double, double> sample_children(double x, rng::Stream& stream) const;
  double sample_walk_step(double x, rng::Stream& stream) const;

  // Dense generation fill: children[2j] and children[2j+1] receive the
  // child pair of parents[j] (vertex index i0+j of generation `depth`),
  // exactly as if sample_children ran with that vertex's stream. The
  // one-draw families route through the dispatched SIMD backend.
  void fill_children(std::uint64_t level_key, std::uint32_t depth,
                     std::uint64_t i0, std::size_t count, const double* parents,
                     double* children) const;

  // Walk increment law: either a finite (delta, prob) list (cached at
  // construction) or a centered Gaussian with standard deviation walk_sd().
  [[nodiscard]] bool walk_support_finite() const;
  [[nodiscard]] const std::vector<std::pair<double, double>>& walk_support() const;
  [[nodiscard]] double walk_sd() const;

  // Joint child-shift support: (shift0, shift1, prob) rows such that the
  // children of x are (x + shift0, x + shift1). Throws for gaussian
  // increments; this is what the exact enumeration oracle runs on.
  [[nodiscard]] std::vector<MixtureRow> joint_support() const;

  // --- exact one-step walk operator ---------------------------------------
  // Closed forms exist for every built-in phi; only a Gaussian walk paired
  // with a table phi has none.
  [[nodiscard]] bool has_exact_walk_operator(const TestFunction& phi) const;
  // P_R phi (x).
  [[nodiscard]] double walk_apply(const TestFunction& phi, double x) const;
  // P_R phi (x) - phi(x), computed in increment form so no significance is
  // lost to cancellation (polynomials go through increment moments).
  [[nodiscard]] double walk_excess(const TestFunction& phi, double x) const;
  // n * (P_R phi - phi)(x), with the n folded into the moments analytically
  // so that e.g. the donsker/square value is exactly E[Y^2] for every n.
  [[nodiscard]] double generator_apply(const TestFunction& phi, double x) const;

  // walk_step_expectation: exact when a closed form exists (budget ignored),
  // otherwise Monte Carlo over `budget` draws with a reported standard
  // error. Throws std::invalid_argument when neither is possible.
  Expectation walk_step_expectation(const TestFunction& phi, double x,
                                    std::optional<std::uint64_t> budget = {},
                                    rng::Stream* stream = nullptr) const;

 private:
  KernelFamily(Family family, std::uint64_t n, IncrementLaw law);

  void cache_walk_support();
  void check_state(double x) const;
  // E[phi(x + delta)] against the walk increment, closed form.
  [[nodiscard]] double walk_increment_mean(const TestFunction& phi, double x) const;
  // Raw walk-increment moment E[delta^k] times n (exact scaling forms).
  [[nodiscard]] double scaled_walk_moment(int k) const;

  Family family_;
  std::uint64_t n_;
  IncrementLaw law_;          // donsker Y / symmetric q / poisson Bernoulli(2l/n)
  double lambda_ = 0.0;       // poisson rate
  double child_scale_ = 1.0;  // donsker 1/sqrt(n)
  std::vector<MixtureRow> rows_;
  std::vector<double> row_cdf_;
  std::vector<std::pair<double, double>> walk_support_;
};

}  // namespace treechain
