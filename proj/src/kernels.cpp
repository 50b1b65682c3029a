#include "treechain/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "treechain/simd/ops.hpp"

namespace treechain {

namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double pow_small(double v, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= v;
  return r;
}

}  // namespace

// --- IncrementLaw -----------------------------------------------------------

IncrementLaw IncrementLaw::rademacher() { return {Kind::rademacher, 0.0}; }

IncrementLaw IncrementLaw::gaussian(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw std::invalid_argument("IncrementLaw::gaussian: sigma must be positive");
  return {Kind::gaussian, sigma};
}

IncrementLaw IncrementLaw::bernoulli_jump(double rate) {
  if (!(rate >= 0.0 && rate <= 1.0))
    throw std::invalid_argument("IncrementLaw::bernoulli_jump: rate outside [0,1]");
  return {Kind::bernoulli_jump, rate};
}

IncrementLaw IncrementLaw::point_mass(double c) {
  if (!std::isfinite(c))
    throw std::invalid_argument("IncrementLaw::point_mass: non-finite value");
  return {Kind::point_mass, c};
}

IncrementLaw IncrementLaw::from_table(std::vector<std::pair<double, double>> rows) {
  if (rows.empty()) throw std::invalid_argument("IncrementLaw: empty table");
  double total = 0.0;
  for (const auto& [v, p] : rows) {
    if (!std::isfinite(v)) throw std::invalid_argument("IncrementLaw: non-finite value");
    if (!(p > 0.0)) throw std::invalid_argument("IncrementLaw: probabilities must be positive");
    total += p;
  }
  if (std::fabs(total - 1.0) > 1e-9)
    throw std::invalid_argument("IncrementLaw: probabilities must sum to 1");
  IncrementLaw law(Kind::table, 0.0);
  law.rows_ = std::move(rows);
  law.cdf_.reserve(law.rows_.size());
  double acc = 0.0;
  for (const auto& [v, p] : law.rows_) {
    acc += p;
    law.cdf_.push_back(acc);
  }
  law.cdf_.back() = 1.0;
  return law;
}

double IncrementLaw::mean() const { return raw_moment(1); }

double IncrementLaw::raw_moment(int k) const {
  switch (kind_) {
    case Kind::rademacher: return (k % 2 == 0) ? 1.0 : 0.0;
    case Kind::gaussian:
      if (k == 1 || k == 3) return 0.0;
      if (k == 2) return param_ * param_;
      return 3.0 * pow_small(param_, 4);  // k == 4
    case Kind::bernoulli_jump: return param_;
    case Kind::point_mass: return pow_small(param_, k);
    case Kind::table: {
      double m = 0.0;
      for (const auto& [v, p] : rows_) m += p * pow_small(v, k);
      return m;
    }
  }
  return 0.0;
}

std::vector<std::pair<double, double>> IncrementLaw::support() const {
  switch (kind_) {
    case Kind::rademacher: return {{-1.0, 0.5}, {1.0, 0.5}};
    case Kind::bernoulli_jump: return {{0.0, 1.0 - param_}, {1.0, param_}};
    case Kind::point_mass: return {{param_, 1.0}};
    case Kind::table: return rows_;
    case Kind::gaussian:
      throw std::domain_error("IncrementLaw: gaussian has no finite support");
  }
  return {};
}

double IncrementLaw::sample_from_word(std::uint64_t word) const {
  switch (kind_) {
    case Kind::rademacher: return (word >> 63) ? 1.0 : -1.0;
    case Kind::gaussian: return param_ * rng::to_standard_normal(word);
    case Kind::bernoulli_jump: return rng::to_u01(word) < param_ ? 1.0 : 0.0;
    case Kind::point_mass: return param_;
    case Kind::table: {
      const double u = rng::to_u01(word);
      const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
      const std::size_t i = std::min<std::size_t>(it - cdf_.begin(), rows_.size() - 1);
      return rows_[i].first;
    }
  }
  return 0.0;
}

std::string IncrementLaw::describe() const {
  char buf[64];
  switch (kind_) {
    case Kind::rademacher: return "rademacher";
    case Kind::gaussian:
      std::snprintf(buf, sizeof buf, "gaussian(sigma=%g)", param_);
      return buf;
    case Kind::bernoulli_jump:
      std::snprintf(buf, sizeof buf, "bernoulli_jump(%g)", param_);
      return buf;
    case Kind::point_mass:
      std::snprintf(buf, sizeof buf, "point_mass(%g)", param_);
      return buf;
    case Kind::table:
      std::snprintf(buf, sizeof buf, "table[%zu rows]", rows_.size());
      return buf;
  }
  return "?";
}

// --- KernelFamily ------------------------------------------------------------

KernelFamily::KernelFamily(Family family, std::uint64_t n, IncrementLaw law)
    : family_(family), n_(n), law_(std::move(law)) {
  if (n_ == 0) throw std::invalid_argument("KernelFamily: scale n must be >= 1");
}

KernelFamily KernelFamily::donsker(IncrementLaw y, std::uint64_t n) {
  if (std::fabs(y.mean()) > 1e-9 || std::fabs(y.raw_moment(2) - 1.0) > 1e-9)
    throw std::invalid_argument(
        "KernelFamily::donsker: increment must have mean 0 and variance 1");
  KernelFamily k(Family::donsker, n, std::move(y));
  k.child_scale_ = 1.0 / std::sqrt(static_cast<double>(n));
  k.cache_walk_support();
  return k;
}

KernelFamily KernelFamily::poisson(double lambda, std::uint64_t n) {
  if (!(lambda > 0.0))
    throw std::invalid_argument("KernelFamily::poisson: lambda must be positive");
  if (!(static_cast<double>(n) > 2.0 * lambda))
    throw std::invalid_argument("KernelFamily::poisson: requires n > 2*lambda");
  KernelFamily k(Family::poisson, n,
                 IncrementLaw::bernoulli_jump(2.0 * lambda / static_cast<double>(n)));
  k.lambda_ = lambda;
  k.cache_walk_support();
  return k;
}

KernelFamily KernelFamily::symmetric_product(IncrementLaw q, std::uint64_t n) {
  KernelFamily k(Family::symmetric_product, n, std::move(q));
  k.cache_walk_support();
  return k;
}

KernelFamily KernelFamily::custom(std::vector<MixtureRow> rows, std::uint64_t n) {
  if (rows.empty()) throw std::invalid_argument("KernelFamily::custom: empty mixture");
  double total = 0.0;
  for (const auto& r : rows) {
    if (!std::isfinite(r.shift0) || !std::isfinite(r.shift1))
      throw std::invalid_argument("KernelFamily::custom: non-finite shift");
    if (!(r.prob > 0.0))
      throw std::invalid_argument("KernelFamily::custom: probabilities must be positive");
    total += r.prob;
  }
  if (std::fabs(total - 1.0) > 1e-9)
    throw std::invalid_argument("KernelFamily::custom: probabilities must sum to 1");
  KernelFamily k(Family::custom, n, IncrementLaw::point_mass(0.0));
  k.rows_ = std::move(rows);
  k.row_cdf_.reserve(k.rows_.size());
  double acc = 0.0;
  for (const auto& r : k.rows_) {
    acc += r.prob;
    k.row_cdf_.push_back(acc);
  }
  k.row_cdf_.back() = 1.0;
  k.cache_walk_support();
  return k;
}

KernelFamily KernelFamily::with_scale(std::uint64_t n) const {
  switch (family_) {
    case Family::donsker: return donsker(law_, n);
    case Family::poisson: return poisson(lambda_, n);
    case Family::symmetric_product: return symmetric_product(law_, n);
    case Family::custom: return custom(rows_, n);
  }
  throw std::logic_error("KernelFamily::with_scale");
}

std::string KernelFamily::family_name() const {
  switch (family_) {
    case Family::donsker: return "donsker";
    case Family::poisson: return "poisson";
    case Family::symmetric_product: return "symmetric_product";
    case Family::custom: return "custom";
  }
  return "?";
}

std::string KernelFamily::describe() const {
  char buf[96];
  switch (family_) {
    case Family::donsker:
      std::snprintf(buf, sizeof buf, "donsker(%s, n=%llu)", law_.describe().c_str(),
                    static_cast<unsigned long long>(n_));
      break;
    case Family::poisson:
      std::snprintf(buf, sizeof buf, "poisson(lambda=%g, n=%llu)", lambda_,
                    static_cast<unsigned long long>(n_));
      break;
    case Family::symmetric_product:
      std::snprintf(buf, sizeof buf, "symmetric_product(%s, n=%llu)",
                    law_.describe().c_str(), static_cast<unsigned long long>(n_));
      break;
    case Family::custom:
      std::snprintf(buf, sizeof buf, "custom(%zu rows, n=%llu)", rows_.size(),
                    static_cast<unsigned long long>(n_));
      break;
  }
  return buf;
}

void KernelFamily::check_state(double x) const {
  if (!std::isfinite(x))
    throw std::domain_error("KernelFamily: non-finite state");
  if (family_ == Family::poisson && (x < 0.0 || x != std::floor(x)))
    throw std::domain_error(
        "KernelFamily: poisson states are nonnegative integers");
}

std::pair<double, double> KernelFamily::sample_children(double x,
                                                        rng::Stream& stream) const {
  check_state(x);
  switch (family_) {
    case Family::donsker: {
      const double delta = law_.sample_from_word(stream.next()) * child_scale_;
      return {x + delta, x - delta};
    }
    case Family::poisson: {
      const double jump = law_.sample_from_word(stream.next());
      return {x, x + jump};
    }
    case Family::symmetric_product: {
      const double d0 = law_.sample(stream);
      const double d1 = law_.sample(stream);
      return {x + d0, x + d1};
    }
    case Family::custom: {
      const double u = stream.next_u01();
      const auto it = std::upper_bound(row_cdf_.begin(), row_cdf_.end(), u);
      const std::size_t i = std::min<std::size_t>(it - row_cdf_.begin(), rows_.size() - 1);
      return {x + rows_[i].shift0, x + rows_[i].shift1};
    }
  }
  throw std::logic_error("KernelFamily::sample_children");
}

double KernelFamily::sample_walk_step(double x, rng::Stream& stream) const {
  const auto [c0, c1] = sample_children(x, stream);
  return stream.next_bit() ? c1 : c0;
}

void KernelFamily::fill_children(std::uint64_t level_key, std::uint32_t depth,
                                 std::uint64_t i0, std::size_t count,
                                 const double* parents, double* children) const {
  constexpr std::size_t kBlock = 2048;
  const auto& ops = simd::active_ops();
  std::uint64_t draws[kBlock];
  double deltas[kBlock];

  const bool batched_donsker = family_ == Family::donsker;
  const bool batched_poisson = family_ == Family::poisson;
  if (batched_donsker || batched_poisson) {
    for (std::size_t off = 0; off < count; off += kBlock) {
      const std::size_t len = std::min(kBlock, count - off);
      ops.first_draws(level_key, depth, i0 + off, len, draws);
      if (batched_donsker) {
        if (law_.kind() == IncrementLaw::Kind::rademacher) {
          ops.rademacher_deltas(draws, child_scale_, len, deltas);
        } else {
          for (std::size_t j = 0; j < len; ++j)
            deltas[j] = law_.sample_from_word(draws[j]) * child_scale_;
        }
        ops.antithetic_children(parents + off, deltas, len, children + 2 * off);
      } else {
        ops.u01_batch(draws, len, deltas);  // reuse as uniforms
        ops.right_jump_children(parents + off, deltas, law_.param(), len,
                                children + 2 * off);
      }
    }
    return;
  }
  for (std::size_t j = 0; j < count; ++j) {
    rng::Stream stream(rng::vertex_key_at(level_key, depth, i0 + j));
    const auto [c0, c1] = sample_children(parents[j], stream);
    children[2 * j] = c0;
    children[2 * j + 1] = c1;
  }
}

bool KernelFamily::walk_support_finite() const {
  switch (family_) {
    case Family::donsker:
    case Family::symmetric_product:
      return law_.finite_support();
    case Family::poisson:
    case Family::custom:
      return true;
  }
  return true;
}

void KernelFamily::cache_walk_support() {
  if (!walk_support_finite()) return;
  std::vector<std::pair<double, double>> sup;
  switch (family_) {
    case Family::donsker:
      for (const auto& [v, p] : law_.support()) {
        sup.emplace_back(v * child_scale_, 0.5 * p);
        sup.emplace_back(-(v * child_scale_), 0.5 * p);
      }
      break;
    case Family::poisson:
      sup = {{0.0, 1.0 - lambda_ / static_cast<double>(n_)},
             {1.0, lambda_ / static_cast<double>(n_)}};
      break;
    case Family::symmetric_product:
      sup = law_.support();
      break;
    case Family::custom:
      for (const auto& r : rows_) {
        sup.emplace_back(r.shift0, 0.5 * r.prob);
        sup.emplace_back(r.shift1, 0.5 * r.prob);
      }
      break;
  }
  std::sort(sup.begin(), sup.end());
  walk_support_.clear();
  for (const auto& [v, p] : sup) {
    if (!walk_support_.empty() && walk_support_.back().first == v)
      walk_support_.back().second += p;
    else
      walk_support_.emplace_back(v, p);
  }
}

const std::vector<std::pair<double, double>>& KernelFamily::walk_support() const {
  if (!walk_support_finite())
    throw std::domain_error("KernelFamily::walk_support: gaussian walk increment");
  return walk_support_;
}

double KernelFamily::walk_sd() const {
  if (walk_support_finite())
    throw std::domain_error("KernelFamily::walk_sd: walk increment is discrete");
  const double sigma = law_.param();
  return family_ == Family::donsker ? sigma * child_scale_ : sigma;
}

std::vector<MixtureRow> KernelFamily::joint_support() const {
  std::vector<MixtureRow> rows;
  switch (family_) {
    case Family::donsker:
      for (const auto& [v, p] : law_.support()) {
        const double d = v * child_scale_;
        rows.push_back({d, -d, p});
      }
      break;
    case Family::poisson:
      rows.push_back({0.0, 0.0, 1.0 - law_.param()});
      rows.push_back({0.0, 1.0, law_.param()});
      break;
    case Family::symmetric_product:
      for (const auto& [v0, p0] : law_.support())
        for (const auto& [v1, p1] : law_.support())
          rows.push_back({v0, v1, p0 * p1});
      break;
    case Family::custom:
      rows = rows_;
      break;
  }
  return rows;
}

bool KernelFamily::has_exact_walk_operator(const TestFunction& phi) const {
  if (walk_support_finite()) return true;
  // one-knot tables are constants and integrate trivially
  return phi.kind() != TestFunction::Kind::table || phi.knots().size() == 1;
}

double KernelFamily::walk_increment_mean(const TestFunction& phi, double x) const {
  if (walk_support_finite()) {
    double acc = 0.0;
    for (const auto& [delta, p] : walk_support()) acc += p * phi(x + delta);
    return acc;
  }
  const double s = walk_sd();
  switch (phi.kind()) {
    case TestFunction::Kind::identity: return x;
    case TestFunction::Kind::square: return x * x + s * s;
    case TestFunction::Kind::quartic: {
      const double x2 = x * x, s2 = s * s;
      return x2 * x2 + 6.0 * x2 * s2 + 3.0 * s2 * s2;
    }
    case TestFunction::Kind::indicator_ge:
      return normal_cdf((x - phi.param()) / s);
    case TestFunction::Kind::exp_bounded: {
      const double a = phi.param();
      const double w = 1.0 + 2.0 * a * s * s;
      return std::exp(-a * x * x / w) / std::sqrt(w);
    }
    case TestFunction::Kind::table:
      if (phi.knots().size() == 1) return phi.knots().front().second;
      throw std::domain_error(
          "KernelFamily: no closed form for a gaussian walk against a table phi");
  }
  throw std::logic_error("KernelFamily::walk_increment_mean");
}

double KernelFamily::walk_apply(const TestFunction& phi, double x) const {
  return walk_increment_mean(phi, x);
}

double KernelFamily::scaled_walk_moment(int k) const {
  // n * E[delta^k] for the walk increment delta.
  const double n = static_cast<double>(n_);
  switch (family_) {
    case Family::donsker:
      // delta = +-Y/sqrt(n): odd moments vanish exactly by symmetry.
      if (k % 2 == 1) return 0.0;
      if (k == 2) return law_.raw_moment(2);
      return law_.raw_moment(4) / n;  // k == 4
    case Family::poisson:
      return lambda_;  // delta in {0,1}, P(1) = lambda/n
    default: {
      double m = 0.0;
      for (const auto& [delta, p] : walk_support()) m += p * pow_small(delta, k);
      return n * m;
    }
  }
}

double KernelFamily::walk_excess(const TestFunction& phi, double x) const {
  return generator_apply(phi, x) / static_cast<double>(n_);
}

double KernelFamily::generator_apply(const TestFunction& phi, double x) const {
  const double n = static_cast<double>(n_);
  if (family_ == Family::poisson)  // n cancels against P(jump) = lambda/n
    return lambda_ * (phi(x + 1.0) - phi(x));
  if (phi.is_polynomial()) {
    const double m1 = scaled_walk_moment(1);
    const double m2 = scaled_walk_moment(2);
    switch (phi.kind()) {
      case TestFunction::Kind::identity: return m1;
      case TestFunction::Kind::square: return 2.0 * x * m1 + m2;
      default: {  // quartic
        const double m3 = scaled_walk_moment(3);
        const double m4 = scaled_walk_moment(4);
        return 4.0 * x * x * x * m1 + 6.0 * x * x * m2 + 4.0 * x * m3 + m4;
      }
    }
  }
  if (phi.kind() == TestFunction::Kind::indicator_ge) {
    const double c = phi.param();
    const double here = x >= c ? 1.0 : 0.0;
    if (walk_support_finite()) {
      double acc = 0.0;
      for (const auto& [delta, p] : walk_support())
        acc += p * ((x + delta >= c ? 1.0 : 0.0) - here);
      return n * acc;
    }
    return n * (normal_cdf((x - c) / walk_sd()) - here);
  }
  return n * (walk_increment_mean(phi, x) - phi(x));
}

Expectation KernelFamily::walk_step_expectation(const TestFunction& phi, double x,
                                                std::optional<std::uint64_t> budget,
                                                rng::Stream* stream) const {
  if (has_exact_walk_operator(phi)) return {walk_apply(phi, x), 0.0, true};
  if (!budget || !stream)
    throw std::invalid_argument(
        "walk_step_expectation: no closed form for this kernel/phi; a Monte "
        "Carlo budget and stream are required");
  if (*budget < 2)
    throw std::invalid_argument("walk_step_expectation: budget must be >= 2");
  double sum = 0.0, sum_sq = 0.0;
  for (std::uint64_t i = 0; i < *budget; ++i) {
    const double v = phi(sample_walk_step(x, *stream));
    sum += v;
    sum_sq += v * v;
  }
  const double m = static_cast<double>(*budget);
  const double mean = sum / m;
  const double var = std::max(0.0, (sum_sq - m * mean * mean) / (m - 1.0));
  return {mean, std::sqrt(var / m), false};
}

}  // namespace treechain
