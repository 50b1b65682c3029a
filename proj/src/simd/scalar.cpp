#include "treechain/rng.hpp"
#include "treechain/simd/ops.hpp"

namespace treechain::simd {
namespace {

using rng::kGolden;
using rng::mix64;

std::uint64_t first_draw_key(std::uint64_t level_key, std::uint32_t depth,
                             std::uint64_t i) {
  if (depth == 0) return level_key;
  return rng::fold(level_key, i << (64 - depth));
}

void first_draws_scalar(std::uint64_t level_key, std::uint32_t depth,
                        std::uint64_t i0, std::size_t count,
                        std::uint64_t* out) {
  for (std::size_t j = 0; j < count; ++j)
    out[j] = mix64(first_draw_key(level_key, depth, i0 + j) + kGolden);
}

void u01_scalar(const std::uint64_t* bits, std::size_t count, double* out) {
  for (std::size_t j = 0; j < count; ++j) out[j] = rng::to_u01(bits[j]);
}

void rademacher_scalar(const std::uint64_t* bits, double h, std::size_t count,
                       double* deltas) {
  for (std::size_t j = 0; j < count; ++j)
    deltas[j] = (bits[j] >> 63) ? h : -h;
}

void antithetic_scalar(const double* parents, const double* deltas,
                       std::size_t count, double* children) {
  for (std::size_t j = 0; j < count; ++j) {
    children[2 * j] = parents[j] + deltas[j];
    children[2 * j + 1] = parents[j] - deltas[j];
  }
}

void right_jump_scalar(const double* parents, const double* u01, double p,
                       std::size_t count, double* children) {
  for (std::size_t j = 0; j < count; ++j) {
    children[2 * j] = parents[j];
    children[2 * j + 1] = parents[j] + (u01[j] < p ? 1.0 : 0.0);
  }
}

double sum_scalar(const double* x, std::size_t count) {
  return blocked_accumulate(count, [&](std::size_t i) { return x[i]; });
}

double sum_square_scalar(const double* x, std::size_t count) {
  return blocked_accumulate(count, [&](std::size_t i) { return x[i] * x[i]; });
}

double sum_quartic_scalar(const double* x, std::size_t count) {
  return blocked_accumulate(count, [&](std::size_t i) {
    const double s = x[i] * x[i];
    return s * s;
  });
}

double sum_indicator_scalar(const double* x, std::size_t count, double c) {
  return blocked_accumulate(
      count, [&](std::size_t i) { return x[i] >= c ? 1.0 : 0.0; });
}

}  // namespace

const Ops& scalar_ops() {
  static const Ops ops = {
      "scalar",          first_draws_scalar, u01_scalar,
      rademacher_scalar, antithetic_scalar,  right_jump_scalar,
      sum_scalar,        sum_square_scalar,  sum_quartic_scalar,
      sum_indicator_scalar,
  };
  return ops;
}

}  // namespace treechain::simd
