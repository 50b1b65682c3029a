#pragma once

// Data-parallel inner loops of the simulation engine: per-vertex RNG stream
// derivation, child-pair generation for the one-draw kernel families, and
// test-function reductions over dense generation buffers.
//
// Every backend is required to produce bit-identical results to the scalar
// reference (this is equivalence-tested), so backend selection is purely a
// performance choice and never affects simulation output.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace treechain::simd {

struct Ops {
  const char* name;

  // First per-vertex draw for the `count` parents at indices i0..i0+count-1
  // of generation `depth` (depth <= 63): the draw of Stream(vertex_key)
  // at counter 0, where vertex_key folds the left-aligned path word into
  // `level_key`. The root level (depth == 0) folds no word.
  void (*first_draws)(std::uint64_t level_key, std::uint32_t depth,
                      std::uint64_t i0, std::size_t count, std::uint64_t* out);

  // Canonical [0,1) conversion of raw draws (52-bit resolution).
  void (*u01_batch)(const std::uint64_t* bits, std::size_t count, double* out);

  // deltas[j] = +h if the top bit of bits[j] is set, else -h.
  void (*rademacher_deltas)(const std::uint64_t* bits, double h,
                            std::size_t count, double* deltas);

  // children[2j] = parents[j] + deltas[j], children[2j+1] = parents[j] - deltas[j].
  void (*antithetic_children)(const double* parents, const double* deltas,
                              std::size_t count, double* children);

  // children[2j] = parents[j], children[2j+1] = parents[j] + 1{u01[j] < p}.
  void (*right_jump_children)(const double* parents, const double* u01,
                              double p, std::size_t count, double* children);

  double (*sum)(const double* x, std::size_t count);
  double (*sum_square)(const double* x, std::size_t count);
  double (*sum_quartic)(const double* x, std::size_t count);
  double (*sum_indicator_ge)(const double* x, std::size_t count, double c);
};

// The canonical reduction order: four interleaved accumulators (element i
// feeds accumulator i mod 4) combined as (a0+a1)+(a2+a3). All backends and
// all generic reductions in the library follow it, which is what makes
// scalar, AVX2, and multi-worker results agree to the last bit.
template <class F>
double blocked_accumulate(std::size_t count, F&& term) {
  double acc0 = 0.0, acc1 = 0.0, acc2 = 0.0, acc3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= count; i += 4) {
    acc0 += term(i);
    acc1 += term(i + 1);
    acc2 += term(i + 2);
    acc3 += term(i + 3);
  }
  for (; i < count; ++i) {
    switch (i & 3) {
      case 0: acc0 += term(i); break;
      case 1: acc1 += term(i); break;
      case 2: acc2 += term(i); break;
      default: acc3 += term(i); break;
    }
  }
  return (acc0 + acc1) + (acc2 + acc3);
}

const Ops& scalar_ops();
#if defined(__x86_64__) || defined(_M_X64)
const Ops* avx2_ops();  // nullptr when unsupported by the CPU
#endif

// The dispatched backend. Defaults to the best supported variant; the
// TREECHAIN_SIMD environment variable ("scalar", "avx2", "auto") or
// set_backend() override it.
const Ops& active_ops();
bool set_backend(std::string_view name);
std::span<const std::string_view> backend_names();

}  // namespace treechain::simd
