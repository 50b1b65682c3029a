// AVX2 variants of the simulation inner loops. This translation unit is the
// only one compiled with -mavx2; callers reach it through the dispatch table
// after a runtime CPU check. Results are bit-identical to src/simd/scalar.cpp
// by construction: the integer mixing is exact and every floating-point
// element undergoes the same single sequence of IEEE operations.

#if defined(__x86_64__) || defined(_M_X64)
#if defined(__AVX2__)

#include <immintrin.h>

#include "treechain/rng.hpp"
#include "treechain/simd/ops.hpp"

namespace treechain::simd {
namespace {

using rng::kGolden;
using rng::mix64;

inline __m256i mul64lo(__m256i a, __m256i b) {
  // 64x64 -> low 64 via 32-bit partial products (no vpmullq below AVX-512).
  const __m256i lolo = _mm256_mul_epu32(a, b);
  const __m256i a_hi = _mm256_srli_epi64(a, 32);
  const __m256i b_hi = _mm256_srli_epi64(b, 32);
  const __m256i cross =
      _mm256_add_epi64(_mm256_mul_epu32(a_hi, b), _mm256_mul_epu32(a, b_hi));
  return _mm256_add_epi64(lolo, _mm256_slli_epi64(cross, 32));
}

inline __m256i vmix64(__m256i z) {
  const __m256i golden = _mm256_set1_epi64x(static_cast<long long>(kGolden));
  const __m256i m1 = _mm256_set1_epi64x(static_cast<long long>(0xbf58476d1ce4e5b9ull));
  const __m256i m2 = _mm256_set1_epi64x(static_cast<long long>(0x94d049bb133111ebull));
  z = _mm256_add_epi64(z, golden);
  z = mul64lo(_mm256_xor_si256(z, _mm256_srli_epi64(z, 30)), m1);
  z = mul64lo(_mm256_xor_si256(z, _mm256_srli_epi64(z, 27)), m2);
  return _mm256_xor_si256(z, _mm256_srli_epi64(z, 31));
}

void first_draws_avx2(std::uint64_t level_key, std::uint32_t depth,
                      std::uint64_t i0, std::size_t count, std::uint64_t* out) {
  if (depth == 0) {  // single root vertex; nothing to vectorize
    for (std::size_t j = 0; j < count; ++j)
      out[j] = mix64(level_key + kGolden);
    return;
  }
  const __m128i shift = _mm_cvtsi32_si128(static_cast<int>(64 - depth));
  const __m256i key = _mm256_set1_epi64x(static_cast<long long>(level_key));
  const __m256i golden = _mm256_set1_epi64x(static_cast<long long>(kGolden));
  std::size_t j = 0;
  for (; j + 4 <= count; j += 4) {
    const __m256i idx = _mm256_setr_epi64x(
        static_cast<long long>(i0 + j), static_cast<long long>(i0 + j + 1),
        static_cast<long long>(i0 + j + 2), static_cast<long long>(i0 + j + 3));
    const __m256i path = _mm256_sll_epi64(idx, shift);
    const __m256i vkey = vmix64(_mm256_xor_si256(key, path));
    const __m256i draw = vmix64(_mm256_add_epi64(vkey, golden));
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + j), draw);
  }
  for (; j < count; ++j) {
    const std::uint64_t path = (i0 + j) << (64 - depth);
    out[j] = mix64(rng::fold(level_key, path) + kGolden);
  }
}

void u01_avx2(const std::uint64_t* bits, std::size_t count, double* out) {
  const __m256i exp52 = _mm256_set1_epi64x(0x4330000000000000ll);
  const __m256d two52 = _mm256_set1_pd(0x1.0p52);
  const __m256d scale = _mm256_set1_pd(0x1.0p-52);
  std::size_t j = 0;
  for (; j + 4 <= count; j += 4) {
    const __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(bits + j));
    const __m256i top = _mm256_srli_epi64(v, 12);
    // exact u64 -> f64 for values below 2^52
    const __m256d d =
        _mm256_sub_pd(_mm256_castsi256_pd(_mm256_or_si256(top, exp52)), two52);
    _mm256_storeu_pd(out + j, _mm256_mul_pd(d, scale));
  }
  for (; j < count; ++j) out[j] = rng::to_u01(bits[j]);
}

void rademacher_avx2(const std::uint64_t* bits, double h, std::size_t count,
                     double* deltas) {
  const __m256i sign = _mm256_set1_epi64x(static_cast<long long>(0x8000000000000000ull));
  const __m256i mag = _mm256_castpd_si256(_mm256_set1_pd(h));
  std::size_t j = 0;
  for (; j + 4 <= count; j += 4) {
    const __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(bits + j));
    // top bit clear -> negative delta
    const __m256i neg = _mm256_andnot_si256(v, sign);
    _mm256_storeu_pd(deltas + j, _mm256_castsi256_pd(_mm256_or_si256(mag, neg)));
  }
  for (; j < count; ++j) deltas[j] = (bits[j] >> 63) ? h : -h;
}

inline void store_interleaved(double* dst, __m256d a, __m256d b) {
  const __m256d lo = _mm256_unpacklo_pd(a, b);
  const __m256d hi = _mm256_unpackhi_pd(a, b);
  _mm256_storeu_pd(dst, _mm256_permute2f128_pd(lo, hi, 0x20));
  _mm256_storeu_pd(dst + 4, _mm256_permute2f128_pd(lo, hi, 0x31));
}

void antithetic_avx2(const double* parents, const double* deltas,
                     std::size_t count, double* children) {
  std::size_t j = 0;
  for (; j + 4 <= count; j += 4) {
    const __m256d p = _mm256_loadu_pd(parents + j);
    const __m256d d = _mm256_loadu_pd(deltas + j);
    store_interleaved(children + 2 * j, _mm256_add_pd(p, d), _mm256_sub_pd(p, d));
  }
  for (; j < count; ++j) {
    children[2 * j] = parents[j] + deltas[j];
    children[2 * j + 1] = parents[j] - deltas[j];
  }
}

void right_jump_avx2(const double* parents, const double* u01, double p,
                     std::size_t count, double* children) {
  const __m256d threshold = _mm256_set1_pd(p);
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t j = 0;
  for (; j + 4 <= count; j += 4) {
    const __m256d x = _mm256_loadu_pd(parents + j);
    const __m256d u = _mm256_loadu_pd(u01 + j);
    const __m256d jump =
        _mm256_and_pd(_mm256_cmp_pd(u, threshold, _CMP_LT_OQ), one);
    store_interleaved(children + 2 * j, x, _mm256_add_pd(x, jump));
  }
  for (; j < count; ++j) {
    children[2 * j] = parents[j];
    children[2 * j + 1] = parents[j] + (u01[j] < p ? 1.0 : 0.0);
  }
}

// Reductions: vector lane l accumulates elements with index = l (mod 4),
// the same assignment as blocked_accumulate, then (a0+a1)+(a2+a3).
template <class MapVec, class MapScalar>
double reduce_avx2(const double* x, std::size_t count, MapVec&& mv,
                   MapScalar&& ms) {
  __m256d vacc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= count; i += 4)
    vacc = _mm256_add_pd(vacc, mv(_mm256_loadu_pd(x + i)));
  alignas(32) double acc[4];
  _mm256_store_pd(acc, vacc);
  for (; i < count; ++i) acc[i & 3] += ms(x[i]);
  return (acc[0] + acc[1]) + (acc[2] + acc[3]);
}

double sum_avx2(const double* x, std::size_t count) {
  return reduce_avx2(
      x, count, [](__m256d v) { return v; }, [](double v) { return v; });
}

double sum_square_avx2(const double* x, std::size_t count) {
  return reduce_avx2(
      x, count, [](__m256d v) { return _mm256_mul_pd(v, v); },
      [](double v) { return v * v; });
}

double sum_quartic_avx2(const double* x, std::size_t count) {
  return reduce_avx2(
      x, count,
      [](__m256d v) {
        const __m256d s = _mm256_mul_pd(v, v);
        return _mm256_mul_pd(s, s);
      },
      [](double v) {
        const double s = v * v;
        return s * s;
      });
}

double sum_indicator_avx2(const double* x, std::size_t count, double c) {
  const __m256d cv = _mm256_set1_pd(c);
  const __m256d one = _mm256_set1_pd(1.0);
  return reduce_avx2(
      x, count,
      [&](__m256d v) {
        return _mm256_and_pd(_mm256_cmp_pd(v, cv, _CMP_GE_OQ), one);
      },
      [&](double v) { return v >= c ? 1.0 : 0.0; });
}

}  // namespace

const Ops* avx2_ops() {
  if (!__builtin_cpu_supports("avx2")) return nullptr;
  static const Ops ops = {
      "avx2",          first_draws_avx2, u01_avx2,
      rademacher_avx2, antithetic_avx2,  right_jump_avx2,
      sum_avx2,        sum_square_avx2,  sum_quartic_avx2,
      sum_indicator_avx2,
  };
  return &ops;
}

}  // namespace treechain::simd

#else  // !__AVX2__ (translation unit built without -mavx2)

#include "treechain/simd/ops.hpp"

namespace treechain::simd {
const Ops* avx2_ops() { return nullptr; }
}  // namespace treechain::simd

#endif
#endif  // x86-64
