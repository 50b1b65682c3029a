#pragma once

// Counter-based splittable RNG used for all randomness in the library.
//
// Every random draw is a pure function of (master_seed, purpose salt,
// derivation words..., counter).  Nothing is sequential across vertices or
// replicates, so simulations are reproducible independent of traversal
// order, worker count, or SIMD width.  The mixer is the SplitMix64
// finalizer; a stream with key K emits mix64(K + (i+1)*golden) at counter i,
// which is exactly the SplitMix64 sequence seeded at K.

#include <cstdint>

namespace treechain::rng {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += kGolden;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Folds one word into a key. Chained folds give per-(depth, path) keys.
constexpr std::uint64_t fold(std::uint64_t key, std::uint64_t word) noexcept {
  return mix64(key ^ word);
}

// Purpose salts. Distinct components of an experiment never share a stream.
namespace salt {
inline constexpr std::uint64_t kTree = 0x7472656520647277ull;       // tree draws
inline constexpr std::uint64_t kWalkDirections = 0x77616c6b20646972ull;
inline constexpr std::uint64_t kLeafSampling = 0x6c6561662073616dull;
inline constexpr std::uint64_t kReplicate = 0x7265706c69636174ull;
inline constexpr std::uint64_t kBootstrap = 0x626f6f7473747261ull;
inline constexpr std::uint64_t kMonteCarlo = 0x6d6f6e7465636172ull;
}  // namespace salt

// Stream key for the dense-index vertex (depth, index), depth <= 63: folds
// the left-aligned path word into the level key. The root folds nothing.
constexpr std::uint64_t vertex_key_at(std::uint64_t level_key, std::uint32_t depth,
                                      std::uint64_t index) noexcept {
  return depth == 0 ? level_key : fold(level_key, index << (64 - depth));
}

// Canonical u64 -> [0,1) conversion with 52-bit resolution. Chosen so the
// AVX2 path reproduces it bit for bit (52-bit integers convert exactly).
constexpr double to_u01(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 12) * 0x1.0p-52;
}

// Inverse standard normal CDF, algorithm AS 241 (PPND16). Max absolute
// error about 1e-15; strictly monotone; ppnd(0.5) == 0.
double inverse_normal_cdf(double p) noexcept;

// One standard normal from one uniform word (inverse-CDF method).
inline double to_standard_normal(std::uint64_t bits) noexcept {
  double u = to_u01(bits);
  if (u <= 0.0) u = 0x1.0p-53;  // open the left endpoint
  return inverse_normal_cdf(u);
}

// Counter-based stream. `at(i)` is order-independent; `next()` is the
// convenience sequential view of the same sequence.
class Stream {
 public:
  constexpr explicit Stream(std::uint64_t key) noexcept : key_(key) {}

  [[nodiscard]] constexpr std::uint64_t at(std::uint64_t i) const noexcept {
    return mix64(key_ + (i + 1) * kGolden);
  }
  std::uint64_t next() noexcept { return at(counter_++); }
  double next_u01() noexcept { return to_u01(next()); }
  double next_standard_normal() noexcept { return to_standard_normal(next()); }
  bool next_bit() noexcept { return (next() >> 63) != 0; }

  [[nodiscard]] constexpr std::uint64_t key() const noexcept { return key_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace treechain::rng
