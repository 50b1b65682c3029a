#include <array>
#include <atomic>
#include <cstdlib>

#include "treechain/simd/ops.hpp"

namespace treechain::simd {
namespace {

const Ops* best_supported() {
#if defined(__x86_64__) || defined(_M_X64)
  if (const Ops* ops = avx2_ops()) return ops;
#endif
  return &scalar_ops();
}

const Ops* resolve(std::string_view name) {
  if (name == "scalar") return &scalar_ops();
#if defined(__x86_64__) || defined(_M_X64)
  if (name == "avx2") return avx2_ops();
#endif
  if (name == "auto") return best_supported();
  return nullptr;
}

std::atomic<const Ops*>& active_slot() {
  static std::atomic<const Ops*> slot{[] {
    if (const char* env = std::getenv("TREECHAIN_SIMD"))
      if (const Ops* ops = resolve(env)) return ops;
    return best_supported();
  }()};
  return slot;
}

}  // namespace

const Ops& active_ops() { return *active_slot().load(std::memory_order_relaxed); }

bool set_backend(std::string_view name) {
  const Ops* ops = resolve(name);
  if (!ops) return false;
  active_slot().store(ops, std::memory_order_relaxed);
  return true;
}

std::span<const std::string_view> backend_names() {
  static const std::array<std::string_view, 3> names = {"scalar", "avx2", "auto"};
  return {names.data(), names.size()};
}

}  // namespace treechain::simd
