#include "treechain/engine.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <stdexcept>

#include "treechain/parallel.hpp"

namespace treechain {

namespace {

constexpr std::uint64_t top_mask(std::uint32_t bits) {
  return bits >= 64 ? ~0ull : ~(~0ull >> bits);
}

}  // namespace

std::uint64_t VertexRngPolicy::vertex_key_words(std::span<const std::uint64_t> words,
                                                std::uint32_t depth) const {
  std::uint64_t key = level_key(depth);
  for (const std::uint64_t w : words) key = rng::fold(key, w);
  return key;
}

std::uint64_t VertexRngPolicy::prefix_key(std::span<const std::uint64_t> words,
                                          std::uint32_t j) const {
  std::uint64_t key = level_key(j);
  if (j == 0) return key;
  const std::size_t nw = (static_cast<std::size_t>(j) + 63) / 64;
  for (std::size_t w = 0; w + 1 < nw; ++w) key = rng::fold(key, words[w]);
  std::uint64_t last = words[nw - 1];
  if ((j & 63) != 0) last &= top_mask(j & 63);
  return rng::fold(key, last);
}

std::uint64_t estimate_memory(std::uint32_t k_max, std::uint64_t state_width) {
  if (k_max >= 64) return UINT64_MAX;
  const std::uint64_t slots = 1ull << k_max;
  std::uint64_t bytes = 0;
  if (__builtin_mul_overflow(slots, state_width, &bytes)) return UINT64_MAX;
  std::uint64_t total = 0;
  if (__builtin_mul_overflow(bytes, 2ull, &total)) return UINT64_MAX;
  return total;
}

GenerationBuffer simulate_full_tree(const KernelFamily& kernel, double x0,
                                    std::uint32_t k_max,
                                    const VertexRngPolicy& policy,
                                    const GenerationVisitor& visitor, int workers,
                                    std::uint32_t cap) {
  if (k_max > 63)
    throw std::invalid_argument("simulate_full_tree: k_max > 63");
  if (k_max > cap)
    throw std::invalid_argument(
        "simulate_full_tree: k_max exceeds the generation cap (" +
        std::to_string(estimate_memory(k_max, sizeof(double))) +
        " bytes estimated)");

  std::vector<double> cur = {x0}, next;
  if (visitor) visitor(0, {cur.data(), cur.size()});
  for (std::uint32_t k = 0; k < k_max; ++k) {
    const std::uint64_t parents = 1ull << k;
    next.resize(2 * parents);
    const std::uint64_t level_key = policy.level_key(k);
    constexpr std::uint64_t kTask = 8192;  // parents per task
    const std::uint64_t tasks = (parents + kTask - 1) / kTask;
    parallel_for(tasks, workers, [&](std::uint64_t b) {
      const std::uint64_t i0 = b * kTask;
      const std::uint64_t len = std::min(kTask, parents - i0);
      kernel.fill_children(level_key, k, i0, len, cur.data() + i0,
                           next.data() + 2 * i0);
    });
    cur.swap(next);
    if (visitor) visitor(k + 1, {cur.data(), cur.size()});
  }
  return {k_max, std::move(cur)};
}

WalkPath simulate_walk(const KernelFamily& kernel, double x0, std::uint32_t steps,
                       const VertexRngPolicy& policy, std::uint64_t walk_id) {
  WalkPath path;
  path.states.reserve(steps + 1);
  path.states.push_back(x0);
  rng::Stream directions = policy.labeled_stream(rng::salt::kWalkDirections, walk_id);
  std::vector<std::uint64_t> words;
  double x = x0;
  for (std::uint32_t depth = 0; depth < steps; ++depth) {
    rng::Stream vertex(policy.vertex_key_words({words.data(), words.size()}, depth));
    const auto [c0, c1] = kernel.sample_children(x, vertex);
    const bool right = directions.next_bit();
    x = right ? c1 : c0;
    if ((depth & 63) == 0) words.push_back(0);
    if (right) words.back() |= 1ull << (63 - (depth & 63));
    path.states.push_back(x);
  }
  return path;
}

std::vector<double> simulate_leaves_joint(const KernelFamily& kernel, double x0,
                                          std::span<const Vertex> leaves,
                                          const VertexRngPolicy& policy) {
  const SpanningTree tree = spanning_subtree(leaves);

  std::vector<double> node_state(tree.nodes.size());
  node_state[0] = x0;
  // Preorder guarantees parents are processed before children; the pair at
  // each closure vertex is drawn once and shared by all outgoing edges.
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    const SpanningNode& node = tree.nodes[i];
    if (node.children.empty()) continue;
    rng::Stream stream(policy.vertex_key(node.vertex));
    const auto pair = kernel.sample_children(node_state[i], stream);
    for (const int ci : node.children) {
      const SpanningNode& child = tree.nodes[ci];
      const auto words = child.vertex.words();
      double x = child.vertex.bit(node.vertex.depth()) ? pair.second : pair.first;
      for (std::uint32_t j = node.vertex.depth() + 1; j < child.vertex.depth(); ++j) {
        rng::Stream mid(policy.prefix_key(words, j));
        const auto p = kernel.sample_children(x, mid);
        x = child.vertex.bit(j) ? p.second : p.first;
      }
      node_state[ci] = x;
    }
  }

  // Closure nodes are preorder-sorted, so each requested leaf is found by
  // binary search (duplicates in the request map to the same node).
  std::vector<double> out;
  out.reserve(leaves.size());
  for (const Vertex& leaf : leaves) {
    auto it = std::lower_bound(
        tree.nodes.begin(), tree.nodes.end(), leaf,
        [](const SpanningNode& n, const Vertex& v) { return preorder_less(n.vertex, v); });
    out.push_back(node_state[it - tree.nodes.begin()]);
  }
  return out;
}

void write_generation_dump(const std::string& path, const GenerationBuffer& g,
                           bool integer_valued) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw std::runtime_error("write_generation_dump: cannot open " + path);
  const char magic[4] = {'T', 'C', 'G', 'B'};
  const std::uint32_t version = 1;
  const std::uint32_t k = g.generation;
  const std::uint32_t kind = integer_valued ? 1u : 0u;
  bool ok = std::fwrite(magic, 1, 4, f) == 4 &&
            std::fwrite(&version, sizeof version, 1, f) == 1 &&
            std::fwrite(&k, sizeof k, 1, f) == 1 &&
            std::fwrite(&kind, sizeof kind, 1, f) == 1 &&
            std::fwrite(g.states.data(), sizeof(double), g.states.size(), f) ==
                g.states.size();
  ok = (std::fclose(f) == 0) && ok;
  if (!ok) throw std::runtime_error("write_generation_dump: write failed: " + path);
}

GenerationBuffer read_generation_dump(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw std::runtime_error("read_generation_dump: cannot open " + path);
  char magic[4];
  std::uint32_t version = 0, k = 0, kind = 0;
  GenerationBuffer g;
  bool ok = std::fread(magic, 1, 4, f) == 4 &&
            std::memcmp(magic, "TCGB", 4) == 0 &&
            std::fread(&version, sizeof version, 1, f) == 1 && version == 1 &&
            std::fread(&k, sizeof k, 1, f) == 1 && k <= 63 &&
            std::fread(&kind, sizeof kind, 1, f) == 1 && kind <= 1;
  if (ok) {
    g.generation = k;
    g.states.resize(1ull << k);
    ok = std::fread(g.states.data(), sizeof(double), g.states.size(), f) ==
         g.states.size();
  }
  std::fclose(f);
  if (!ok) throw std::runtime_error("read_generation_dump: malformed dump: " + path);
  return g;
}

}  // namespace treechain
