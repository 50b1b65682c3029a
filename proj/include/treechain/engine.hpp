#pragma once

// Simulation drivers: full-tree generation streaming with ping-pong dense
// buffers, random-walk paths, and exact joint leaf sampling along spanning
// subtrees. All randomness follows the per-vertex stream discipline of
// VertexRngPolicy, which is what makes joint leaf sampling a bit-exact
// restriction of the full tree and results independent of worker count.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "treechain/kernels.hpp"
#include "treechain/tree.hpp"

namespace treechain {

// Derives every stream of a simulation from one master seed.
//  - the child pair at vertex v is drawn from Stream(vertex_key(v)),
//  - auxiliary streams (walk directions, leaf sampling, replicates, ...)
//    fold a purpose salt plus an index.
struct VertexRngPolicy {
  std::uint64_t master_seed = 1;

  [[nodiscard]] std::uint64_t tree_key() const {
    return rng::fold(master_seed, rng::salt::kTree);
  }
  [[nodiscard]] std::uint64_t level_key(std::uint32_t depth) const {
    return rng::fold(tree_key(), depth);
  }
  // Stream key for the vertex with the given left-aligned path words.
  [[nodiscard]] std::uint64_t vertex_key_words(std::span<const std::uint64_t> words,
                                               std::uint32_t depth) const;
  [[nodiscard]] std::uint64_t vertex_key(const Vertex& v) const {
    return vertex_key_words(v.words(), v.depth());
  }
  // Stream key for the depth-j prefix of the vertex with these words,
  // without materializing the prefix.
  [[nodiscard]] std::uint64_t prefix_key(std::span<const std::uint64_t> words,
                                         std::uint32_t j) const;

  [[nodiscard]] rng::Stream labeled_stream(std::uint64_t salt,
                                           std::uint64_t index) const {
    return rng::Stream(rng::fold(rng::fold(master_seed, salt), index));
  }
  // Independent policy for replicate r of an experiment.
  [[nodiscard]] VertexRngPolicy replicate(std::uint64_t r) const {
    return {rng::fold(rng::fold(master_seed, rng::salt::kReplicate), r)};
  }
};

// Dense states of one generation; index i holds the vertex whose path bits
// are the binary digits of i, so the children of index i sit at 2i and 2i+1
// in the next generation.
struct GenerationBuffer {
  std::uint32_t generation = 0;
  std::vector<double> states;

  [[nodiscard]] std::span<const double> view() const {
    return {states.data(), states.size()};
  }
};

struct WalkPath {
  std::vector<double> states;  // states[j] = R_j, j = 0..steps
};

using GenerationVisitor =
    std::function<void(std::uint32_t k, std::span<const double> states)>;

// Ping-pong bytes for a full-tree run to generation k_max (saturates at
// UINT64_MAX instead of overflowing).
std::uint64_t estimate_memory(std::uint32_t k_max, std::uint64_t state_width);

inline constexpr std::uint32_t kDefaultFullTreeCap = 26;

// Streams generations 0..k_max through `visitor` and returns generation
// k_max. Throws std::invalid_argument when k_max exceeds the cap (default
// 26, about 1 GiB of ping-pong buffers at 8-byte states) or 63.
GenerationBuffer simulate_full_tree(const KernelFamily& kernel, double x0,
                                    std::uint32_t k_max,
                                    const VertexRngPolicy& policy,
                                    const GenerationVisitor& visitor = {},
                                    int workers = 1,
                                    std::uint32_t cap = kDefaultFullTreeCap);

// Observes the tree along a uniformly random root-to-leaf descent: state
// draws come from the visited vertices' streams, direction bits from the
// policy's walk stream indexed by walk_id. Depth is unrestricted.
WalkPath simulate_walk(const KernelFamily& kernel, double x0,
                       std::uint32_t steps, const VertexRngPolicy& policy,
                       std::uint64_t walk_id = 0);

// Exact joint sample of the full tree restricted to `leaves` (nonempty,
// common depth, duplicates allowed): value i corresponds to leaves[i].
// Cost is O(|leaves| * depth); depth may far exceed the full-tree cap.
std::vector<double> simulate_leaves_joint(const KernelFamily& kernel, double x0,
                                          std::span<const Vertex> leaves,
                                          const VertexRngPolicy& policy);

// Generation dump: "TCGB", u32 version, u32 k, u32 state kind (0 real,
// 1 integer-valued), then 2^k little-endian f64 states.
void write_generation_dump(const std::string& path, const GenerationBuffer& g,
                           bool integer_valued);
GenerationBuffer read_generation_dump(const std::string& path);

}  // namespace treechain
