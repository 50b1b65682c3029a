#pragma once

// Exact combinatorics of the complete binary tree: vertex encoding,
// prefixes, most recent common ancestors, uniform leaf sampling, the
// MRCA-depth law, and spanning subtrees of leaf sets.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "treechain/rng.hpp"

namespace treechain {

// A vertex of the complete binary tree, encoded as (depth, bit path).
// The path is stored most-significant-first: the bit chosen at level L
// (0-indexed from the root) sits in word L/64 at bit position 63 - L%64.
// Shallow vertices (depth <= 64) use a single word, so prefix and mrca are
// a couple of shifts; deeper vertices -- which arise only in joint leaf
// sampling, never in materialized generations -- extend the same layout
// word by word.
class Vertex {
 public:
  Vertex() = default;  // root

  static Vertex root() { return Vertex(); }

  // Vertex of generation `depth` whose path bits are the binary digits of
  // `index` (most significant first). Requires depth <= 63.
  static Vertex from_index(std::uint32_t depth, std::uint64_t index);

  // Parses "0110..."; "∅" or "" is the root.
  static Vertex parse(const std::string& text);

  [[nodiscard]] std::uint32_t depth() const noexcept { return depth_; }
  [[nodiscard]] bool is_root() const noexcept { return depth_ == 0; }

  // Bit chosen at level `level` (0 <= level < depth).
  [[nodiscard]] bool bit(std::uint32_t level) const;

  [[nodiscard]] Vertex child(bool right) const;
  [[nodiscard]] Vertex parent() const;        // requires depth >= 1
  [[nodiscard]] Vertex prefix(std::uint32_t j) const;  // ancestor in T_j

  [[nodiscard]] bool is_ancestor_of(const Vertex& other) const;

  // Buffer index in a dense generation array. Requires depth <= 63.
  [[nodiscard]] std::uint64_t index() const;

  // Path words, left-aligned as described above.
  [[nodiscard]] std::span<const std::uint64_t> words() const noexcept {
    return {words_.data(), words_.size()};
  }

  // Bit string; the root renders as "∅".
  [[nodiscard]] std::string to_string() const;

  bool operator==(const Vertex& other) const noexcept;
  bool operator!=(const Vertex& other) const noexcept { return !(*this == other); }

 private:
  friend Vertex sample_leaf(std::uint32_t k, rng::Stream& stream);

  std::uint32_t depth_ = 0;
  std::vector<std::uint64_t> words_;
};

// Lexicographic order on bit strings with prefixes first; a preorder
// depth-first traversal of the tree visits vertices in this order.
bool preorder_less(const Vertex& a, const Vertex& b);

// Longest common prefix of u and v.
Vertex mrca(const Vertex& u, const Vertex& v);

// Uniform draw from the 2^k vertices of T_k.
Vertex sample_leaf(std::uint32_t k, rng::Stream& stream);

// Law of depth(mrca) for two independent uniform leaves of T_k:
// P(j) = 2^-(j+1) for j < k and P(k) = 2^-k (the leaves coincide).
// Requires k <= 63.
std::vector<double> mrca_depth_pmf(std::uint32_t k);

// Closure of {root} + leaves under pairwise mrca, with parent->child edges
// annotated by the tree vertices they contract.
struct SpanningNode {
  Vertex vertex;
  int parent = -1;                  // -1 at the root
  std::vector<int> children;        // indices into SpanningTree::nodes
  std::vector<Vertex> compressed;   // strictly between parent and vertex,
                                    // in root-to-leaf order
};

struct SpanningTree {
  std::vector<SpanningNode> nodes;  // preorder; nodes[0] is the root
  [[nodiscard]] std::size_t vertex_count() const;  // closure + contracted
  [[nodiscard]] int find(const Vertex& v) const;   // node index or -1
};

// Requires a nonempty leaf set of common depth. Duplicate leaves are merged.
SpanningTree spanning_subtree(std::span<const Vertex> leaves);

// The tree vertices contracted into the edge parent(node) -> node, in
// root-to-leaf order, excluding both endpoints. Materialized on demand;
// deep edges are walked implicitly during simulation.
std::vector<Vertex> contracted_edge(const SpanningTree& tree, int node_index);

}  // namespace treechain
