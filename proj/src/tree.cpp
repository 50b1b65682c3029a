#include "treechain/tree.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace treechain {

namespace {

constexpr std::size_t words_for(std::uint32_t depth) {
  return (static_cast<std::size_t>(depth) + 63) / 64;
}

// Mask keeping the top `bits` bits of a word (1 <= bits <= 64).
constexpr std::uint64_t top_mask(std::uint32_t bits) {
  return bits >= 64 ? ~0ull : ~(~0ull >> bits);
}

}  // namespace

Vertex Vertex::from_index(std::uint32_t depth, std::uint64_t index) {
  if (depth > 63) throw std::domain_error("Vertex::from_index: depth > 63");
  if (depth < 64 && (index >> depth) != 0)
    throw std::domain_error("Vertex::from_index: index out of range");
  Vertex v;
  v.depth_ = depth;
  if (depth > 0) v.words_.push_back(index << (64 - depth));
  return v;
}

Vertex Vertex::parse(const std::string& text) {
  if (text.empty() || text == "∅") return Vertex();
  Vertex v;
  for (char c : text) {
    if (c == '0')
      v = v.child(false);
    else if (c == '1')
      v = v.child(true);
    else
      throw std::invalid_argument("Vertex::parse: invalid character in path");
  }
  return v;
}

bool Vertex::bit(std::uint32_t level) const {
  if (level >= depth_) throw std::domain_error("Vertex::bit: level >= depth");
  return (words_[level >> 6] >> (63 - (level & 63))) & 1u;
}

Vertex Vertex::child(bool right) const {
  Vertex v = *this;
  if ((v.depth_ & 63) == 0) v.words_.push_back(0);
  if (right) v.words_.back() |= 1ull << (63 - (v.depth_ & 63));
  ++v.depth_;
  return v;
}

Vertex Vertex::parent() const {
  if (depth_ == 0) throw std::domain_error("Vertex::parent: root has no parent");
  return prefix(depth_ - 1);
}

Vertex Vertex::prefix(std::uint32_t j) const {
  if (j > depth_) throw std::domain_error("Vertex::prefix: j > depth");
  Vertex v;
  v.depth_ = j;
  if (j > 0) {
    v.words_.assign(words_.begin(), words_.begin() + words_for(j));
    if ((j & 63) != 0) v.words_.back() &= top_mask(j & 63);
  }
  return v;
}

bool Vertex::is_ancestor_of(const Vertex& other) const {
  if (depth_ > other.depth_) return false;
  if (depth_ == 0) return true;
  const std::size_t full = depth_ >> 6;
  for (std::size_t w = 0; w < full; ++w)
    if (words_[w] != other.words_[w]) return false;
  if ((depth_ & 63) != 0) {
    const std::uint64_t mask = top_mask(depth_ & 63);
    if (words_[full] != (other.words_[full] & mask)) return false;
  }
  return true;
}

std::uint64_t Vertex::index() const {
  if (depth_ > 63) throw std::domain_error("Vertex::index: depth > 63");
  if (depth_ == 0) return 0;
  return words_[0] >> (64 - depth_);
}

std::string Vertex::to_string() const {
  if (depth_ == 0) return "∅";
  std::string s;
  s.reserve(depth_);
  for (std::uint32_t l = 0; l < depth_; ++l) s.push_back(bit(l) ? '1' : '0');
  return s;
}

bool Vertex::operator==(const Vertex& other) const noexcept {
  return depth_ == other.depth_ && words_ == other.words_;
}

bool preorder_less(const Vertex& a, const Vertex& b) {
  const auto aw = a.words();
  const auto bw = b.words();
  const std::size_t n = std::min(aw.size(), bw.size());
  for (std::size_t i = 0; i < n; ++i)
    if (aw[i] != bw[i]) return aw[i] < bw[i];
  return a.depth() < b.depth();
}

Vertex mrca(const Vertex& u, const Vertex& v) {
  std::uint32_t cap = std::min(u.depth(), v.depth());
  const auto uw = u.words();
  const auto vw = v.words();
  const std::size_t n = std::min(uw.size(), vw.size());
  std::uint32_t common = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t x = uw[i] ^ vw[i];
    if (x == 0) {
      common += 64;
    } else {
      common += static_cast<std::uint32_t>(std::countl_zero(x));
      break;
    }
  }
  return u.prefix(std::min(common, cap));
}

Vertex sample_leaf(std::uint32_t k, rng::Stream& stream) {
  Vertex v;
  v.depth_ = k;
  v.words_.resize(words_for(k));
  for (auto& w : v.words_) w = stream.next();
  if (k > 0 && (k & 63) != 0) v.words_.back() &= top_mask(k & 63);
  return v;
}

std::vector<double> mrca_depth_pmf(std::uint32_t k) {
  if (k > 63) throw std::domain_error("mrca_depth_pmf: k > 63");
  std::vector<double> pmf(k + 1);
  for (std::uint32_t j = 0; j < k; ++j) pmf[j] = std::ldexp(1.0, -static_cast<int>(j) - 1);
  pmf[k] = std::ldexp(1.0, -static_cast<int>(k));
  return pmf;
}

std::size_t SpanningTree::vertex_count() const {
  std::size_t count = nodes.size();
  for (const auto& n : nodes)
    if (n.parent >= 0)
      count += n.vertex.depth() - nodes[n.parent].vertex.depth() - 1;
  return count;
}

int SpanningTree::find(const Vertex& v) const {
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].vertex == v) return static_cast<int>(i);
  return -1;
}

SpanningTree spanning_subtree(std::span<const Vertex> leaves) {
  if (leaves.empty())
    throw std::invalid_argument("spanning_subtree: empty leaf set");
  const std::uint32_t d = leaves.front().depth();
  for (const auto& l : leaves)
    if (l.depth() != d)
      throw std::invalid_argument("spanning_subtree: leaf " + l.to_string() +
                                  " has depth " + std::to_string(l.depth()) +
                                  ", expected " + std::to_string(d));

  std::vector<Vertex> closure(leaves.begin(), leaves.end());
  std::sort(closure.begin(), closure.end(), preorder_less);
  closure.erase(std::unique(closure.begin(), closure.end()), closure.end());

  // The mrca closure of a sorted leaf set is generated by adjacent pairs.
  const std::size_t leaf_count = closure.size();
  closure.reserve(2 * leaf_count + 1);
  for (std::size_t i = 0; i + 1 < leaf_count; ++i)
    closure.push_back(mrca(closure[i], closure[i + 1]));
  closure.push_back(Vertex::root());
  std::sort(closure.begin(), closure.end(), preorder_less);
  closure.erase(std::unique(closure.begin(), closure.end()), closure.end());

  SpanningTree tree;
  tree.nodes.resize(closure.size());
  for (std::size_t i = 0; i < closure.size(); ++i)
    tree.nodes[i].vertex = std::move(closure[i]);

  // Preorder guarantees ancestors precede descendants; link each node to
  // the deepest closure vertex on the stack that contains it.
  std::vector<int> stack = {0};
  for (int i = 1; i < static_cast<int>(tree.nodes.size()); ++i) {
    while (!tree.nodes[stack.back()].vertex.is_ancestor_of(tree.nodes[i].vertex))
      stack.pop_back();
    tree.nodes[i].parent = stack.back();
    tree.nodes[stack.back()].children.push_back(i);
    stack.push_back(i);
  }
  return tree;
}

std::vector<Vertex> contracted_edge(const SpanningTree& tree, int node_index) {
  const auto& node = tree.nodes.at(node_index);
  if (node.parent < 0) return {};
  std::vector<Vertex> chain;
  const std::uint32_t from = tree.nodes[node.parent].vertex.depth();
  for (std::uint32_t j = from + 1; j < node.vertex.depth(); ++j)
    chain.push_back(node.vertex.prefix(j));
  return chain;
}

}  // namespace treechain
