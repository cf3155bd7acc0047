#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "qcl/basis.hpp"
#include "qcl/term.hpp"

namespace qcl {

/// Version of the draw protocol below. Bump it whenever the generator, the
/// seeding, or the order of draws changes; reproducibility tests pin it.
inline constexpr int kDrawProtocolVersion = 1;

/// Deterministic random stream identified by (seed, stream index).
///
/// Protocol v1:
///  - engine: std::mt19937_64, seeded through std::seed_seq with the four
///    32-bit words {seed_lo, seed_hi, stream_lo, stream_hi}. Both are fully
///    specified by the C++ standard, so sequences agree across platforms.
///  - bounded draws: Lemire's multiply-shift with rejection on 64-bit
///    outputs (unbiased).
///  - random_term: first the n Rémy grafting draws, then one label draw per
///    leaf in left-to-right order.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed, std::uint64_t stream = 0) : seed_(seed), stream_(stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    engine_.seed(seq);
  }

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, bound). Precondition: bound > 0.
  std::uint64_t below(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("RandomSource::below: empty range");
    unsigned __int128 m = static_cast<unsigned __int128>(next()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        m = static_cast<unsigned __int128>(next()) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
};

/// A plane binary tree in the linked layout of Rémy's algorithm: node ids
/// 0..2n, odd ids internal and even ids leaves. `links[0]` is the root; the
/// internal node j has children links[j] (left) and links[j+1] (right).
struct PlaneTree {
  std::uint32_t internal_nodes = 0;
  std::vector<std::uint32_t> links;

  std::uint32_t root() const noexcept { return links[0]; }
  static bool is_leaf(std::uint32_t node) noexcept { return node % 2 == 0; }
  std::uint32_t left(std::uint32_t node) const noexcept { return links[node]; }
  std::uint32_t right(std::uint32_t node) const noexcept { return links[node + 1]; }

  /// Leaf ids in left-to-right order.
  std::vector<std::uint32_t> leaves_in_order() const {
    std::vector<std::uint32_t> out;
    out.reserve(internal_nodes + 1);
    std::vector<std::uint32_t> work{root()};
    while (!work.empty()) {
      const std::uint32_t v = work.back();
      work.pop_back();
      if (is_leaf(v)) {
        out.push_back(v);
        continue;
      }
      work.push_back(right(v));
      work.push_back(left(v));
    }
    return out;
  }
};

/// Uniform plane binary tree with n internal nodes (Rémy's grafting, in the
/// formulation of Knuth's Algorithm R): each round picks one of the 2k+1
/// existing slots and a side, and grafts a new internal node with a fresh
/// leaf there.
inline PlaneTree remy_tree(std::uint64_t n, RandomSource& rng) {
  if (n > (std::numeric_limits<std::uint32_t>::max() - 1) / 2)
    throw std::length_error("remy_tree: too many nodes");
  PlaneTree tree;
  tree.internal_nodes = static_cast<std::uint32_t>(n);
  tree.links.assign(2 * n + 1, 0);
  for (std::uint32_t k = 1; k <= n; ++k) {
    const std::uint64_t x = rng.below(4ULL * (k - 1) + 2);
    const std::uint32_t side = static_cast<std::uint32_t>(x & 1);
    const std::uint32_t slot = static_cast<std::uint32_t>(x >> 1);
    tree.links[2 * k - side] = 2 * k;
    tree.links[2 * k - 1 + side] = tree.links[slot];
    tree.links[slot] = 2 * k - 1;
  }
  return tree;
}

/// Preorder shape code: '1' per internal node, '0' per leaf.
inline std::string shape_code(const PlaneTree& tree) {
  std::string code;
  code.reserve(tree.links.size());
  std::vector<std::uint32_t> work{tree.root()};
  while (!work.empty()) {
    const std::uint32_t v = work.back();
    work.pop_back();
    if (PlaneTree::is_leaf(v)) {
      code += '0';
      continue;
    }
    code += '1';
    work.push_back(tree.right(v));
    work.push_back(tree.left(v));
  }
  return code;
}

inline std::string shape_code(const Term& t) {
  std::string code;
  std::vector<const Term*> work{&t};
  while (!work.empty()) {
    const Term* u = work.back();
    work.pop_back();
    if (u->is_leaf()) {
      code += '0';
      continue;
    }
    code += '1';
    work.push_back(&u->right());
    work.push_back(&u->left());
  }
  return code;
}

/// Builds the term with the shape of `tree` whose i-th leaf (left to right)
/// carries labels[i].
inline Term label_tree(const PlaneTree& tree, const std::vector<PrimId>& labels) {
  if (labels.size() != static_cast<std::size_t>(tree.internal_nodes) + 1)
    throw std::invalid_argument("label_tree: need one label per leaf");
  // Post-order: leaves are consumed in left-to-right order.
  struct Item {
    std::uint32_t node;
    bool expanded;
  };
  std::vector<Item> work{{tree.root(), false}};
  std::vector<Term> built;
  std::size_t next_label = 0;
  while (!work.empty()) {
    Item item = work.back();
    work.pop_back();
    if (PlaneTree::is_leaf(item.node)) {
      built.push_back(Term::leaf(labels[next_label++]));
      continue;
    }
    if (!item.expanded) {
      work.push_back({item.node, true});
      work.push_back({tree.right(item.node), false});
      work.push_back({tree.left(item.node), false});
      continue;
    }
    Term r = std::move(built.back());
    built.pop_back();
    Term l = std::move(built.back());
    built.pop_back();
    built.push_back(Term::app(std::move(l), std::move(r)));
  }
  return std::move(built.back());
}

/// Uniform random size-n term: a Rémy shape, then independent uniform labels.
inline Term random_term(const Basis& basis, std::uint64_t n, RandomSource& rng) {
  const PlaneTree tree = remy_tree(n, rng);
  std::vector<PrimId> labels(static_cast<std::size_t>(n) + 1);
  for (auto& label : labels) label = PrimId{static_cast<std::uint32_t>(rng.below(basis.size()))};
  return label_tree(tree, labels);
}

}  // namespace qcl
