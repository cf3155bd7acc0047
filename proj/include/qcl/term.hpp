#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qcl/basis.hpp"
#include "qcl/detail/syntax.hpp"

namespace qcl {

namespace detail {
struct TermNode;

constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

constexpr std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) noexcept {
  return a > std::numeric_limits<std::uint64_t>::max() - b ? std::numeric_limits<std::uint64_t>::max()
                                                           : a + b;
}
}  // namespace detail

/// An immutable combinator: a plane binary tree with basis-labelled leaves.
///
/// Terms are cheap handles to shared nodes, so a subterm may appear in
/// several places without being copied. All observable operations treat the
/// term as a tree. Size counts application nodes; a leaf has size 0.
class Term {
 public:
  static Term leaf(PrimId id);
  static Term app(Term fn, Term arg);

  bool is_leaf() const noexcept;
  bool is_app() const noexcept { return !is_leaf(); }

  /// Primitive at a leaf. Precondition: is_leaf().
  PrimId prim() const noexcept;
  const Term& left() const noexcept;
  const Term& right() const noexcept;

  /// Number of application nodes (saturates at 2^64-1 for huge shared terms).
  std::uint64_t size() const noexcept;
  /// Primitive at the end of the left spine.
  PrimId head() const noexcept;
  /// Number of arguments the head is applied to along the left spine.
  std::uint32_t spine_args() const noexcept;
  std::uint64_t hash() const noexcept;

  /// Identity of the underlying node; equal identities imply equal terms.
  const void* identity() const noexcept { return node_.get(); }
  long use_count() const noexcept { return node_.use_count(); }

  friend bool operator==(const Term& a, const Term& b);

 private:
  friend struct detail::TermNode;
  Term() = default;
  explicit Term(std::shared_ptr<const detail::TermNode> node) : node_(std::move(node)) {}
  std::shared_ptr<const detail::TermNode> node_;
};

namespace detail {

struct TermNode {
  PrimId prim{};  // leaf label; head primitive for applications
  std::uint32_t spine_args = 0;
  std::uint64_t size = 0;
  std::uint64_t hash = 0;
  Term left;
  Term right;
  bool leaf = true;

  TermNode() = default;
  TermNode(const TermNode&) = delete;
  TermNode& operator=(const TermNode&) = delete;

  // Deep left or right chains would otherwise recurse once per node on
  // destruction; children are drained through a thread-local worklist.
  ~TermNode();
};

}  // namespace detail

inline Term Term::leaf(PrimId id) {
  auto node = std::make_shared<detail::TermNode>();
  node->prim = id;
  node->hash = detail::mix64(index_of(id) + 0x9e3779b97f4a7c15ULL);
  return Term(std::move(node));
}

inline Term Term::app(Term fn, Term arg) {
  if (!fn.node_ || !arg.node_) throw std::invalid_argument("Term::app on an empty term");
  auto node = std::make_shared<detail::TermNode>();
  node->leaf = false;
  node->prim = fn.node_->prim;
  node->spine_args =
      fn.node_->spine_args == std::numeric_limits<std::uint32_t>::max() ? fn.node_->spine_args
                                                                        : fn.node_->spine_args + 1;
  node->size = detail::saturating_add(detail::saturating_add(fn.node_->size, arg.node_->size), 1);
  node->hash = detail::mix64(fn.node_->hash * 0x100000001b3ULL ^ (arg.node_->hash + 0x7f4a7c15ULL));
  node->left = std::move(fn);
  node->right = std::move(arg);
  return Term(std::move(node));
}

inline bool Term::is_leaf() const noexcept { return node_->leaf; }
inline PrimId Term::prim() const noexcept { return node_->prim; }
inline const Term& Term::left() const noexcept { return node_->left; }
inline const Term& Term::right() const noexcept { return node_->right; }
inline std::uint64_t Term::size() const noexcept { return node_->size; }
inline PrimId Term::head() const noexcept { return node_->prim; }
inline std::uint32_t Term::spine_args() const noexcept { return node_->spine_args; }
inline std::uint64_t Term::hash() const noexcept { return node_->hash; }

inline detail::TermNode::~TermNode() {
  thread_local std::vector<Term> pending;
  thread_local bool draining = false;
  if (left.node_) pending.push_back(std::move(left));
  if (right.node_) pending.push_back(std::move(right));
  if (draining) return;
  draining = true;
  while (!pending.empty()) {
    Term t = std::move(pending.back());
    pending.pop_back();
    // `t` may release the last reference here, which re-enters this
    // destructor and appends its children to `pending`.
  }
  draining = false;
}

inline bool operator==(const Term& a, const Term& b) {
  std::vector<std::pair<const Term*, const Term*>> work{{&a, &b}};
  while (!work.empty()) {
    auto [x, y] = work.back();
    work.pop_back();
    if (x->identity() == y->identity()) continue;
    if (x->hash() != y->hash() || x->size() != y->size() || x->is_leaf() != y->is_leaf()) return false;
    if (x->is_leaf()) {
      if (x->prim() != y->prim()) return false;
      continue;
    }
    work.emplace_back(&x->right(), &y->right());
    work.emplace_back(&x->left(), &y->left());
  }
  return true;
}

struct TermHash {
  std::size_t operator()(const Term& t) const noexcept { return static_cast<std::size_t>(t.hash()); }
};

inline std::uint64_t size(const Term& t) noexcept { return t.size(); }
inline std::uint64_t leaf_count(const Term& t) noexcept { return detail::saturating_add(t.size(), 1); }

/// Applies `head` to `args` left to right: head a1 a2 ... ak.
inline Term apply_all(Term head, std::span<const Term> args) {
  for (const Term& a : args) head = Term::app(std::move(head), a);
  return head;
}

/// Renders with the usual conventions: juxtaposition associates left and
/// only right-nested applications are parenthesised, e.g. "S (K K) S".
inline std::string to_string(const Term& t, const Basis& basis) {
  std::string out;
  // Each entry is either a subterm to print or a literal to emit.
  struct Item {
    const Term* term;
    const char* literal;
  };
  std::vector<Item> work{{&t, nullptr}};
  while (!work.empty()) {
    Item item = work.back();
    work.pop_back();
    if (item.literal) {
      out += item.literal;
      continue;
    }
    const Term& u = *item.term;
    if (u.is_leaf()) {
      out += basis.name(u.prim());
      continue;
    }
    if (u.right().is_app()) {
      work.push_back({nullptr, ")"});
      work.push_back({&u.right(), nullptr});
      work.push_back({nullptr, " ("});
    } else {
      work.push_back({&u.right(), nullptr});
      work.push_back({nullptr, " "});
    }
    work.push_back({&u.left(), nullptr});
  }
  return out;
}

/// Parses `term := atom {atom}`, `atom := NAME | '(' term ')'`,
/// NAME = [A-Za-z][A-Za-z0-9]*, names resolved against `basis`.
inline Term parse_term(std::string_view text, const Basis& basis) {
  struct Builder {
    using value_type = Term;
    const Basis& basis;
    Term atom(std::string_view word, std::size_t pos) {
      if (!detail::is_identifier(word)) throw ParseError("invalid name '" + std::string(word) + "'", pos);
      auto id = basis.find(word);
      if (!id) throw ParseError("unknown primitive '" + std::string(word) + "'", pos);
      return Term::leaf(*id);
    }
    Term apply(Term f, Term x) { return Term::app(std::move(f), std::move(x)); }
  };
  Builder builder{basis};
  detail::ApplicativeParser<Builder> parser(text, builder);
  return parser.parse();
}

/// True iff `pattern` occurs as a (not necessarily proper) subtree of `t`.
inline bool contains_subterm(const Term& t, const Term& pattern) {
  const std::uint64_t psize = pattern.size();
  const std::uint64_t phash = pattern.hash();
  std::vector<const Term*> work{&t};
  while (!work.empty()) {
    const Term* u = work.back();
    work.pop_back();
    if (u->size() < psize) continue;
    if (u->size() == psize) {
      if (u->hash() == phash && *u == pattern) return true;
      continue;
    }
    work.push_back(&u->right());
    work.push_back(&u->left());
  }
  return false;
}

class MissingDesignatedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The basis' designated S- or K-equivalent term (`which` is 'S' or 'K').
inline Term designated_term(const Basis& basis, char which) {
  const auto& text = which == 'S' ? basis.designated().s : basis.designated().k;
  if (!text)
    throw MissingDesignatedError(std::string("basis has no designated ") + which + "-equivalent");
  return parse_term(*text, basis);
}

/// S I I with I = S K K, built from the designated S and K.
inline Term omega(const Basis& basis) {
  const Term s = designated_term(basis, 'S');
  const Term k = designated_term(basis, 'K');
  const Term i = Term::app(Term::app(s, k), k);
  return Term::app(Term::app(s, i), i);
}

/// The divergent term (S I I)(S I I).
inline Term omega_omega(const Basis& basis) {
  const Term w = omega(basis);
  return Term::app(w, w);
}

/// Replaces the leftmost leaf of `t` by omega_omega(basis), keeping every
/// other node in place.
inline Term phi_transform(const Term& t, const Basis& basis) {
  Term result = omega_omega(basis);
  std::vector<const Term*> spine;
  for (const Term* u = &t; u->is_app(); u = &u->left()) spine.push_back(u);
  for (auto it = spine.rbegin(); it != spine.rend(); ++it) result = Term::app(std::move(result), (*it)->right());
  return result;
}

}  // namespace qcl
