#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <variant>
#include <vector>

#include "qcl/basis.hpp"
#include "qcl/term.hpp"

namespace qcl {

enum class Direction : std::uint8_t { Left, Right };

/// Address of a redex: the turns taken from the root to the application node
/// `X N1 ... Nm` whose head X has arity exactly m.
struct RedexSite {
  std::vector<Direction> path;
  friend bool operator==(const RedexSite&, const RedexSite&) = default;
};

struct NormalForm {
  Term result;
  std::uint64_t steps;
};

struct FuelExhausted {
  Term last;
  std::uint64_t steps_taken;
};

using ReductionOutcome = std::variant<NormalForm, FuelExhausted>;

/// A node is a redex when its head is applied to exactly its arity.
inline bool is_redex(const Term& t, const Basis& basis) noexcept {
  return t.is_app() && t.spine_args() == basis.arity(t.head());
}

inline const Term& subterm_at(const Term& t, std::span<const Direction> path) {
  const Term* u = &t;
  for (Direction d : path) u = d == Direction::Left ? &u->left() : &u->right();
  return *u;
}

/// Instantiates a rule right-hand side with the actual arguments (args[i]
/// binds metavariable i+1). Arguments are shared, not copied.
inline Term instantiate(const RewriteTemplate& rule, std::span<const Term> args) {
  const auto nodes = rule.nodes();
  if (nodes.size() == 1) return args[nodes[0].var - 1];
  std::vector<std::optional<Term>> built(nodes.size());
  // Children precede their parents in the flat template layout.
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& n = nodes[i];
    built[i] = n.var != 0 ? args[n.var - 1] : Term::app(*built[n.left], *built[n.right]);
  }
  return *built.back();
}

/// Contracts a redex root X N1 ... Nm to its rule instance.
inline Term contract(const Term& redex, const Basis& basis) {
  const std::uint32_t m = basis.arity(redex.head());
  std::vector<Term> args;
  args.reserve(m);
  const Term* u = &redex;
  for (std::uint32_t i = 0; i < m; ++i, u = &u->left()) args.push_back(u->right());
  std::reverse(args.begin(), args.end());
  return instantiate(basis[redex.head()].rule, args);
}

/// The redex whose root comes first in preorder (node, then left subtree,
/// then right subtree), or nullopt for a normal form.
inline std::optional<RedexSite> find_leftmost_outermost_redex(const Term& t, const Basis& basis) {
  struct Item {
    const Term* term;
    std::size_t depth;
    Direction via;
  };
  std::vector<Item> work{{&t, 0, Direction::Left}};
  std::vector<Direction> path;
  while (!work.empty()) {
    Item item = work.back();
    work.pop_back();
    path.resize(item.depth);
    if (item.depth > 0) path.back() = item.via;
    const Term& u = *item.term;
    if (u.is_leaf()) continue;
    if (is_redex(u, basis)) return RedexSite{path};
    work.push_back({&u.right(), item.depth + 1, Direction::Right});
    work.push_back({&u.left(), item.depth + 1, Direction::Left});
  }
  return std::nullopt;
}

inline bool is_normal_form(const Term& t, const Basis& basis) {
  return !find_leftmost_outermost_redex(t, basis).has_value();
}

/// One normal-order step, or nullopt if `t` is a normal form.
inline std::optional<Term> step(const Term& t, const Basis& basis) {
  auto site = find_leftmost_outermost_redex(t, basis);
  if (!site) return std::nullopt;
  std::vector<const Term*> trail{&t};
  for (Direction d : site->path) trail.push_back(d == Direction::Left ? &trail.back()->left() : &trail.back()->right());
  Term result = contract(*trail.back(), basis);
  for (std::size_t i = site->path.size(); i-- > 0;) {
    const Term& parent = *trail[i];
    result = site->path[i] == Direction::Left ? Term::app(std::move(result), parent.right())
                                              : Term::app(parent.left(), std::move(result));
  }
  return result;
}

namespace detail {

// Normal-order reduction as repeated head reduction. A term X a1 ... ak with
// k >= arity(X) has its head redex first in preorder; once k < arity(X) the
// head is frozen and the arguments are normalised left to right. Frames keep
// the frozen heads so each step costs O(template + new spine), not O(term).
class NormalOrderMachine {
 public:
  explicit NormalOrderMachine(const Basis& basis) : basis_(basis) {}

  ReductionOutcome run(const Term& start, std::uint64_t fuel) {
    fuel_ = fuel;
    steps_ = 0;
    spine_.clear();
    args_.clear();
    frames_.clear();
    normal_memo_.clear();
    Term focus = start;
    for (;;) {
      Term result = focus;
      bool changed = false;
      if (!known_normal(focus)) {
        // Head-reduce the focus.
        PrimId head = unwind(focus);
        while (spine_.size() >= basis_.arity(head)) {
          if (steps_ == fuel_) return exhausted(head);
          head = contract_head(head);
          ++steps_;
          changed = true;
        }
        if (!spine_.empty()) {
          Frame f{head, args_.size(), static_cast<std::uint32_t>(spine_.size()), 0, changed, focus};
          for (auto it = spine_.rbegin(); it != spine_.rend(); ++it) args_.push_back(std::move(*it));
          spine_.clear();
          frames_.push_back(std::move(f));
          focus = args_[frames_.back().base];
          continue;
        }
        if (changed) result = Term::leaf(head);
      }
      // Deliver `result` upwards until some frame has arguments left.
      for (;;) {
        if (frames_.empty()) return NormalForm{std::move(result), steps_};
        Frame& f = frames_.back();
        if (changed) {
          args_[f.base + f.next] = std::move(result);
          f.changed = true;
        }
        if (++f.next < f.count) {
          focus = args_[f.base + f.next];
          break;
        }
        changed = f.changed;
        if (changed) {
          result = apply_all(Term::leaf(f.head), std::span<const Term>(args_).subspan(f.base, f.count));
        } else {
          result = f.original;
          remember_normal(result);
        }
        args_.erase(args_.begin() + static_cast<std::ptrdiff_t>(f.base), args_.end());
        frames_.pop_back();
      }
    }
  }

 private:
  struct Frame {
    PrimId head;
    std::size_t base;     // first argument slot in args_
    std::uint32_t count;  // number of arguments
    std::uint32_t next;   // argument currently being normalised
    bool changed;
    Term original;
  };

  // Shared normal subterms can occur exponentially often in the tree view of
  // a term; large ones are remembered so they are traversed once.
  static constexpr std::uint64_t kMemoMinSize = 64;

  bool known_normal(const Term& t) const {
    return t.size() >= kMemoMinSize && normal_memo_.count(t.identity()) != 0;
  }
  void remember_normal(const Term& t) {
    if (t.size() >= kMemoMinSize) normal_memo_.emplace(t.identity(), t);
  }

  // Loads the left spine of `t` into spine_ (first argument at the back) and
  // returns the head primitive.
  PrimId unwind(const Term& t) {
    const Term* u = &t;
    while (u->is_app()) {
      spine_.push_back(u->right());
      u = &u->left();
    }
    return u->prim();
  }

  PrimId contract_head(PrimId head) {
    const std::uint32_t m = basis_.arity(head);
    call_args_.clear();
    for (std::uint32_t i = 0; i < m; ++i) {
      call_args_.push_back(std::move(spine_.back()));
      spine_.pop_back();
    }
    Term reduct = instantiate(basis_[head].rule, call_args_);
    return unwind(reduct);
  }

  ReductionOutcome exhausted(PrimId head) {
    Term current = Term::leaf(head);
    for (auto it = spine_.rbegin(); it != spine_.rend(); ++it) current = Term::app(std::move(current), *it);
    spine_.clear();
    while (!frames_.empty()) {
      Frame& f = frames_.back();
      args_[f.base + f.next] = std::move(current);
      current = apply_all(Term::leaf(f.head), std::span<const Term>(args_).subspan(f.base, f.count));
      args_.erase(args_.begin() + static_cast<std::ptrdiff_t>(f.base), args_.end());
      frames_.pop_back();
    }
    return FuelExhausted{std::move(current), steps_};
  }

  const Basis& basis_;
  std::uint64_t fuel_ = 0;
  std::uint64_t steps_ = 0;
  std::vector<Term> spine_;
  std::vector<Term> call_args_;
  std::vector<Term> args_;
  std::vector<Frame> frames_;
  std::unordered_map<const void*, Term> normal_memo_;
};

}  // namespace detail

/// Reusable normal-order reducer; keeps its scratch buffers between calls.
/// Not thread-safe: use one per worker.
class Normalizer {
 public:
  explicit Normalizer(const Basis& basis) : machine_(basis) {}
  ReductionOutcome operator()(const Term& t, std::uint64_t fuel) { return machine_.run(t, fuel); }

 private:
  detail::NormalOrderMachine machine_;
};

/// Normal-order reduction with at most `fuel` contractions.
inline ReductionOutcome normalize(const Term& t, const Basis& basis, std::uint64_t fuel) {
  return Normalizer(basis)(t, fuel);
}

/// Exact number of normal-order steps to normal form, or nullopt if the
/// fuel runs out first.
inline std::optional<std::uint64_t> reduction_length(const Term& t, const Basis& basis, std::uint64_t fuel) {
  auto outcome = normalize(t, basis, fuel);
  if (const auto* nf = std::get_if<NormalForm>(&outcome)) return nf->steps;
  return std::nullopt;
}

}  // namespace qcl
