#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "qcl/basis.hpp"
#include "qcl/term.hpp"

namespace qcl {

/// A simple type: a type variable or an arrow `from -> to`.
class SimpleType {
 public:
  static SimpleType var(std::uint32_t index) {
    SimpleType t;
    t.var_ = index;
    return t;
  }
  static SimpleType arrow(SimpleType from, SimpleType to) {
    SimpleType t;
    t.from_ = std::make_shared<const SimpleType>(std::move(from));
    t.to_ = std::make_shared<const SimpleType>(std::move(to));
    return t;
  }

  bool is_var() const noexcept { return !from_; }
  std::uint32_t var_index() const noexcept { return var_; }
  const SimpleType& from() const noexcept { return *from_; }
  const SimpleType& to() const noexcept { return *to_; }

  friend bool operator==(const SimpleType& a, const SimpleType& b) {
    if (a.is_var() != b.is_var()) return false;
    if (a.is_var()) return a.var_ == b.var_;
    return *a.from_ == *b.from_ && *a.to_ == *b.to_;
  }

  /// Variables renumbered 0,1,2,... in order of first left-to-right occurrence.
  SimpleType canonical() const {
    std::unordered_map<std::uint32_t, std::uint32_t> renaming;
    return rename(renaming);
  }

  /// "a -> b -> a"; arrows associate to the right.
  std::string to_string() const {
    if (is_var()) return var_name(var_);
    std::string lhs = from_->to_string();
    if (!from_->is_var()) lhs = "(" + lhs + ")";
    return lhs + " -> " + to_->to_string();
  }

  static std::string var_name(std::uint32_t i) {
    if (i < 26) return std::string(1, static_cast<char>('a' + i));
    return "t" + std::to_string(i);
  }

 private:
  SimpleType rename(std::unordered_map<std::uint32_t, std::uint32_t>& renaming) const {
    if (is_var()) {
      auto [it, fresh] = renaming.emplace(var_, static_cast<std::uint32_t>(renaming.size()));
      return var(it->second);
    }
    SimpleType f = from_->rename(renaming);
    return arrow(std::move(f), to_->rename(renaming));
  }

  std::uint32_t var_ = 0;
  std::shared_ptr<const SimpleType> from_;
  std::shared_ptr<const SimpleType> to_;
};

namespace detail {

// Types as a graph of cells; variables are bound through union-find links.
class Unifier {
 public:
  using Cell = std::uint32_t;

  Cell fresh_var() {
    cells_.push_back({true, 0, 0});
    parent_.push_back(static_cast<Cell>(cells_.size() - 1));
    return static_cast<Cell>(cells_.size() - 1);
  }

  Cell arrow(Cell from, Cell to) {
    cells_.push_back({false, from, to});
    parent_.push_back(static_cast<Cell>(cells_.size() - 1));
    return static_cast<Cell>(cells_.size() - 1);
  }

  Cell find(Cell c) {
    while (parent_[c] != c) {
      parent_[c] = parent_[parent_[c]];
      c = parent_[c];
    }
    return c;
  }

  // Unification over possibly cyclic graphs; finite solutions are those
  // that pass acyclic() afterwards.
  void unify(Cell a, Cell b) {
    std::vector<std::pair<Cell, Cell>> work{{a, b}};
    while (!work.empty()) {
      auto [x, y] = work.back();
      work.pop_back();
      x = find(x);
      y = find(y);
      if (x == y) continue;
      if (cells_[x].is_var) {
        parent_[x] = y;
      } else if (cells_[y].is_var) {
        parent_[y] = x;
      } else {
        parent_[x] = y;
        work.emplace_back(cells_[x].from, cells_[y].from);
        work.emplace_back(cells_[x].to, cells_[y].to);
      }
    }
  }

  /// False iff some type in the graph contains itself.
  bool acyclic() {
    std::vector<Colour> colour(cells_.size(), Colour::White);
    std::vector<std::pair<Cell, bool>> work;
    for (Cell root = 0; root < cells_.size(); ++root) {
      if (colour[find(root)] != Colour::White) continue;
      work.emplace_back(find(root), false);
      while (!work.empty()) {
        auto [c, done] = work.back();
        work.pop_back();
        if (done) {
          colour[c] = Colour::Black;
          continue;
        }
        if (colour[c] == Colour::Black || cells_[c].is_var) continue;
        colour[c] = Colour::Grey;
        work.emplace_back(c, true);
        for (Cell child : {find(cells_[c].from), find(cells_[c].to)}) {
          if (colour[child] == Colour::Grey) return false;
          if (colour[child] == Colour::White) work.emplace_back(child, false);
        }
      }
    }
    return true;
  }

  SimpleType resolve(Cell c) {
    std::unordered_map<Cell, std::uint32_t> names;
    return resolve(c, names);
  }

 private:
  enum class Colour : std::uint8_t { White, Grey, Black };

  struct Data {
    bool is_var;
    Cell from;
    Cell to;
  };

  SimpleType resolve(Cell c, std::unordered_map<Cell, std::uint32_t>& names) {
    c = find(c);
    if (cells_[c].is_var) {
      auto [it, fresh] = names.emplace(c, static_cast<std::uint32_t>(names.size()));
      return SimpleType::var(it->second);
    }
    SimpleType from = resolve(cells_[c].from, names);
    return SimpleType::arrow(std::move(from), resolve(cells_[c].to, names));
  }

  std::vector<Data> cells_;
  std::vector<Cell> parent_;
};

}  // namespace detail

/// Principal simple type of an SK-term under the S and K axiom schemes and
/// modus ponens, in canonical variable numbering; nullopt when untypeable.
/// Throws std::invalid_argument if `basis` is not the SK basis.
inline std::optional<SimpleType> infer_principal_type(const Term& t, const Basis& basis) {
  if (!basis.is_sk()) throw std::invalid_argument("principal types are defined for the SK basis only");
  const PrimId s_id = *basis.find("S");

  detail::Unifier u;
  auto axiom = [&](PrimId id) {
    const auto a = u.fresh_var();
    const auto b = u.fresh_var();
    if (id != s_id) return u.arrow(a, u.arrow(b, a));  // a -> b -> a
    const auto c = u.fresh_var();
    const auto abc = u.arrow(a, u.arrow(b, c));
    const auto ab = u.arrow(a, b);
    return u.arrow(abc, u.arrow(ab, u.arrow(a, c)));  // (a->b->c) -> (a->b) -> a -> c
  };

  // Post-order over the tree; `types` holds the cells of finished subterms.
  struct Item {
    const Term* term;
    bool expanded;
  };
  std::vector<Item> work{{&t, false}};
  std::vector<detail::Unifier::Cell> types;
  while (!work.empty()) {
    Item item = work.back();
    work.pop_back();
    if (item.term->is_leaf()) {
      types.push_back(axiom(item.term->prim()));
      continue;
    }
    if (!item.expanded) {
      work.push_back({item.term, true});
      work.push_back({&item.term->right(), false});
      work.push_back({&item.term->left(), false});
      continue;
    }
    const auto arg = types.back();
    types.pop_back();
    const auto fn = types.back();
    types.pop_back();
    const auto result = u.fresh_var();
    u.unify(fn, u.arrow(arg, result));
    types.push_back(result);
  }
  if (!u.acyclic()) return std::nullopt;
  return u.resolve(types.back());
}

}  // namespace qcl
