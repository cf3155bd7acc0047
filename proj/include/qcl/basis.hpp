#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qcl/detail/syntax.hpp"

namespace qcl {

/// Index of a primitive combinator within its basis.
enum class PrimId : std::uint32_t {};

constexpr std::uint32_t index_of(PrimId id) noexcept { return static_cast<std::uint32_t>(id); }

class BasisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Right-hand side of a rule `X N1 ... Nm -> M`: a binary tree whose leaves
/// are metavariable indices 1..m. Stored flat; children precede parents and
/// the root is the last node.
class RewriteTemplate {
 public:
  struct Node {
    std::uint32_t var;  // 1-based metavariable for leaves, 0 for applications
    std::uint32_t left;
    std::uint32_t right;
  };

  static RewriteTemplate parse(std::string_view text) {
    RewriteTemplate tpl;
    Builder builder{tpl.nodes_};
    detail::ApplicativeParser<Builder> parser(text, builder);
    parser.parse();
    return tpl;
  }

  std::span<const Node> nodes() const noexcept { return nodes_; }
  std::uint32_t root() const noexcept { return static_cast<std::uint32_t>(nodes_.size() - 1); }

  std::uint32_t max_var() const noexcept {
    std::uint32_t m = 0;
    for (const auto& n : nodes_) m = std::max(m, n.var);
    return m;
  }

  std::string to_string() const {
    std::string out;
    print(root(), out);
    return out;
  }

  friend bool operator==(const RewriteTemplate& a, const RewriteTemplate& b) {
    return a.to_string() == b.to_string();
  }

 private:
  struct Builder {
    using value_type = std::uint32_t;
    std::vector<Node>& nodes;

    value_type atom(std::string_view word, std::size_t pos) {
      std::uint32_t v = 0;
      for (char c : word) {
        if (c < '0' || c > '9') throw ParseError("template leaves must be metavariable indices", pos);
        v = v * 10 + static_cast<std::uint32_t>(c - '0');
        if (v > 1'000'000) throw ParseError("metavariable index too large", pos);
      }
      if (v == 0) throw ParseError("metavariable indices start at 1", pos);
      nodes.push_back({v, 0, 0});
      return static_cast<value_type>(nodes.size() - 1);
    }
    value_type apply(value_type l, value_type r) {
      nodes.push_back({0, l, r});
      return static_cast<value_type>(nodes.size() - 1);
    }
  };

  void print(std::uint32_t i, std::string& out) const {
    const Node& n = nodes_[i];
    if (n.var != 0) {
      out += std::to_string(n.var);
      return;
    }
    print(n.left, out);
    out += ' ';
    const bool paren = nodes_[n.right].var == 0;
    if (paren) out += '(';
    print(n.right, out);
    if (paren) out += ')';
  }

  std::vector<Node> nodes_;
};

struct PrimitiveCombinator {
  std::string name;
  std::uint32_t arity = 0;
  RewriteTemplate rule;
};

/// A finite, ordered set of primitive combinators. `size()` is the
/// cardinality d used throughout the counting formulas.
///
/// The designated S- and K-equivalents are term texts over this basis used to
/// build the divergent term (S(SKK)(SKK))(S(SKK)(SKK)); they default to
/// primitives literally named "S" and "K".
class Basis {
 public:
  struct Designated {
    std::optional<std::string> s;
    std::optional<std::string> k;
  };

  explicit Basis(std::vector<PrimitiveCombinator> primitives, Designated designated = {})
      : primitives_(std::move(primitives)), designated_(std::move(designated)) {
    if (primitives_.empty()) throw BasisError("basis must contain at least one primitive");
    if (primitives_.size() > 0xffffffffu) throw BasisError("basis too large");
    std::unordered_set<std::string> seen;
    for (const auto& p : primitives_) {
      if (!detail::is_identifier(p.name))
        throw BasisError("invalid primitive name '" + p.name + "'");
      if (!seen.insert(p.name).second) throw BasisError("duplicate primitive name '" + p.name + "'");
      if (p.arity < 1) throw BasisError("primitive '" + p.name + "' must have arity >= 1");
      if (p.rule.max_var() > p.arity)
        throw BasisError("template of '" + p.name + "' references a metavariable beyond its arity");
    }
    if (!designated_.s && find("S")) designated_.s = "S";
    if (!designated_.k && find("K")) designated_.k = "K";
  }

  std::size_t size() const noexcept { return primitives_.size(); }
  std::span<const PrimitiveCombinator> primitives() const noexcept { return primitives_; }
  const PrimitiveCombinator& operator[](PrimId id) const { return primitives_.at(index_of(id)); }
  std::uint32_t arity(PrimId id) const noexcept { return primitives_[index_of(id)].arity; }
  const std::string& name(PrimId id) const noexcept { return primitives_[index_of(id)].name; }
  const Designated& designated() const noexcept { return designated_; }

  std::optional<PrimId> find(std::string_view name) const noexcept {
    for (std::size_t i = 0; i < primitives_.size(); ++i)
      if (primitives_[i].name == name) return PrimId{static_cast<std::uint32_t>(i)};
    return std::nullopt;
  }

  /// True when this is exactly {S, K} with the standard rules (any order).
  bool is_sk() const {
    if (primitives_.size() != 2) return false;
    auto s = find("S");
    auto k = find("K");
    return s && k && (*this)[*s].arity == 3 && (*this)[*s].rule.to_string() == "1 3 (2 3)" &&
           (*this)[*k].arity == 2 && (*this)[*k].rule.to_string() == "1";
  }

  // {"primitives":[{"name":"S","arity":3,"template":"1 3 (2 3)"}, ...],
  //  "designated": {"S": "<term>", "K": "<term>"}}   (designated is optional)
  static Basis from_json(const nlohmann::json& j) {
    try {
      std::vector<PrimitiveCombinator> prims;
      for (const auto& p : j.at("primitives")) {
        prims.push_back({p.at("name").get<std::string>(), p.at("arity").get<std::uint32_t>(),
                         RewriteTemplate::parse(p.at("template").get<std::string>())});
      }
      Designated d;
      if (j.contains("designated")) {
        const auto& dj = j.at("designated");
        if (dj.contains("S")) d.s = dj.at("S").get<std::string>();
        if (dj.contains("K")) d.k = dj.at("K").get<std::string>();
      }
      return Basis(std::move(prims), std::move(d));
    } catch (const nlohmann::json::exception& e) {
      throw BasisError(std::string("malformed basis description: ") + e.what());
    } catch (const ParseError& e) {
      throw BasisError(std::string("malformed rewrite template: ") + e.what());
    }
  }

  static Basis from_json_text(std::string_view text) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw BasisError(std::string("basis file is not valid JSON: ") + e.what());
    }
    return from_json(j);
  }

  static Basis load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw BasisError("cannot open basis file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return from_json_text(buf.str());
  }

  nlohmann::json to_json() const {
    nlohmann::json prims = nlohmann::json::array();
    for (const auto& p : primitives_)
      prims.push_back({{"name", p.name}, {"arity", p.arity}, {"template", p.rule.to_string()}});
    nlohmann::json j{{"primitives", prims}};
    if (designated_.s || designated_.k) {
      nlohmann::json d = nlohmann::json::object();
      if (designated_.s) d["S"] = *designated_.s;
      if (designated_.k) d["K"] = *designated_.k;
      j["designated"] = d;
    }
    return j;
  }

 private:
  std::vector<PrimitiveCombinator> primitives_;
  Designated designated_;
};

/// The classical basis: S x y z -> x z (y z), K x y -> x.
inline Basis sk_basis() {
  return Basis({{"S", 3, RewriteTemplate::parse("1 3 (2 3)")}, {"K", 2, RewriteTemplate::parse("1")}});
}

}  // namespace qcl
