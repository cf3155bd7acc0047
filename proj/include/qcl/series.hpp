#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <numeric>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qcl/bigcount.hpp"

namespace qcl {

/// Truncated power series a_0 + a_1 z + ... + a_N z^N with exact integer
/// coefficients.
class CoefficientStream {
 public:
  CoefficientStream() = default;
  explicit CoefficientStream(std::vector<BigCount> coefficients) : coeffs_(std::move(coefficients)) {
    if (coeffs_.empty()) throw std::invalid_argument("CoefficientStream needs at least one coefficient");
  }

  static CoefficientStream zero(std::uint64_t order) {
    return CoefficientStream(std::vector<BigCount>(order + 1, BigCount(0)));
  }
  static CoefficientStream monomial(std::uint64_t k, std::uint64_t order) {
    auto s = zero(order);
    if (k <= order) s.coeffs_[k] = 1;
    return s;
  }
  static CoefficientStream constant(BigCount c, std::uint64_t order) {
    auto s = zero(order);
    s.coeffs_[0] = std::move(c);
    return s;
  }

  std::uint64_t order() const noexcept { return coeffs_.size() - 1; }
  const BigCount& operator[](std::uint64_t n) const { return coeffs_.at(n); }
  std::span<const BigCount> coefficients() const noexcept { return coeffs_; }

  CoefficientStream truncated(std::uint64_t order) const {
    if (order > this->order()) throw std::invalid_argument("cannot extend a truncated series");
    return CoefficientStream(std::vector<BigCount>(coeffs_.begin(), coeffs_.begin() + order + 1));
  }

  friend CoefficientStream operator+(const CoefficientStream& a, const CoefficientStream& b) {
    const std::uint64_t order = std::min(a.order(), b.order());
    auto s = zero(order);
    for (std::uint64_t i = 0; i <= order; ++i) s.coeffs_[i] = a.coeffs_[i] + b.coeffs_[i];
    return s;
  }

  friend CoefficientStream operator*(const CoefficientStream& a, const CoefficientStream& b) {
    const std::uint64_t order = std::min(a.order(), b.order());
    auto s = zero(order);
    for (std::uint64_t i = 0; i <= order; ++i) {
      if (a.coeffs_[i] == 0) continue;
      for (std::uint64_t j = 0; i + j <= order; ++j) s.coeffs_[i + j] += a.coeffs_[i] * b.coeffs_[j];
    }
    return s;
  }

  friend bool operator==(const CoefficientStream&, const CoefficientStream&) = default;

  /// Multiplication by z^k, keeping the truncation order.
  CoefficientStream shifted(std::uint64_t k) const {
    auto s = zero(order());
    for (std::uint64_t i = 0; i + k <= order(); ++i) s.coeffs_[i + k] = coeffs_[i];
    return s;
  }

  CoefficientStream pow(std::uint64_t e) const {
    CoefficientStream result = constant(1, order());
    CoefficientStream base = *this;
    while (e > 0) {
      if (e & 1) result = result * base;
      e >>= 1;
      if (e > 0) base = base * base;
    }
    return result;
  }

 private:
  std::vector<BigCount> coeffs_;
};

// ---------------------------------------------------------------------------
// Counting sequences, each computed from its functional equation.

/// L-trees over d labels: T = d + z T^2.
inline CoefficientStream series_TL(std::uint64_t d, std::uint64_t order) {
  if (d < 1) throw std::invalid_argument("series_TL: d must be positive");
  std::vector<BigCount> t(order + 1);
  t[0] = d;
  for (std::uint64_t n = 1; n <= order; ++n) {
    BigCount acc = 0;
    for (std::uint64_t i = 0; i < n; ++i) acc += t[i] * t[n - 1 - i];
    t[n] = std::move(acc);
  }
  return CoefficientStream(std::move(t));
}

inline BigCount coeff_TL(std::uint64_t d, std::uint64_t n) { return series_TL(d, n)[n]; }

/// All SK-combinators, C(z) = (1 - sqrt(1 - 8z)) / 2z.
inline CoefficientStream series_C(std::uint64_t order) { return series_TL(2, order); }
inline BigCount coeff_C(std::uint64_t n) { return series_C(n)[n]; }

/// SK normal forms: R0 = 2 + 2z R0 + z^2 R0^2 (S, K, S x, K x, S x y).
inline CoefficientStream series_R0(std::uint64_t order) {
  std::vector<BigCount> r(order + 1);
  for (std::uint64_t n = 0; n <= order; ++n) {
    BigCount acc = n == 0 ? 2 : 0;
    if (n >= 1) acc += 2 * r[n - 1];
    for (std::uint64_t i = 0; i + 2 <= n; ++i) acc += r[i] * r[n - 2 - i];
    r[n] = std::move(acc);
  }
  return CoefficientStream(std::move(r));
}

inline BigCount coeff_R0(std::uint64_t n) { return series_R0(n)[n]; }

/// L-trees containing a fixed size-p L-tree: O = z^p + 2z T O - z O^2.
inline CoefficientStream series_subterm(std::uint64_t d, std::uint64_t p, std::uint64_t order) {
  if (p == 0) throw std::invalid_argument("series_subterm: pattern size must be at least 1");
  const CoefficientStream t = series_TL(d, order);
  std::vector<BigCount> o(order + 1);
  for (std::uint64_t n = 0; n <= order; ++n) {
    BigCount acc = n == p ? 1 : 0;
    for (std::uint64_t i = 0; i + 1 <= n; ++i) {
      const std::uint64_t j = n - 1 - i;
      acc += 2 * t[i] * o[j];
      acc -= o[i] * o[j];
    }
    o[n] = std::move(acc);
  }
  return CoefficientStream(std::move(o));
}

inline BigCount coeff_subterm(std::uint64_t d, std::uint64_t p, std::uint64_t n) {
  return series_subterm(d, p, n)[n];
}

/// (1 - 4z - 4z^2)^(-1/2), from (1 - 4z - 4z^2) S' = (2 + 4z) S:
///   (n+1) s_{n+1} = (4n + 2) s_n + 4n s_{n-1}.
inline CoefficientStream inverse_sqrt_core(std::uint64_t order) {
  std::vector<BigCount> s(order + 1);
  s[0] = 1;
  if (order >= 1) s[1] = 2;
  for (std::uint64_t n = 1; n + 1 <= order; ++n) {
    s[n + 1] = ((4 * n + 2) * s[n] + 4 * n * s[n - 1]) / (n + 1);
  }
  return CoefficientStream(std::move(s));
}

// ---------------------------------------------------------------------------
// Reduction grammars.

/// One production of a reduction grammar, summarised by the exponents of
/// z^k C(z)^c R_0(z)^{r_0} ... R_{n-1}(z)^{r_{n-1}}.
struct ProductionSummary {
  std::uint64_t k = 0;
  std::uint64_t c = 0;
  std::vector<std::uint64_t> r;
  friend bool operator==(const ProductionSummary&, const ProductionSummary&) = default;
};

/// Productions of the n-th grammar that do not reference R_n itself.
struct GrammarData {
  std::uint64_t n = 0;
  std::vector<ProductionSummary> productions;

  void validate() const {
    if (n < 1) throw std::invalid_argument("grammar index must be at least 1");
    for (const auto& p : productions)
      if (p.r.size() > n) throw std::invalid_argument("production references R_i with i >= n");
  }

  // {"n": 1, "productions": [{"k": 2, "c": 1, "r": [3]}, ...]}
  static GrammarData from_json(const nlohmann::json& j) {
    GrammarData g;
    try {
      g.n = j.at("n").get<std::uint64_t>();
      for (const auto& pj : j.at("productions")) {
        ProductionSummary p;
        p.k = pj.value("k", std::uint64_t{0});
        p.c = pj.value("c", std::uint64_t{0});
        if (pj.contains("r")) p.r = pj.at("r").get<std::vector<std::uint64_t>>();
        g.productions.push_back(std::move(p));
      }
    } catch (const nlohmann::json::exception& e) {
      throw std::invalid_argument(std::string("malformed grammar data: ") + e.what());
    }
    g.validate();
    return g;
  }

  static GrammarData load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open grammar file '" + path + "'");
    try {
      return from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
      throw std::invalid_argument("grammar file '" + path + "' is not valid JSON: " + e.what());
    }
  }

  nlohmann::json to_json() const {
    nlohmann::json prods = nlohmann::json::array();
    for (const auto& p : productions) prods.push_back({{"k", p.k}, {"c", p.c}, {"r", p.r}});
    return {{"n", n}, {"productions", prods}};
  }
};

/// R_n(z) = (1 - 4z - 4z^2)^(-1/2) * sum over productions of
/// z^k C(z)^c prod_i R_i(z)^{r_i}, truncated at `order`.
/// `lower[i]` must hold R_i for i < n, to at least `order`.
inline CoefficientStream grammar_coeffs(const GrammarData& g, std::span<const CoefficientStream> lower,
                                        std::uint64_t order) {
  g.validate();
  if (lower.size() < g.n) throw std::invalid_argument("grammar_coeffs: missing lower R_i streams");
  for (std::uint64_t i = 0; i < g.n; ++i)
    if (lower[i].order() < order) throw std::invalid_argument("grammar_coeffs: lower stream too short");

  const CoefficientStream c = series_C(order);
  std::map<std::uint64_t, CoefficientStream> c_powers;
  std::map<std::pair<std::uint64_t, std::uint64_t>, CoefficientStream> r_powers;
  auto c_pow = [&](std::uint64_t e) -> const CoefficientStream& {
    auto it = c_powers.find(e);
    if (it == c_powers.end()) it = c_powers.emplace(e, c.pow(e)).first;
    return it->second;
  };
  auto r_pow = [&](std::uint64_t i, std::uint64_t e) -> const CoefficientStream& {
    auto key = std::make_pair(i, e);
    auto it = r_powers.find(key);
    if (it == r_powers.end()) it = r_powers.emplace(key, lower[i].truncated(order).pow(e)).first;
    return it->second;
  };

  CoefficientStream sum = CoefficientStream::zero(order);
  for (const auto& p : g.productions) {
    if (p.k > order) continue;
    CoefficientStream term = c_pow(p.c);
    for (std::uint64_t i = 0; i < p.r.size(); ++i)
      if (p.r[i] != 0) term = term * r_pow(i, p.r[i]);
    sum = sum + term.shifted(p.k);
  }
  return inverse_sqrt_core(order) * sum;
}

// ---------------------------------------------------------------------------
// Asymptotic layer (double precision).

/// sqrt(pi) to double precision; Gamma(-1/2) = -2 sqrt(pi).
inline constexpr double kSqrtPi = 1.7724538509055160272981674833411451827975;
inline constexpr double kGammaMinusHalf = -2.0 * kSqrtPi;

/// [z^n] f ~ zeta^-n * Cbar * n^(-3/2) / Gamma(-1/2), with the normalised
/// constant c_tilde = Cbar / Gamma(-1/2).
struct AsymptoticSpec {
  Rational zeta;
  double c_tilde = 0.0;

  double c_bar() const { return c_tilde * kGammaMinusHalf; }
  static AsymptoticSpec from_c_bar(Rational zeta, double c_bar) { return {std::move(zeta), c_bar / kGammaMinusHalf}; }
};

/// Spec for L-trees over d labels: zeta = 1/(4d), c_tilde = d / sqrt(pi).
inline AsymptoticSpec tl_asymptotic_spec(std::uint64_t d) {
  return {Rational(1, 4 * d), static_cast<double>(d) / kSqrtPi};
}

/// zeta^-n * c_tilde * n^(-3/2). The exponential factor is evaluated as
/// exp(n log(1/zeta)).
inline double asymptotic_estimate(const AsymptoticSpec& spec, std::uint64_t n) {
  if (n < 1) throw std::invalid_argument("asymptotic_estimate: n must be positive");
  if (spec.zeta <= 0 || spec.zeta >= 1) throw std::invalid_argument("asymptotic_estimate: need 0 < zeta < 1");
  const double inv_zeta = static_cast<double>(Rational(1) / spec.zeta);
  const double nd = static_cast<double>(n);
  return std::exp(nd * std::log(inv_zeta)) * spec.c_tilde * std::pow(nd, -1.5);
}

/// |exact - approx| / exact.
inline double relative_error(const BigCount& exact, double approx) {
  if (exact == 0) throw std::invalid_argument("relative_error: exact value is zero");
  const double e = static_cast<double>(exact);
  return std::abs(e - approx) / e;
}

/// Density of a class with growth 8^n c_tilde n^(-3/2) among SK-terms:
/// c_bar / -4 = c_tilde * sqrt(pi) / 2.
inline double density_from_constant(double c_tilde) { return c_tilde * kSqrtPi / 2.0; }

/// Density of {K' X M} for a K-equivalent K' of size p over d primitives:
/// 1 / (d^(p+1) 4^(p+2)).
inline Rational density_lower_bound_L(std::uint64_t d, std::uint64_t p) {
  if (d < 1) throw std::invalid_argument("density_lower_bound_L: d must be positive");
  const BigCount denom = boost::multiprecision::pow(BigCount(d), static_cast<unsigned>(p + 1)) *
                         boost::multiprecision::pow(BigCount(4), static_cast<unsigned>(p + 2));
  return Rational(BigCount(1), denom);
}

/// Density of terms whose leftmost leaf is replaced by a divergent term of
/// size p: d / (4d)^p.
inline Rational density_U(std::uint64_t d, std::uint64_t p) {
  if (d < 1) throw std::invalid_argument("density_U: d must be positive");
  if (p == 0) throw std::invalid_argument("density_U: p must be positive");
  return Rational(BigCount(d), boost::multiprecision::pow(BigCount(4 * d), static_cast<unsigned>(p)));
}

inline double sum_densities(std::span<const double> values) {
  return std::accumulate(values.begin(), values.end(), 0.0);
}

}  // namespace qcl
