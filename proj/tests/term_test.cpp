#include <gtest/gtest.h>

#include <string>
#include <unordered_set>

#include "oracles.hpp"
#include "qcl/enumerate.hpp"
#include "qcl/term.hpp"

using namespace qcl;

namespace {

const Basis& sk() {
  static const Basis b = sk_basis();
  return b;
}

Term S() { return Term::leaf(*sk().find("S")); }
Term K() { return Term::leaf(*sk().find("K")); }
Term A(Term l, Term r) { return Term::app(std::move(l), std::move(r)); }

Basis four_letters() {
  return Basis({{"M", 1, RewriteTemplate::parse("1")},
                {"N", 1, RewriteTemplate::parse("1")},
                {"P", 1, RewriteTemplate::parse("1")},
                {"Q", 1, RewriteTemplate::parse("1")}});
}

}  // namespace

TEST(Parse, JuxtapositionAssociatesLeft) {
  EXPECT_EQ(parse_term("S K K", sk()), A(A(S(), K()), K()));
  EXPECT_EQ(parse_term("S (K K)", sk()), A(S(), A(K(), K())));
  EXPECT_EQ(parse_term("  ( S )  K ", sk()), A(S(), K()));
}

TEST(Parse, ParenthesisedArgumentConvention) {
  const Basis b = four_letters();
  const Term t = parse_term("M N (P Q)", b);
  const Term expected = parse_term("((M N) (P Q))", b);
  EXPECT_EQ(t, expected);
  ASSERT_TRUE(t.is_app());
  EXPECT_EQ(to_string(t.left(), b), "M N");
  EXPECT_EQ(to_string(t.right(), b), "P Q");
}

TEST(Parse, ErrorsCarryPositions) {
  auto position_of = [](const std::string& text) -> long {
    try {
      parse_term(text, sk());
    } catch (const ParseError& e) {
      return static_cast<long>(e.position());
    }
    return -1;
  };
  EXPECT_EQ(position_of(""), 0);
  EXPECT_EQ(position_of("S ("), 3);
  EXPECT_EQ(position_of("S K)"), 3);
  EXPECT_EQ(position_of("S ()"), 2);
  EXPECT_EQ(position_of("S X"), 2);
  EXPECT_EQ(position_of("S 1K"), 2);
  EXPECT_EQ(position_of("S + K"), 2);
  EXPECT_EQ(position_of("(S K"), 4);
}

TEST(Parse, UnknownPrimitiveIsReported) {
  try {
    parse_term("S K I", sk());
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("unknown primitive 'I'"), std::string::npos);
  }
}

TEST(Parse, MultiCharacterNames) {
  const Basis b({{"Id", 1, RewriteTemplate::parse("1")}, {"K2", 2, RewriteTemplate::parse("1")}});
  const Term t = parse_term("K2 Id (Id K2)", b);
  EXPECT_EQ(t.size(), 3u);
  EXPECT_EQ(to_string(t, b), "K2 Id (Id K2)");
}

TEST(Print, MinimalParentheses) {
  EXPECT_EQ(to_string(A(A(S(), K()), K()), sk()), "S K K");
  EXPECT_EQ(to_string(A(S(), A(K(), K())), sk()), "S (K K)");
  EXPECT_EQ(to_string(A(A(K(), S()), A(A(K(), K()), S())), sk()), "K S (K K S)");
}

TEST(Size, Examples) {
  EXPECT_EQ(size(S()), 0u);
  EXPECT_EQ(size(A(S(), K())), 1u);
  const Term ww = omega_omega(sk());
  EXPECT_EQ(size(ww), 13u);
  EXPECT_EQ(leaf_count(ww), 14u);
  EXPECT_EQ(oracle::size(oracle::from_term(ww, sk())), 13);
  EXPECT_EQ(to_string(ww, sk()), "S (S K K) (S K K) (S (S K K) (S K K))");
}

TEST(Subterm, Examples) {
  EXPECT_TRUE(contains_subterm(parse_term("S K K", sk()), parse_term("S K K", sk())));
  EXPECT_TRUE(contains_subterm(parse_term("K K S", sk()), parse_term("K K", sk())));
  EXPECT_FALSE(contains_subterm(parse_term("S (K S)", sk()), parse_term("K K", sk())));
  EXPECT_TRUE(contains_subterm(parse_term("S (K S)", sk()), parse_term("K", sk())));
}

TEST(Subterm, AgreesWithOracleOnAllPairs) {
  for (int n = 0; n <= 4; ++n) {
    for (const auto& t : oracle::all_trees(n)) {
      const Term qt = oracle::to_term(t, sk());
      for (int p = 0; p <= 2; ++p)
        for (const auto& pat : oracle::all_trees(p))
          ASSERT_EQ(contains_subterm(qt, oracle::to_term(pat, sk())), oracle::contains(t, pat))
              << oracle::show(t) << " / " << oracle::show(pat);
    }
  }
}

TEST(Phi, Examples) {
  const Term ww = omega_omega(sk());
  EXPECT_EQ(phi_transform(S(), sk()), ww);
  EXPECT_EQ(phi_transform(A(K(), S()), sk()), A(ww, S()));
  const Term skk = parse_term("S K K", sk());
  EXPECT_EQ(size(phi_transform(skk, sk())) - size(skk), 13u);
}

TEST(Phi, ReplacesOnlyTheLeftmostLeaf) {
  const Term ww = omega_omega(sk());
  for (std::uint64_t n = 0; n <= 5; ++n) {
    for (const Term& t : enumerate_terms(sk(), n)) {
      const Term p = phi_transform(t, sk());
      ASSERT_EQ(p.size(), t.size() + 13);
      // Walk both left spines in lockstep: the right children must be the
      // very same nodes, and the innermost left child must be ww.
      const Term* a = &t;
      const Term* b = &p;
      while (a->is_app()) {
        ASSERT_TRUE(b->is_app());
        ASSERT_EQ(a->right().identity(), b->right().identity());
        a = &a->left();
        b = &b->left();
      }
      ASSERT_EQ(*b, ww);
    }
  }
}

TEST(Phi, NeedsDesignatedPrimitives) {
  const Basis b({{"I", 1, RewriteTemplate::parse("1")}});
  EXPECT_THROW(phi_transform(Term::leaf(PrimId{0}), b), MissingDesignatedError);
}

TEST(Phi, UsesDesignatedTermsOfOtherBases) {
  const Basis b = Basis::load(std::string(QCL_TEST_DATA) + "/bckw_basis.json");
  const Term ww = omega_omega(b);
  const Term s = parse_term("B (B (B W) C) (B B)", b);
  EXPECT_EQ(designated_term(b, 'S'), s);
  const Term t = phi_transform(parse_term("K W", b), b);
  EXPECT_EQ(t.right(), parse_term("W", b));
  EXPECT_EQ(t.left(), ww);
}

TEST(Properties, RoundTripAndLeafCountUpToSize8) {
  for (std::uint64_t n = 0; n <= 8; ++n) {
    std::uint64_t seen = 0;
    TermEnumerator(sk(), n).for_each(n, [&](const Term& t) {
      ++seen;
      ASSERT_EQ(leaf_count(t), t.size() + 1);
      ASSERT_EQ(parse_term(to_string(t, sk()), sk()), t);
    });
    EXPECT_EQ(seen, count_terms(2, n));
  }
}

TEST(Basis, JsonRoundTrip) {
  const Basis loaded = Basis::load(std::string(QCL_TEST_DATA) + "/sk_basis.json");
  EXPECT_TRUE(loaded.is_sk());
  EXPECT_EQ(loaded.size(), 2u);
  EXPECT_EQ(loaded[*loaded.find("S")].rule.to_string(), "1 3 (2 3)");
  const Basis again = Basis::from_json(loaded.to_json());
  EXPECT_EQ(again.to_json(), loaded.to_json());
}

TEST(Basis, RejectsInvalidDescriptions) {
  auto bad = [](const char* text) { EXPECT_THROW(Basis::from_json_text(text), BasisError) << text; };
  bad(R"({"primitives": []})");
  bad(R"({"primitives": [{"name": "S", "arity": 0, "template": "1"}]})");
  bad(R"({"primitives": [{"name": "K", "arity": 2, "template": "3"}]})");
  bad(R"({"primitives": [{"name": "K", "arity": 2, "template": "1"}, {"name": "K", "arity": 1, "template": "1"}]})");
  bad(R"({"primitives": [{"name": "", "arity": 1, "template": "1"}]})");
  bad(R"({"primitives": [{"name": "9x", "arity": 1, "template": "1"}]})");
  bad(R"({"primitives": [{"name": "K", "arity": 2, "template": "1 (2"}]})");
  bad(R"({"primitives": [{"name": "K", "arity": 2, "template": "a"}]})");
  bad(R"({"primitives": [{"name": "K", "arity": 2}]})");
  bad(R"(not json)");
}

TEST(Basis, NonSkBasesAreNotMistakenForSk) {
  EXPECT_TRUE(sk_basis().is_sk());
  const Basis swapped({{"S", 3, RewriteTemplate::parse("1 2 (3 2)")}, {"K", 2, RewriteTemplate::parse("1")}});
  EXPECT_FALSE(swapped.is_sk());
}

TEST(Term, DeepSpinesDoNotExhaustTheStack) {
  constexpr int kDepth = 1'000'000;
  Term left = K();
  Term right = K();
  for (int i = 0; i < kDepth; ++i) {
    left = A(std::move(left), S());
    right = A(S(), std::move(right));
  }
  EXPECT_EQ(left.size(), static_cast<std::uint64_t>(kDepth));
  EXPECT_EQ(right.spine_args(), 1u);
  EXPECT_EQ(left.spine_args(), static_cast<std::uint32_t>(kDepth));
  Term right_copy = K();
  for (int i = 0; i < kDepth; ++i) right_copy = A(S(), std::move(right_copy));
  EXPECT_EQ(right, right_copy);
  EXPECT_EQ(right.hash(), right_copy.hash());
  EXPECT_TRUE(contains_subterm(right, parse_term("S (S K)", sk())));
  EXPECT_EQ(to_string(left, sk()).size(), 2u * kDepth + 1);
}

TEST(Term, HashingIsStructural) {
  std::unordered_set<Term, TermHash> set;
  for (const Term& t : enumerate_terms(sk(), 4)) set.insert(t);
  for (const Term& t : enumerate_terms(sk(), 4)) set.insert(parse_term(to_string(t, sk()), sk()));
  EXPECT_EQ(set.size(), 448u);
}
