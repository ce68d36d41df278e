#include <gtest/gtest.h>

#include <random>

#include "dstit/errors.hpp"
#include "dstit/syntax.hpp"
#include "support/random.hpp"

using namespace dstit;
using F = Formula;

namespace {

const F p = F::atom("p");
const F q = F::atom("q");

bool nnf(const F& f) {
  // Formula has no negation node; negation only sits on atoms by construction.
  if (f.is_literal()) return true;
  if (f.is_binary()) return nnf(f.left()) && nnf(f.right());
  return nnf(f.body());
}

}  // namespace

TEST(Parse, OughtImpliesCan) {
  F f = parse("O[0] p -> dia [0] p", 1);
  EXPECT_EQ(f, F::disj(F::perm(0, F::neg_atom("p")), F::dia(F::agbox(0, p))));
}

TEST(Parse, DeMorgan) { EXPECT_EQ(parse("!(p & q)", 1), F::disj(F::neg_atom("p"), F::neg_atom("q"))); }

TEST(Parse, AgentOutOfRange) {
  try {
    parse("[2] p", 2);
    FAIL() << "expected AgentRangeError";
  } catch (const AgentRangeError& e) {
    EXPECT_EQ(e.agent(), 2);
  }
}

TEST(Parse, SyntaxErrorCarriesPosition) {
  try {
    parse("p &", 1);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.position(), 3u);
  }
}

TEST(Parse, Precedence) {
  EXPECT_EQ(parse("p | q & p", 1), F::disj(p, F::conj(q, p)));
  EXPECT_EQ(parse("p -> q -> p", 1), implies(p, implies(q, p)));
  EXPECT_EQ(parse("p <-> q <-> p", 1), iff(iff(p, q), p));
  EXPECT_EQ(parse("p -> q <-> q", 1), iff(implies(p, q), q));
  EXPECT_EQ(parse("box p & q", 1), F::conj(F::box(p), q));
}

TEST(Parse, OperatorsAndConstants) {
  EXPECT_EQ(parse("<1> ~p", 2), F::agdia(1, F::neg_atom("p")));
  EXPECT_EQ(parse("P[0] O[0] p", 1), F::perm(0, F::ought(0, p)));
  EXPECT_EQ(parse("true", 1), top());
  EXPECT_EQ(parse("false", 1), bottom());
  EXPECT_EQ(parse("O", 1), F::atom("O"));
}

TEST(Parse, RejectsReservedAndUnderscore) {
  EXPECT_THROW(parse("box", 1), ParseError);
  EXPECT_THROW(parse("_t", 1), ParseError);
  EXPECT_THROW(parse("~true", 1), ParseError);
  EXPECT_EQ(parse("_t", 1, {true}), F::atom("_t"));
}

TEST(Negate, SwapsDuals) {
  EXPECT_EQ(negate(p), F::neg_atom("p"));
  EXPECT_EQ(negate(F::box(p)), F::dia(F::neg_atom("p")));
  EXPECT_EQ(negate(F::agbox(1, p)), F::agdia(1, F::neg_atom("p")));
  EXPECT_EQ(negate(F::ought(0, p)), F::perm(0, F::neg_atom("p")));
  EXPECT_EQ(negate(F::conj(p, q)), F::disj(F::neg_atom("p"), F::neg_atom("q")));
}

TEST(Subformulae, Examples) {
  EXPECT_EQ(subformulae(p), FormulaSet{p});
  EXPECT_EQ(subformulae(F::conj(p, q)), (FormulaSet{p, q}));
  EXPECT_EQ(subformulae(F::box(p)), (FormulaSet{F::box(p), p}));
}

TEST(Complexity, Examples) {
  EXPECT_EQ(complexity(p), 1u);
  EXPECT_EQ(complexity(F::neg_atom("p")), 2u);
  EXPECT_EQ(complexity(F::conj(p, F::neg_atom("q"))), 4u);
}

TEST(Print, Examples) {
  EXPECT_EQ(to_string(F::perm(0, F::neg_atom("p"))), "P[0] ~p");
  EXPECT_EQ(to_string(F::disj(p, F::neg_atom("p"))), "(p | ~p)");
  EXPECT_EQ(to_string(top()), "true");
  EXPECT_EQ(to_string(bottom()), "false");
}

TEST(SyntaxProperty, NegationIsAnInvolutionAndStaysNnf) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 1000; ++t) {
    F f = rnd::random_formula(rng, 12, 3);
    EXPECT_EQ(negate(negate(f)), f);
    EXPECT_TRUE(nnf(negate(f)));
  }
}

TEST(SyntaxProperty, SubformulaeBoundedByComplexity) {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 1000; ++t) {
    F f = rnd::random_formula(rng, 14, 2);
    EXPECT_LE(subformulae(f).size(), complexity(f));
    for (const F& g : subformulae(f)) EXPECT_FALSE(g.is_binary());
  }
}

TEST(SyntaxProperty, PrintParseRoundTrip) {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 1000; ++t) {
    F f = rnd::random_formula(rng, 16, 3, {"p", "q", "left_jade", "x1"});
    EXPECT_EQ(parse(to_string(f), 3), f) << to_string(f);
  }
  for (const F& f : {top(), bottom(), negate(top()), negate(bottom())}) EXPECT_EQ(parse(to_string(f), 1), f);
}

TEST(SyntaxProperty, StructuralOrderIsTotalAndConsistent) {
  std::mt19937_64 rng(14);
  for (int t = 0; t < 300; ++t) {
    F a = rnd::random_formula(rng, 8, 2);
    F b = rnd::random_formula(rng, 8, 2);
    EXPECT_EQ(a == b, (a <=> b) == 0);
    EXPECT_EQ((a <=> b) < 0, (b <=> a) > 0);
    if (a == b) {
      EXPECT_EQ(std::hash<F>{}(a), std::hash<F>{}(b));
    }
  }
}

TEST(Negate, SpecExample) {
  EXPECT_EQ(negate(F::disj(F::box(p), F::agbox(1, q))),
            F::conj(F::dia(F::neg_atom("p")), F::agdia(1, F::neg_atom("q"))));
}
