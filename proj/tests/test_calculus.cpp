#include <gtest/gtest.h>

#include <functional>
#include <random>

#include "dstit/calculus.hpp"
#include "dstit/search.hpp"
#include "support/random.hpp"

using namespace dstit;
using F = Formula;

namespace {

constexpr Label x = 0, y = 1, z = 2;
const F p = F::atom("p");
const F np = F::neg_atom("p");

RuleApp app(RuleName n, AgentId i, std::vector<Label> labels, std::optional<F> f = std::nullopt,
            std::vector<Label> fresh = {}) {
  RuleApp r;
  r.name = n;
  r.agent = i;
  r.labels = std::move(labels);
  r.formula = std::move(f);
  r.fresh = std::move(fresh);
  return r;
}

Sequent seq(Antecedent a, Consequent c) { return Sequent{std::move(a), std::move(c)}; }

Derivation node(Sequent s, RuleApp r, std::vector<Derivation> ps = {}) {
  return Derivation{std::move(s), std::move(r), std::move(ps)};
}

// P[0] ~p | dia [0] p, bottom-up: (or), (D2), (dia), ([0]), (D3), (P), (id).
Derivation ought_implies_can() {
  const F perm = F::perm(0, np);
  const F can = F::dia(F::agbox(0, p));
  const F goal = F::disj(perm, can);
  Consequent g{{x, perm}, {x, can}};
  Consequent g1 = g;
  g1.insert({y, F::agbox(0, p)});
  Consequent g2 = g1;
  g2.insert({z, p});
  Consequent g3 = g2;
  g3.insert({z, np});
  Antecedent a1{RelAtom::ideal(0, y)};
  Antecedent a2{RelAtom::ideal(0, y), RelAtom::choice(0, y, z)};
  Antecedent a3 = a2;
  a3.insert(RelAtom::ideal(0, z));

  Derivation leaf = node(seq(a3, g3), app(RuleName::Id, -1, {z}, p));
  Derivation perm_step = node(seq(a3, g2), app(RuleName::Perm, 0, {x, z}, perm), {leaf});
  Derivation d3 = node(seq(a2, g2), app(RuleName::D3, 0, {y, z}), {perm_step});
  Derivation agbox = node(seq(a1, g1), app(RuleName::AgBox, 0, {y}, F::agbox(0, p), {z}), {d3});
  Derivation dia = node(seq(a1, g), app(RuleName::Dia, -1, {x, y}, can), {agbox});
  Derivation d2 = node(seq({}, g), app(RuleName::D2, 0, {}, std::nullopt, {y}), {dia});
  return node(goal_sequent(goal, x), app(RuleName::Or, -1, {x}, goal), {d2});
}

void for_each_node(const Derivation& d, const std::function<void(const Derivation&)>& fn) {
  fn(d);
  for (const auto& q : d.premises) for_each_node(q, fn);
}

}  // namespace

TEST(CheckStep, IdOnComplementaryLiterals) {
  Sequent s = seq({}, {{x, p}, {x, np}});
  EXPECT_TRUE(check_step(s, app(RuleName::Id, -1, {x}, p), {}, {}));
  EXPECT_FALSE(check_step(seq({}, {{x, p}, {y, np}}), app(RuleName::Id, -1, {x}, p), {}, {}));
  EXPECT_FALSE(check_step(s, app(RuleName::Id, -1, {x}, p), {s}, {}));
}

TEST(CheckStep, BoxEigenvariableViolation) {
  Sequent c = seq({}, {{x, F::box(p)}, {y, F::atom("q")}});
  Sequent prem = c;
  prem.consequent.insert({y, p});
  CheckResult r = check_step(c, app(RuleName::Box, -1, {x}, F::box(p), {y}), {prem}, {});
  EXPECT_FALSE(r);
  EXPECT_NE(r.message.find("eigenvariable"), std::string::npos);

  Sequent ok = c;
  ok.consequent.insert({z, p});
  EXPECT_TRUE(check_step(c, app(RuleName::Box, -1, {x}, F::box(p), {z}), {ok}, {}));
}

TEST(CheckStep, ApcSinglePremiseForOneChoice) {
  Sequent c = seq({}, {{x, p}, {y, p}});
  Sequent prem = c;
  prem.antecedent.insert(RelAtom::choice(1, x, y));
  CheckOptions o{2, 1, false};
  EXPECT_TRUE(check_step(c, app(RuleName::APC, 1, {x, y}), {prem}, o));
  o.choices = 0;
  EXPECT_FALSE(check_step(c, app(RuleName::APC, 1, {x, y}), {prem}, o));
}

TEST(CheckStep, ApcPremiseFamilyForTwoChoices) {
  Sequent c = seq({}, {{x, p}});
  std::vector<Sequent> prems;
  for (auto [a, b] : std::vector<std::pair<Label, Label>>{{x, y}, {x, z}, {y, z}}) {
    Sequent s = c;
    s.antecedent.insert(RelAtom::choice(0, a, b));
    prems.push_back(s);
  }
  CheckOptions o{1, 2, false};
  EXPECT_TRUE(check_step(c, app(RuleName::APC, 0, {x, y, z}), prems, o));
  std::swap(prems[0], prems[2]);
  EXPECT_FALSE(check_step(c, app(RuleName::APC, 0, {x, y, z}), prems, o));
  prems.pop_back();
  EXPECT_FALSE(check_step(c, app(RuleName::APC, 0, {x, y, z}), prems, o));
}

TEST(CheckStep, PrincipalAtomRequired) {
  Sequent c = seq({}, {{x, F::agdia(0, p)}});
  Sequent prem = c;
  prem.consequent.insert({y, p});
  EXPECT_FALSE(check_step(c, app(RuleName::AgDia, 0, {x, y}, F::agdia(0, p)), {prem}, {}));
  c.antecedent.insert(RelAtom::choice(0, x, y));
  prem.antecedent.insert(RelAtom::choice(0, x, y));
  EXPECT_TRUE(check_step(c, app(RuleName::AgDia, 0, {x, y}, F::agdia(0, p)), {prem}, {}));
}

TEST(CheckStep, AgentOutOfRange) {
  Sequent c = seq({}, {{x, p}});
  Sequent prem = seq({RelAtom::choice(1, x, x)}, {{x, p}});
  EXPECT_FALSE(check_step(c, app(RuleName::Ref, 1, {x}), {prem}, CheckOptions{1, 0, false}));
  EXPECT_TRUE(check_step(c, app(RuleName::Ref, 1, {x}), {prem}, CheckOptions{2, 0, false}));
}

TEST(CheckStep, WeakeningAndSubstitution) {
  Sequent big = seq({RelAtom::ideal(0, x)}, {{x, p}, {y, np}});
  Sequent small = seq({}, {{x, p}});
  EXPECT_TRUE(check_step(big, app(RuleName::Wk, -1, {}), {small}, {}));
  EXPECT_FALSE(check_step(small, app(RuleName::Wk, -1, {}), {big}, {}));
  Sequent before = seq({RelAtom::choice(0, x, y)}, {{y, p}});
  Sequent after = seq({RelAtom::choice(0, x, z)}, {{z, p}});
  EXPECT_TRUE(check_step(after, app(RuleName::Sub, -1, {y, z}), {before}, {}));
  EXPECT_FALSE(check_step(after, app(RuleName::Sub, -1, {y, x}), {before}, {}));
}

TEST(CheckDerivation, OughtImpliesCan) {
  Derivation d = ought_implies_can();
  Sequent root = goal_sequent(parse("O[0] p -> dia [0] p", 1), x);
  CheckResult r = check_derivation(d, root, {});
  EXPECT_TRUE(r) << r.message;
  EXPECT_EQ(derivation_size(d), 7u);
  EXPECT_EQ(rules_used(d), (std::set<RuleName>{RuleName::Or, RuleName::D2, RuleName::Dia, RuleName::AgBox,
                                                RuleName::D3, RuleName::Perm, RuleName::Id}));
}

TEST(CheckDerivation, RootMismatch) {
  EXPECT_FALSE(check_derivation(ought_implies_can(), goal_sequent(F::perm(0, np), x), {}));
}

TEST(CheckDerivation, FailingNodePath) {
  Derivation d = ought_implies_can();
  d.premises[0].premises[0].premises[0].rule.fresh = {x};
  CheckResult r = check_derivation(d, d.conclusion, {});
  EXPECT_FALSE(r);
  EXPECT_EQ(r.path, (std::vector<std::size_t>{0, 0, 0}));
}

TEST(CheckDerivation, GenIdLeaf) {
  Sequent s = seq({}, {{x, F::box(p)}, {x, F::dia(np)}});
  Derivation d = node(s, app(RuleName::GenId, -1, {x}, F::box(p)));
  EXPECT_TRUE(check_derivation(d, s, {}));
  EXPECT_FALSE(check_derivation(d, s, CheckOptions{1, 0, true}));
  d.rule.name = RuleName::Id;
  EXPECT_FALSE(check_derivation(d, s, {}));
}

TEST(CheckDerivation, GenIdOnLiteralsMatchesId) {
  std::mt19937_64 rng(41);
  for (int t = 0; t < 200; ++t) {
    Consequent g;
    for (int k = 0; k < 4; ++k) {
      const char* v = rng() % 2 ? "p" : "q";
      g.insert({static_cast<Label>(rng() % 2), rng() % 2 ? F::atom(v) : F::neg_atom(v)});
    }
    Sequent s = seq({}, g);
    for (const F& lit : {p, np, F::atom("q")}) {
      bool id = check_step(s, app(RuleName::Id, -1, {x}, lit), {}, {}).ok;
      bool gen = check_step(s, app(RuleName::GenId, -1, {x}, lit), {}, {}).ok;
      EXPECT_EQ(id, gen);
    }
  }
}

TEST(CalculusProperty, PremisesExtendAntecedent) {
  std::mt19937_64 rng(42);
  int checked = 0;
  for (int t = 0; t < 150; ++t) {
    int n = 1 + t % 2, k = t % 3;
    F f = rnd::random_valid(rng, n);
    Verdict v = prove(f, n, k);
    ASSERT_TRUE(v.valid) << to_string(f);
    CheckOptions o{n, k, false};
    for_each_node(*v.proof, [&](const Derivation& d) {
      if (d.premises.empty() || d.rule.name == RuleName::Sub) return;
      std::vector<Sequent> ps;
      for (const auto& q : d.premises) {
        EXPECT_TRUE(std::includes(q.conclusion.antecedent.begin(), q.conclusion.antecedent.end(),
                                  d.conclusion.antecedent.begin(), d.conclusion.antecedent.end()));
        ps.push_back(q.conclusion);
      }
      CheckResult cr = check_step(d.conclusion, d.rule, ps, o);
      ASSERT_TRUE(cr) << to_string(f) << " n=" << n << " k=" << k << ": " << cr.message;
      if (d.conclusion.antecedent.empty()) return;
      // Dropping a conclusion atom from any premise must be rejected.
      for (std::size_t j = 0; j < ps.size(); ++j) {
        std::vector<Sequent> bad = ps;
        bad[j].antecedent.erase(*d.conclusion.antecedent.begin());
        EXPECT_FALSE(check_step(d.conclusion, d.rule, bad, o)) << to_string(d.rule.name);
        ++checked;
      }
    });
  }
  EXPECT_GT(checked, 50);
}

TEST(RuleNames, RoundTrip) {
  for (int r = 0; r <= static_cast<int>(RuleName::IoaOpMacro); ++r) {
    auto name = static_cast<RuleName>(r);
    EXPECT_EQ(rule_from_string(to_string(name)), name);
  }
  EXPECT_FALSE(rule_from_string("cut").has_value());
}
