#include <gtest/gtest.h>

#include <random>

#include "dstit/certificate.hpp"
#include "dstit/errors.hpp"
#include "dstit/search.hpp"
#include "support/random.hpp"

using namespace dstit;
using F = Formula;

namespace {

bool same_derivation(const Derivation& a, const Derivation& b) {
  if (!(a.conclusion == b.conclusion)) return false;
  const RuleApp &r = a.rule, &s = b.rule;
  if (r.name != s.name || r.agent != s.agent || r.labels != s.labels || r.fresh != s.fresh ||
      r.tuples != s.tuples || r.formula != s.formula)
    return false;
  if (a.premises.size() != b.premises.size()) return false;
  for (std::size_t j = 0; j < a.premises.size(); ++j)
    if (!same_derivation(a.premises[j], b.premises[j])) return false;
  return true;
}

bool same_model(const DsModel& a, const DsModel& b) {
  if (a.agents != b.agents || a.choices != b.choices || a.worlds != b.worlds || a.rel != b.rel ||
      a.ideal != b.ideal)
    return false;
  for (World w = 0; w < a.size(); ++w)
    for (const auto& [p, s] : a.val) {
      auto it = b.val.find(p);
      bool other = it != b.val.end() && it->second.count(w);
      if (other != (s.count(w) > 0)) return false;
    }
  return true;
}

}  // namespace

TEST(Certificate, ProofRoundTrip) {
  F f = parse("O[0] p -> dia [0] p", 1);
  Verdict v = prove(f, 1, 0);
  ASSERT_TRUE(v.valid);
  ProofFile pf{1, 0, f, *v.proof};
  for (int indent : {-1, 1}) {
    ProofFile back = proof_from_json(proof_to_json(pf, indent));
    EXPECT_EQ(back.agents, 1);
    EXPECT_EQ(back.choices, 0);
    EXPECT_EQ(back.goal, f);
    EXPECT_TRUE(same_derivation(back.proof, pf.proof));
  }
}

TEST(Certificate, ProofWithTopVariableRoundTrips) {
  F f = parse("true", 1);
  Verdict v = prove(f, 1, 0);
  ASSERT_TRUE(v.valid);
  ProofFile back = proof_from_json(proof_to_json({1, 0, f, *v.proof}));
  EXPECT_TRUE(same_derivation(back.proof, *v.proof));
}

TEST(Certificate, RandomRoundTrips) {
  std::mt19937_64 rng(51);
  for (int t = 0; t < 80; ++t) {
    int n = 1 + t % 2, k = t % 3;
    F f = rnd::random_formula(rng, 6, n);
    Verdict v = prove(f, n, k);
    if (v.valid) {
      ProofFile back = proof_from_json(proof_to_json({n, k, f, *v.proof}));
      EXPECT_TRUE(same_derivation(back.proof, *v.proof));
      EXPECT_TRUE(check_derivation(back.proof, goal_sequent(f), {n, k, false}));
    } else {
      ModelFile mf{*v.model, v.model->worlds[v.root]};
      ModelFile back = model_from_json(model_to_json(mf));
      EXPECT_TRUE(same_model(back.model, mf.model));
      EXPECT_EQ(back.root, mf.root);
    }
  }
}

TEST(Certificate, ModelRoundTrip) {
  DsModel m;
  m.agents = 2;
  m.choices = 2;
  m.worlds = {"a", "b"};
  m.rel = {{{0, 0}, {1, 1}}, {{0, 0}, {0, 1}, {1, 0}, {1, 1}}};
  m.ideal = {{1}, {0, 1}};
  m.val = {{"p", {0}}, {"q", {}}};
  ModelFile back = model_from_json(model_to_json({m, std::nullopt}));
  EXPECT_TRUE(same_model(back.model, m));
  EXPECT_FALSE(back.root.has_value());
}

TEST(Certificate, TextForms) {
  EXPECT_EQ(parse_rel_atom("R[1] w0 w3", 2), RelAtom::choice(1, 0, 3));
  EXPECT_EQ(parse_rel_atom("I[0] w2", 1), RelAtom::ideal(0, 2));
  Labelled lf = parse_labelled("w4 : box p", 1);
  EXPECT_EQ(lf.label, 4u);
  EXPECT_EQ(lf.formula, F::box(F::atom("p")));
  EXPECT_THROW(parse_rel_atom("R[3] w0 w1", 2), AgentRangeError);
  EXPECT_THROW(parse_rel_atom("S[0] w0 w1", 1), MalformedInput);
  EXPECT_THROW(parse_labelled("w0 box p", 1), MalformedInput);
}

TEST(Certificate, MalformedProofs) {
  EXPECT_THROW(proof_from_json("{"), MalformedInput);
  EXPECT_THROW(proof_from_json("[]"), MalformedInput);
  EXPECT_THROW(proof_from_json(R"({"agents": 1, "choices": 0})"), MalformedInput);
  EXPECT_THROW(proof_from_json(R"({"format": "other", "root": {}})"), MalformedInput);
  const char* unknownRule = R"({"agents":1,"choices":0,"root":{"sequent":{"antecedent":[],"consequent":["w0 : p"]},
    "rule":{"name":"cut","labels":["w0"]},"premises":[]}})";
  EXPECT_THROW(proof_from_json(unknownRule), MalformedInput);
}

TEST(Certificate, MalformedModels) {
  EXPECT_THROW(model_from_json("not json"), MalformedInput);
  EXPECT_THROW(model_from_json(R"({"agents":1,"worlds":["a"],"rel":[[["a","b"]]],"ideal":[["a"]],"val":{}})"),
               MalformedInput);
  EXPECT_THROW(model_from_json(R"({"agents":1,"worlds":["a","a"],"rel":[[]],"ideal":[[]],"val":{}})"),
               MalformedInput);
  EXPECT_THROW(model_from_json(R"({"agents":2,"worlds":["a"],"rel":[[["a","a"]]],"ideal":[["a"]],"val":{}})"),
               MalformedInput);
}
