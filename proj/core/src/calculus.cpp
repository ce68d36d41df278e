#include "dstit/calculus.hpp"

#include <algorithm>
#include <array>
#include <utility>

namespace dstit {

namespace {

constexpr std::array<std::pair<RuleName, const char*>, 25> kNames{{
    {RuleName::Id, "id"},           {RuleName::GenId, "genid"},         {RuleName::And, "and"},
    {RuleName::Or, "or"},           {RuleName::Box, "box"},             {RuleName::Dia, "dia"},
    {RuleName::AgBox, "agbox"},     {RuleName::AgDia, "agdia"},         {RuleName::Ought, "ought"},
    {RuleName::Perm, "perm"},       {RuleName::Ref, "ref"},             {RuleName::Euc, "euc"},
    {RuleName::D2, "d2"},           {RuleName::D3, "d3"},               {RuleName::IOA, "ioa"},
    {RuleName::APC, "apc"},         {RuleName::Sym, "sym"},             {RuleName::Tra, "tra"},
    {RuleName::BoxStar, "box*"},    {RuleName::OughtStar, "ought*"},    {RuleName::AgBoxStar, "agbox*"},
    {RuleName::AgDiaStar, "agdia*"}, {RuleName::Wk, "wk"},              {RuleName::Sub, "sub"},
    {RuleName::IoaOpMacro, "ioaop"},
}};

}  // namespace

const char* to_string(RuleName r) {
  for (auto [n, s] : kNames)
    if (n == r) return s;
  return "?";
}

std::optional<RuleName> rule_from_string(std::string_view s) {
  for (auto [n, name] : kNames)
    if (s == name) return n;
  return std::nullopt;
}

bool rule_has_agent(RuleName r) {
  switch (r) {
    case RuleName::AgBox: case RuleName::AgDia: case RuleName::Ought: case RuleName::Perm:
    case RuleName::Ref: case RuleName::Euc: case RuleName::D2: case RuleName::D3: case RuleName::APC:
    case RuleName::Sym: case RuleName::Tra: case RuleName::OughtStar: case RuleName::AgBoxStar:
    case RuleName::AgDiaStar:
      return true;
    default:
      return false;
  }
}

Sequent goal_sequent(const Formula& f, Label root) {
  Sequent s;
  s.consequent.insert({root, f});
  return s;
}

namespace {

using K = Formula::Kind;

CheckResult bad(std::string msg) { return {false, std::move(msg), {}}; }

struct StepChecker {
  const Sequent& c;
  const RuleApp& r;
  const std::vector<const Sequent*>& ps;
  const CheckOptions& opts;

  bool hasF(Label w, const Formula& f) const { return c.consequent.count({w, f}) > 0; }
  bool hasA(const RelAtom& a) const { return c.antecedent.count(a) > 0; }

  std::string rname() const { return to_string(r.name); }

  CheckResult need_premises(std::size_t n) const {
    if (ps.size() != n)
      return bad(rname() + ": expected " + std::to_string(n) + " premise(s), got " + std::to_string(ps.size()));
    return {};
  }

  CheckResult need_labels(std::size_t n) const {
    if (r.labels.size() != n) return bad(rname() + ": expected " + std::to_string(n) + " label(s)");
    return {};
  }

  CheckResult need_formula(K k) const {
    if (!r.formula || r.formula->kind() != k) return bad(rname() + ": principal formula of wrong shape");
    if (r.formula->is_agentive() && r.formula->agent() != r.agent)
      return bad(rname() + ": agent does not match the principal formula");
    return {};
  }

  CheckResult need_fresh(std::size_t n) const {
    if (r.fresh.size() != n) return bad(rname() + ": expected " + std::to_string(n) + " eigenvariable(s)");
    auto labs = labels_of(c);
    std::set<Label> seen;
    for (Label u : r.fresh) {
      if (labs.count(u)) return bad(rname() + ": eigenvariable " + label_name(u) + " occurs in the conclusion");
      if (!seen.insert(u).second) return bad(rname() + ": eigenvariables not distinct");
    }
    return {};
  }

  // Premise = conclusion plus additions; the principal formula may or may not be kept.
  CheckResult extends(const Sequent& p, const std::vector<RelAtom>& addR, const std::vector<Labelled>& addG,
                      const std::optional<Labelled>& principal, std::size_t idx = 0) const {
    Antecedent ant = c.antecedent;
    ant.insert(addR.begin(), addR.end());
    if (p.antecedent != ant) return bad(rname() + ": antecedent of premise " + std::to_string(idx) + " does not match");
    Consequent keep = c.consequent;
    keep.insert(addG.begin(), addG.end());
    if (p.consequent == keep) return {};
    if (principal) {
      Consequent drop = c.consequent;
      drop.erase(*principal);
      drop.insert(addG.begin(), addG.end());
      if (p.consequent == drop) return {};
    }
    return bad(rname() + ": consequent of premise " + std::to_string(idx) + " does not match");
  }

  CheckResult run() const {
    if (rule_has_agent(r.name) && (r.agent < 0 || r.agent >= opts.agents))
      return bad(rname() + ": agent index out of range");
    for (const auto& t : r.tuples)
      if (t.size() != static_cast<std::size_t>(opts.agents)) return bad(rname() + ": tuple arity differs from agent count");
    const Label w = r.labels.empty() ? 0 : r.labels[0];
    const AgentId i = r.agent;
    CheckResult res;
#define TRY(x) \
  if (res = (x); !res.ok) return res
    switch (r.name) {
      case RuleName::Id:
      case RuleName::GenId: {
        TRY(need_premises(0));
        TRY(need_labels(1));
        if (!r.formula) return bad(rname() + ": missing formula");
        if (r.name == RuleName::Id && !r.formula->is_literal()) return bad("id: formula is not a literal");
        if (r.name == RuleName::GenId && opts.atomicLeaves && !r.formula->is_literal())
          return bad("genid: non-atomic leaf rejected in strict mode");
        if (!hasF(w, *r.formula) || !hasF(w, negate(*r.formula)))
          return bad(rname() + ": complementary pair not in the conclusion");
        return {};
      }
      case RuleName::And: {
        TRY(need_premises(2));
        TRY(need_labels(1));
        TRY(need_formula(K::And));
        const Formula& f = *r.formula;
        if (!hasF(w, f)) return bad("and: principal formula missing");
        TRY(extends(*ps[0], {}, {{w, f.left()}}, Labelled{w, f}, 0));
        return extends(*ps[1], {}, {{w, f.right()}}, Labelled{w, f}, 1);
      }
      case RuleName::Or: {
        TRY(need_premises(1));
        TRY(need_labels(1));
        TRY(need_formula(K::Or));
        const Formula& f = *r.formula;
        if (!hasF(w, f)) return bad("or: principal formula missing");
        return extends(*ps[0], {}, {{w, f.left()}, {w, f.right()}}, Labelled{w, f});
      }
      case RuleName::Box:
      case RuleName::AgBox:
      case RuleName::Ought: {
        TRY(need_premises(1));
        TRY(need_labels(1));
        K k = r.name == RuleName::Box ? K::Box : r.name == RuleName::AgBox ? K::AgBox : K::Ought;
        TRY(need_formula(k));
        TRY(need_fresh(1));
        const Formula& f = *r.formula;
        if (!hasF(w, f)) return bad(rname() + ": principal formula missing");
        Label u = r.fresh[0];
        std::vector<RelAtom> addR;
        if (k == K::AgBox) addR.push_back(RelAtom::choice(i, w, u));
        if (k == K::Ought) addR.push_back(RelAtom::ideal(i, u));
        return extends(*ps[0], addR, {{u, f.body()}}, Labelled{w, f});
      }
      case RuleName::Dia:
      case RuleName::AgDia:
      case RuleName::Perm: {
        TRY(need_premises(1));
        TRY(need_labels(2));
        K k = r.name == RuleName::Dia ? K::Dia : r.name == RuleName::AgDia ? K::AgDia : K::Perm;
        TRY(need_formula(k));
        const Formula& f = *r.formula;
        Label u = r.labels[1];
        if (!hasF(w, f)) return bad(rname() + ": principal formula missing");
        if (k == K::AgDia && !hasA(RelAtom::choice(i, w, u))) return bad("agdia: relational atom missing");
        if (k == K::Perm && !hasA(RelAtom::ideal(i, u))) return bad("perm: ideal atom missing");
        return extends(*ps[0], {}, {{u, f.body()}}, Labelled{w, f});
      }
      case RuleName::Ref:
        TRY(need_premises(1));
        TRY(need_labels(1));
        return extends(*ps[0], {RelAtom::choice(i, w, w)}, {}, std::nullopt);
      case RuleName::Euc: {
        TRY(need_premises(1));
        TRY(need_labels(3));
        Label u = r.labels[1], v = r.labels[2];
        if (!hasA(RelAtom::choice(i, w, u)) || !hasA(RelAtom::choice(i, w, v)))
          return bad("euc: relational atoms missing");
        return extends(*ps[0], {RelAtom::choice(i, u, v)}, {}, std::nullopt);
      }
      case RuleName::Sym: {
        TRY(need_premises(1));
        TRY(need_labels(2));
        Label u = r.labels[1];
        if (!hasA(RelAtom::choice(i, w, u))) return bad("sym: relational atom missing");
        return extends(*ps[0], {RelAtom::choice(i, u, w)}, {}, std::nullopt);
      }
      case RuleName::Tra: {
        TRY(need_premises(1));
        TRY(need_labels(3));
        Label u = r.labels[1], v = r.labels[2];
        if (!hasA(RelAtom::choice(i, w, u)) || !hasA(RelAtom::choice(i, u, v)))
          return bad("tra: relational atoms missing");
        return extends(*ps[0], {RelAtom::choice(i, w, v)}, {}, std::nullopt);
      }
      case RuleName::D2: {
        TRY(need_premises(1));
        TRY(need_fresh(1));
        return extends(*ps[0], {RelAtom::ideal(i, r.fresh[0])}, {}, std::nullopt);
      }
      case RuleName::D3: {
        TRY(need_premises(1));
        TRY(need_labels(2));
        Label u = r.labels[1];
        if (!hasA(RelAtom::ideal(i, w)) || !hasA(RelAtom::choice(i, w, u))) return bad("d3: atoms missing");
        return extends(*ps[0], {RelAtom::ideal(i, u)}, {}, std::nullopt);
      }
      case RuleName::IOA: {
        TRY(need_premises(1));
        TRY(need_labels(static_cast<std::size_t>(opts.agents)));
        TRY(need_fresh(1));
        std::vector<RelAtom> add;
        for (AgentId j = 0; j < opts.agents; ++j) add.push_back(RelAtom::choice(j, r.labels[j], r.fresh[0]));
        return extends(*ps[0], add, {}, std::nullopt);
      }
      case RuleName::IoaOpMacro: {
        TRY(need_premises(1));
        if (r.tuples.empty()) return bad("ioaop: no tuples");
        TRY(need_fresh(r.tuples.size()));
        std::vector<RelAtom> add;
        for (std::size_t t = 0; t < r.tuples.size(); ++t)
          for (AgentId j = 0; j < opts.agents; ++j) add.push_back(RelAtom::choice(j, r.tuples[t][j], r.fresh[t]));
        return extends(*ps[0], add, {}, std::nullopt);
      }
      case RuleName::APC: {
        if (opts.choices <= 0) return bad("apc: only available when the choice bound is positive");
        const std::size_t k = static_cast<std::size_t>(opts.choices);
        TRY(need_labels(k + 1));
        TRY(need_premises(k * (k + 1) / 2));
        std::size_t idx = 0;
        for (std::size_t m = 0; m + 1 <= k; ++m)
          for (std::size_t j = m + 1; j <= k; ++j, ++idx)
            TRY(extends(*ps[idx], {RelAtom::choice(i, r.labels[m], r.labels[j])}, {}, std::nullopt, idx));
        return {};
      }
      case RuleName::BoxStar:
      case RuleName::OughtStar: {
        TRY(need_premises(1));
        TRY(need_labels(2));
        TRY(need_formula(r.name == RuleName::BoxStar ? K::Box : K::Ought));
        const Formula& f = *r.formula;
        Label u = r.labels[0], v = r.labels[1];
        if (!hasF(u, f)) return bad(rname() + ": principal formula missing");
        return extends(*ps[0], {}, {{v, f}}, Labelled{u, f});
      }
      case RuleName::AgBoxStar: {
        TRY(need_premises(1));
        TRY(need_labels(2));
        TRY(need_formula(K::AgBox));
        TRY(need_fresh(1));
        const Formula& f = *r.formula;
        Label u = r.labels[1], v = r.fresh[0];
        if (!hasA(RelAtom::choice(i, w, u))) return bad("agbox*: relational atom missing");
        if (!hasF(u, f)) return bad("agbox*: principal formula missing");
        return extends(*ps[0], {RelAtom::choice(i, w, v)}, {{v, f.body()}}, Labelled{u, f});
      }
      case RuleName::AgDiaStar: {
        TRY(need_premises(1));
        TRY(need_labels(2));
        TRY(need_formula(K::AgDia));
        const Formula& f = *r.formula;
        Label u = r.labels[1];
        if (!hasA(RelAtom::choice(i, w, u))) return bad("agdia*: relational atom missing");
        if (!hasF(w, f)) return bad("agdia*: principal formula missing");
        return extends(*ps[0], {}, {{u, f}, {u, f.body()}}, Labelled{w, f});
      }
      case RuleName::Wk: {
        TRY(need_premises(1));
        const Sequent& p = *ps[0];
        if (!std::includes(c.antecedent.begin(), c.antecedent.end(), p.antecedent.begin(), p.antecedent.end()) ||
            !std::includes(c.consequent.begin(), c.consequent.end(), p.consequent.begin(), p.consequent.end()))
          return bad("wk: premise is not contained in the conclusion");
        return {};
      }
      case RuleName::Sub: {
        TRY(need_premises(1));
        TRY(need_labels(2));
        Label from = r.labels[0], to = r.labels[1];
        auto ren = [&](Label l) { return l == from ? to : l; };
        Sequent s;
        for (const auto& a : ps[0]->antecedent) s.antecedent.insert({a.kind, a.agent, ren(a.from), ren(a.to)});
        for (const auto& lf : ps[0]->consequent) s.consequent.insert({ren(lf.label), lf.formula});
        if (!(s == c)) return bad("sub: conclusion is not the renamed premise");
        return {};
      }
    }
#undef TRY
    return bad("unknown rule");
  }
};

CheckResult check_ptr(const Sequent& c, const RuleApp& r, const std::vector<const Sequent*>& ps,
                      const CheckOptions& opts) {
  return StepChecker{c, r, ps, opts}.run();
}

CheckResult check_rec(const Derivation& d, const CheckOptions& opts, std::vector<std::size_t>& path) {
  std::vector<const Sequent*> ps;
  ps.reserve(d.premises.size());
  for (const auto& p : d.premises) ps.push_back(&p.conclusion);
  if (auto r = check_ptr(d.conclusion, d.rule, ps, opts); !r.ok) {
    r.path = path;
    return r;
  }
  for (std::size_t j = 0; j < d.premises.size(); ++j) {
    path.push_back(j);
    if (auto r = check_rec(d.premises[j], opts, path); !r.ok) return r;
    path.pop_back();
  }
  return {};
}

}  // namespace

CheckResult check_step(const Sequent& conclusion, const RuleApp& rule, const std::vector<Sequent>& premises,
                       const CheckOptions& opts) {
  std::vector<const Sequent*> ps;
  for (const auto& p : premises) ps.push_back(&p);
  return check_ptr(conclusion, rule, ps, opts);
}

CheckResult check_derivation(const Derivation& d, const Sequent& claimedRoot, const CheckOptions& opts) {
  if (!(d.conclusion == claimedRoot)) return bad("root sequent differs from the claimed end-sequent");
  for (const auto& a : d.conclusion.antecedent)
    if (a.agent < 0 || a.agent >= opts.agents) return bad("root mentions an out-of-range agent");
  for (const auto& lf : d.conclusion.consequent)
    for (AgentId i : agents_of(lf.formula))
      if (i < 0 || i >= opts.agents) return bad("root mentions an out-of-range agent");
  std::vector<std::size_t> path;
  return check_rec(d, opts, path);
}

std::size_t derivation_size(const Derivation& d) {
  std::size_t n = 1;
  for (const auto& p : d.premises) n += derivation_size(p);
  return n;
}

std::size_t derivation_height(const Derivation& d) {
  std::size_t h = 0;
  for (const auto& p : d.premises) h = std::max(h, derivation_height(p));
  return h + 1;
}

std::set<RuleName> rules_used(const Derivation& d) {
  std::set<RuleName> out{d.rule.name};
  for (const auto& p : d.premises) {
    auto sub = rules_used(p);
    out.insert(sub.begin(), sub.end());
  }
  return out;
}

}  // namespace dstit
