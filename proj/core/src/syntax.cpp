#include "dstit/syntax.hpp"

#include <algorithm>

#include "dstit/errors.hpp"

namespace dstit {

namespace {

std::size_t mix(std::size_t h, std::size_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

}  // namespace

Formula Formula::make(Kind k, AgentId i, std::string name, const Formula* l, const Formula* r) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->agent = i;
  n->name = std::move(name);
  std::size_t h = mix(static_cast<std::size_t>(k) + 1, static_cast<std::size_t>(i + 2));
  h = mix(h, std::hash<std::string>{}(n->name));
  std::size_t sz = k == Kind::NegAtom ? 2 : 1;
  if (l) {
    n->l = std::make_shared<const Formula>(*l);
    h = mix(h, l->hash());
    sz += l->size();
  }
  if (r) {
    n->r = std::make_shared<const Formula>(*r);
    h = mix(h, r->hash());
    sz += r->size();
  }
  n->hash = h;
  n->size = sz;
  return Formula(std::move(n));
}

Formula Formula::atom(std::string name) { return make(Kind::Atom, -1, std::move(name), nullptr, nullptr); }
Formula Formula::neg_atom(std::string name) {
  return make(Kind::NegAtom, -1, std::move(name), nullptr, nullptr);
}
Formula Formula::conj(Formula l, Formula r) { return make(Kind::And, -1, {}, &l, &r); }
Formula Formula::disj(Formula l, Formula r) { return make(Kind::Or, -1, {}, &l, &r); }
Formula Formula::box(Formula f) { return make(Kind::Box, -1, {}, &f, nullptr); }
Formula Formula::dia(Formula f) { return make(Kind::Dia, -1, {}, &f, nullptr); }
Formula Formula::agbox(AgentId i, Formula f) { return make(Kind::AgBox, i, {}, &f, nullptr); }
Formula Formula::agdia(AgentId i, Formula f) { return make(Kind::AgDia, i, {}, &f, nullptr); }
Formula Formula::ought(AgentId i, Formula f) { return make(Kind::Ought, i, {}, &f, nullptr); }
Formula Formula::perm(AgentId i, Formula f) { return make(Kind::Perm, i, {}, &f, nullptr); }

bool operator==(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return true;
  if (a.hash() != b.hash() || a.kind() != b.kind() || a.agent() != b.agent() || a.size() != b.size())
    return false;
  if (a.is_literal()) return a.name() == b.name();
  if (a.is_binary()) return a.left() == b.left() && a.right() == b.right();
  return a.body() == b.body();
}

std::strong_ordering operator<=>(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  if (auto c = a.kind() <=> b.kind(); c != 0) return c;
  if (auto c = a.agent() <=> b.agent(); c != 0) return c;
  if (a.is_literal()) return a.name().compare(b.name()) <=> 0;
  if (auto c = a.left() <=> b.left(); c != 0) return c;
  if (a.is_binary()) return a.right() <=> b.right();
  return std::strong_ordering::equal;
}

Formula negate(const Formula& f) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::Atom: return Formula::neg_atom(f.name());
    case K::NegAtom: return Formula::atom(f.name());
    case K::And: return Formula::disj(negate(f.left()), negate(f.right()));
    case K::Or: return Formula::conj(negate(f.left()), negate(f.right()));
    case K::Box: return Formula::dia(negate(f.body()));
    case K::Dia: return Formula::box(negate(f.body()));
    case K::AgBox: return Formula::agdia(f.agent(), negate(f.body()));
    case K::AgDia: return Formula::agbox(f.agent(), negate(f.body()));
    case K::Ought: return Formula::perm(f.agent(), negate(f.body()));
    case K::Perm: return Formula::ought(f.agent(), negate(f.body()));
  }
  return f;
}

Formula implies(const Formula& a, const Formula& b) { return Formula::disj(negate(a), b); }

Formula iff(const Formula& a, const Formula& b) {
  return Formula::conj(implies(a, b), implies(b, a));
}

Formula top() { return Formula::disj(Formula::atom(kTopVariable), Formula::neg_atom(kTopVariable)); }
Formula bottom() { return Formula::conj(Formula::atom(kTopVariable), Formula::neg_atom(kTopVariable)); }

namespace {

void collect_sufo(const Formula& f, FormulaSet& out, bool withBinary) {
  if (f.is_literal()) {
    out.insert(f);
    return;
  }
  if (f.is_binary()) {
    if (withBinary) out.insert(f);
    collect_sufo(f.left(), out, withBinary);
    collect_sufo(f.right(), out, withBinary);
    return;
  }
  out.insert(f);
  collect_sufo(f.body(), out, withBinary);
}

template <typename Fn>
void visit(const Formula& f, Fn&& fn) {
  fn(f);
  if (f.is_literal()) return;
  visit(f.left(), fn);
  if (f.is_binary()) visit(f.right(), fn);
}

}  // namespace

FormulaSet subformulae(const Formula& f) {
  FormulaSet out;
  collect_sufo(f, out, false);
  return out;
}

FormulaSet subterms(const Formula& f) {
  FormulaSet out;
  collect_sufo(f, out, true);
  return out;
}

std::size_t complexity(const Formula& f) { return f.size(); }

std::set<std::string> variables(const Formula& f) {
  std::set<std::string> out;
  visit(f, [&](const Formula& g) {
    if (g.is_literal()) out.insert(g.name());
  });
  return out;
}

std::set<AgentId> agents_of(const Formula& f) {
  std::set<AgentId> out;
  visit(f, [&](const Formula& g) {
    if (g.is_agentive()) out.insert(g.agent());
  });
  return out;
}

std::set<AgentId> deontic_agents_of(const Formula& f) {
  std::set<AgentId> out;
  visit(f, [&](const Formula& g) {
    if (g.kind() == Formula::Kind::Ought || g.kind() == Formula::Kind::Perm) out.insert(g.agent());
  });
  return out;
}

AgentId max_agent(const Formula& f) {
  auto a = agents_of(f);
  return a.empty() ? -1 : *a.rbegin();
}

void check_agents(const Formula& f, int agentCount) {
  for (AgentId i : agents_of(f))
    if (i < 0 || i >= agentCount) throw AgentRangeError(i, agentCount);
}

namespace {

bool is_top_var_pair(const Formula& f, Formula::Kind first) {
  return f.left().is_literal() && f.right().is_literal() && f.left().name() == kTopVariable &&
         f.right().name() == kTopVariable && f.left().kind() == first && f.right().kind() != first;
}

void print(const Formula& f, std::string& out) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::Atom: out += f.name(); return;
    case K::NegAtom: out += '~'; out += f.name(); return;
    case K::And:
    case K::Or: {
      bool isOr = f.kind() == K::Or;
      if (is_top_var_pair(f, K::Atom)) {
        out += isOr ? "true" : "false";
        return;
      }
      if (is_top_var_pair(f, K::NegAtom)) {
        out += isOr ? "!false" : "!true";
        return;
      }
      out += '(';
      print(f.left(), out);
      out += isOr ? " | " : " & ";
      print(f.right(), out);
      out += ')';
      return;
    }
    default: break;
  }
  std::string agent = std::to_string(f.agent());
  switch (f.kind()) {
    case K::Box: out += "box "; break;
    case K::Dia: out += "dia "; break;
    case K::AgBox: out += "[" + agent + "] "; break;
    case K::AgDia: out += "<" + agent + "> "; break;
    case K::Ought: out += "O[" + agent + "] "; break;
    case K::Perm: out += "P[" + agent + "] "; break;
    default: break;
  }
  print(f.body(), out);
}

}  // namespace

std::string to_string(const Formula& f) {
  std::string out;
  print(f, out);
  return out;
}

}  // namespace dstit
