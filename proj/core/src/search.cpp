#include <algorithm>
#include <optional>
#include <set>
#include <tuple>

#include "dstit/errors.hpp"
#include "search_state_impl.hpp"

namespace dstit {

namespace {

using K = Formula::Kind;
using Impl = SearchState::Impl;

struct Step {
  RuleApp app;
  std::vector<RelAtom> addR;  // elements new to the sequent
  std::vector<Labelled> addG;
};

struct Adds {
  std::vector<std::tuple<int, int, int>> choice;  // agent, w, u
  std::vector<std::pair<int, int>> ideal;         // agent, w
  std::vector<std::pair<int, int>> formula;       // w, formula id
};

struct BranchPoint {
  RuleApp app;
  std::vector<Adds> premises;
};

struct Outcome {
  bool closed = false;
  Derivation proof;
  DsModel model;
  World root = 0;
};

std::string rule_tag(const RuleApp& a) {
  std::string s = to_string(a.name);
  if (a.agent >= 0) s += "[" + std::to_string(a.agent) + "]";
  return s;
}

struct Elems {
  Antecedent a;
  Consequent g;
};

std::optional<Derivation> drop_addition(const Derivation& d, const Elems& addition);

// A branch point under exploration.
struct Frame {
  BranchPoint bp;
  std::size_t next = 0;        // premise being explored
  std::vector<Step> steps;     // steps between the previous branch point and this one
  Derivation node;             // closed premises so far
  std::size_t mark = 0;        // undo position of the conclusion
  Elems fresh;                 // what the current premise added
  std::optional<Sequent> before;
};

class Prover {
public:
  Prover(int n, int k, const ProveOptions& opts) : n_(n), k_(k), opts_(opts) {}

  // Depth-first over branch points with an explicit stack; premises are rolled back through the
  // undo log, so st is mutated in place.
  Outcome run(Impl& st) {
    std::vector<Frame> stack;
    std::vector<Step> steps;
    for (;;) {
      Outcome o = saturate(st, steps, stack);
      if (!o.closed) return o;
      // Unwind until a branch point has a premise left to explore.
      for (;;) {
        if (stack.empty()) return o;
        Frame& f = stack.back();
        st.undo_to(f.mark);
        if (f.before && st.materialize() != *f.before)
          throw InternalError("undo log did not restore the branch state");
        // A premise closed without its own addition already proves the conclusion.
        if (std::optional<Derivation> d = drop_addition(o.proof, f.fresh)) {
          o.proof = wrap(std::move(*d), f.steps);
          stack.pop_back();
          continue;
        }
        f.node.premises.push_back(std::move(o.proof));
        if (++f.next < f.bp.premises.size()) {
          enter_premise(st, f);
          steps.clear();
          break;
        }
        f.node.conclusion = st.materialize();
        o.proof = wrap(std::move(f.node), f.steps);
        stack.pop_back();
      }
    }
  }

  Label next_name() { return nextName_++; }
  Label peek_name() const { return nextName_; }
  SearchStats stats;

private:
  // --- bookkeeping -------------------------------------------------------

  void count_step(const Impl& st, const RuleApp& app) {
    ++stats.steps;
    if (opts_.trace) {
      std::string principal = "-";
      if (app.formula && !app.labels.empty()) {
        principal = label_name(app.labels[0]) + " : " + to_string(*app.formula);
      } else if (!app.labels.empty()) {
        principal.clear();
        for (std::size_t j = 0; j < app.labels.size(); ++j) principal += (j ? "," : "") + label_name(app.labels[j]);
      }
      std::string fresh = app.fresh.empty() ? "-" : "";
      for (std::size_t j = 0; j < app.fresh.size(); ++j) fresh += (j ? "," : "") + label_name(app.fresh[j]);
      opts_.trace("step " + std::to_string(stats.steps) + ": " + rule_tag(app) + " principal=" + principal +
                  " fresh=" + fresh);
    }
    if (opts_.budget > 0 && stats.steps >= opts_.budget) throw BudgetExhausted(stats.steps, st.agboxAgents, st.size());
  }

  int fresh_label(Impl& st, Origin o, int parent, std::vector<int> tup = {}) {
    if (st.size() + 1 > opts_.labelCap)
      throw InternalError("label cap of " + std::to_string(opts_.labelCap) + " exceeded");
    return st.new_label(next_name(), o, parent, std::move(tup));
  }

  void push(Impl& st, std::vector<Step>& steps, Step s) {
    if (s.addR.empty() && s.addG.empty()) throw InternalError("rule application added nothing");
    count_step(st, s.app);
    if (opts_.checkInvariants) check_invariants(st, s.app.name);
    steps.push_back(std::move(s));
  }

  void check_invariants(const Impl& st, RuleName r) const {
    for (std::size_t w = 1; w < st.size(); ++w) {
      if (st.origin[w] == Origin::Root) throw InternalError("second root label");
      if (!st.in_gen_tree(static_cast<int>(w))) {
        if (st.parent[w] != -1) throw InternalError("IOA label inside the generation tree");
        continue;
      }
      int par = st.parent[w];
      if (par < 0 || par >= static_cast<int>(w) || !st.in_gen_tree(par))
        throw InternalError("generation tree is not a tree rooted at w0");
      bool rootChild = st.origin[w] == Origin::ByBox || st.origin[w] == Origin::ByOught || st.origin[w] == Origin::ByD2;
      if (rootChild && par != 0) throw InternalError("box/ought/D2 child not attached to the root");
    }
    if (r == RuleName::IoaOpMacro && !st.ioa_satisfied(st.blocking(opts_.loopCheck)))
      throw InternalError("IoaOp left an unsatisfied tuple");
  }

  static void choice(Impl& st, Step& s, int i, int w, int u) {
    if (st.add_choice(i, w, u)) s.addR.push_back(RelAtom::choice(i, st.name[w], st.name[u]));
  }
  static void ideal(Impl& st, Step& s, int i, int w) {
    if (st.add_ideal(i, w)) s.addR.push_back(RelAtom::ideal(i, st.name[w]));
  }
  static void formula(Impl& st, Step& s, int w, int f) {
    if (st.add_formula(w, f)) s.addG.push_back({st.name[w], st.forms[f]});
  }

  static Step make(RuleName r, AgentId i, std::vector<Label> labels, std::optional<Formula> f = std::nullopt) {
    Step s;
    s.app.name = r;
    s.app.agent = i;
    s.app.labels = std::move(labels);
    s.app.formula = std::move(f);
    return s;
  }

  // --- rule selection in algorithm order ---------------------------------

  bool select(Impl& st, std::vector<Step>& steps, std::optional<BranchPoint>& bp) {
    const int L = static_cast<int>(st.size());
    const int n = n_;
    auto nm = [&](int w) { return st.name[w]; };

    // Ref and Euc only need a rescan after labels or choice atoms changed.
    if (st.relVersion != relClosedAt_) {
      // Ref
      for (int w = 0; w < L; ++w)
        for (AgentId i = 0; i < n; ++i)
          if (!st.rel[i][w].test(w)) {
            Step s = make(RuleName::Ref, i, {nm(w)});
            choice(st, s, i, w, w);
            push(st, steps, std::move(s));
            return true;
          }
      // Euc. Its additions are choice atoms only, which cannot enable clash or Ref, so one scan
      // applies every instance it finds, each as its own step.
      bool euc = false;
      for (int w = 0; w < L; ++w)
        for (AgentId i = 0; i < n; ++i)
          for (auto u = st.rel[i][w].find_first(); u != Bits::npos; u = st.rel[i][w].find_next(u)) {
            if (st.rel[i][w].is_subset_of(st.rel[i][u])) continue;
            Bits missing = st.rel[i][w] - st.rel[i][u];
            for (auto v = missing.find_first(); v != Bits::npos; v = missing.find_next(v)) {
              if (st.rel[i][u].test(v)) continue;
              Step s = make(RuleName::Euc, i, {nm(w), nm(static_cast<int>(u)), nm(static_cast<int>(v))});
              choice(st, s, i, static_cast<int>(u), static_cast<int>(v));
              push(st, steps, std::move(s));
              euc = true;
            }
          }
      if (euc) return true;
      relClosedAt_ = st.relVersion;
    } else if (opts_.checkInvariants) {
      for (int w = 0; w < L; ++w)
        for (AgentId i = 0; i < n; ++i)
          for (auto u = st.rel[i][w].find_first(); u != Bits::npos; u = st.rel[i][w].find_next(u))
            if (!st.rel[i][w].test(w) || !st.rel[i][w].is_subset_of(st.rel[i][u]))
              throw InternalError("Ref/Euc skipped on a sequent that is not closed under them");
    }
    // D3
    for (int w = 0; w < L; ++w)
      for (AgentId i = 0; i < n; ++i) {
        if (!st.ideal[i].test(w)) continue;
        Bits missing = st.rel[i][w] - st.ideal[i];
        auto u = missing.find_first();
        if (u == Bits::npos) continue;
        Step s = make(RuleName::D3, i, {nm(w), nm(static_cast<int>(u))});
        ideal(st, s, i, static_cast<int>(u));
        push(st, steps, std::move(s));
        return true;
      }
    // APC
    if (k_ > 0) {
      for (AgentId i = 0; i < n; ++i) {
        std::vector<int> mins;
        Bits seen(L);
        for (int w = 0; w < L && mins.size() < static_cast<std::size_t>(k_) + 1; ++w) {
          if (seen.test(w)) continue;
          mins.push_back(w);
          seen |= st.rel[i][w];
          seen.set(w);
        }
        if (mins.size() < static_cast<std::size_t>(k_) + 1) continue;
        BranchPoint b;
        b.app.name = RuleName::APC;
        b.app.agent = i;
        for (int w : mins) b.app.labels.push_back(nm(w));
        for (int m = 0; m < k_; ++m)
          for (int j = m + 1; j <= k_; ++j) {
            Adds a;
            a.choice.emplace_back(i, mins[m], mins[j]);
            b.premises.push_back(std::move(a));
          }
        bp = std::move(b);
        return false;
      }
    }
    // Or
    for (int w = 0; w < L; ++w)
      for (auto f = st.gamma[w].find_first(); f != Bits::npos; f = st.gamma[w].find_next(f)) {
        if (st.fkind[f] != K::Or || (st.has(w, st.lhs[f]) && st.has(w, st.rhs[f]))) continue;
        Step s = make(RuleName::Or, -1, {nm(w)}, st.forms[f]);
        formula(st, s, w, st.lhs[f]);
        formula(st, s, w, st.rhs[f]);
        push(st, steps, std::move(s));
        return true;
      }
    // And
    for (int w = 0; w < L; ++w)
      for (auto f = st.gamma[w].find_first(); f != Bits::npos; f = st.gamma[w].find_next(f)) {
        if (st.fkind[f] != K::And || st.has(w, st.lhs[f]) || st.has(w, st.rhs[f])) continue;
        BranchPoint b;
        b.app.name = RuleName::And;
        b.app.labels = {nm(w)};
        b.app.formula = st.forms[f];
        Adds a1, a2;
        a1.formula.emplace_back(w, st.lhs[f]);
        a2.formula.emplace_back(w, st.rhs[f]);
        b.premises = {std::move(a1), std::move(a2)};
        bp = std::move(b);
        return false;
      }
    // Dia
    for (int w = 0; w < L; ++w)
      for (auto f = st.gamma[w].find_first(); f != Bits::npos; f = st.gamma[w].find_next(f)) {
        if (st.fkind[f] != K::Dia) continue;
        for (int u = 0; u < L; ++u)
          if (!st.has(u, st.lhs[f])) {
            Step s = make(RuleName::Dia, -1, {nm(w), nm(u)}, st.forms[f]);
            formula(st, s, u, st.lhs[f]);
            push(st, steps, std::move(s));
            return true;
          }
      }
    // <i>, in the <i>* shape
    for (int w = 0; w < L; ++w)
      for (auto f = st.gamma[w].find_first(); f != Bits::npos; f = st.gamma[w].find_next(f)) {
        if (st.fkind[f] != K::AgDia) continue;
        AgentId i = st.fagent[f];
        int b = st.lhs[f];
        for (auto uu = st.rel[i][w].find_first(); uu != Bits::npos; uu = st.rel[i][w].find_next(uu)) {
          int u = static_cast<int>(uu);
          if (st.has(u, b) && st.has(u, static_cast<int>(f))) continue;
          bool plain = st.has(u, static_cast<int>(f));
          Step s = make(plain ? RuleName::AgDia : RuleName::AgDiaStar, i, {nm(w), nm(u)}, st.forms[f]);
          if (!plain) formula(st, s, u, static_cast<int>(f));
          formula(st, s, u, b);
          push(st, steps, std::move(s));
          return true;
        }
      }
    // Perm
    for (int w = 0; w < L; ++w)
      for (auto f = st.gamma[w].find_first(); f != Bits::npos; f = st.gamma[w].find_next(f)) {
        if (st.fkind[f] != K::Perm) continue;
        AgentId i = st.fagent[f];
        for (auto u = st.ideal[i].find_first(); u != Bits::npos; u = st.ideal[i].find_next(u))
          if (!st.has(static_cast<int>(u), st.lhs[f])) {
            Step s = make(RuleName::Perm, i, {nm(w), nm(static_cast<int>(u))}, st.forms[f]);
            formula(st, s, static_cast<int>(u), st.lhs[f]);
            push(st, steps, std::move(s));
            return true;
          }
      }

    // Generating rules need blocking information.
    auto blk = st.blocking(opts_.loopCheck);
    auto witness = [&](auto pred) {
      for (int u = 0; u < L; ++u)
        if (st.in_gen_tree(u) && !blk[u].blocked() && pred(u)) return true;
      return false;
    };

    // Box (relabelled to the root first)
    for (int w = 0; w < L; ++w)
      for (auto f = st.gamma[w].find_first(); f != Bits::npos; f = st.gamma[w].find_next(f)) {
        if (st.fkind[f] != K::Box) continue;
        int b = st.lhs[f];
        if (witness([&](int u) { return st.has(u, b); })) continue;
        if (w != 0) {
          Step s = make(RuleName::BoxStar, -1, {nm(w), nm(0)}, st.forms[f]);
          formula(st, s, 0, static_cast<int>(f));
          push(st, steps, std::move(s));
        }
        int v = fresh_label(st, Origin::ByBox, 0);
        Step s = make(RuleName::Box, -1, {nm(0)}, st.forms[f]);
        s.app.fresh = {nm(v)};
        formula(st, s, v, b);
        push(st, steps, std::move(s));
        note(stats.maxBoxFirings, st.fire_box(static_cast<int>(f)));
        return true;
      }
    // Ought (relabelled to the root first)
    for (int w = 0; w < L; ++w)
      for (auto f = st.gamma[w].find_first(); f != Bits::npos; f = st.gamma[w].find_next(f)) {
        if (st.fkind[f] != K::Ought) continue;
        AgentId i = st.fagent[f];
        int b = st.lhs[f];
        if (witness([&](int u) { return st.ideal[i].test(u) && st.has(u, b); })) continue;
        if (w != 0) {
          Step s = make(RuleName::OughtStar, i, {nm(w), nm(0)}, st.forms[f]);
          formula(st, s, 0, static_cast<int>(f));
          push(st, steps, std::move(s));
        }
        int v = fresh_label(st, Origin::ByOught, 0);
        Step s = make(RuleName::Ought, i, {nm(0)}, st.forms[f]);
        s.app.fresh = {nm(v)};
        ideal(st, s, i, v);
        formula(st, s, v, b);
        push(st, steps, std::move(s));
        note(stats.maxOughtFirings, st.fire_ought(static_cast<int>(f)));
        return true;
      }
    // D2
    for (AgentId i = 0; i < n; ++i) {
      if (witness([&](int u) { return st.ideal[i].test(u); })) continue;
      int u = fresh_label(st, Origin::ByD2, 0);
      Step s = make(RuleName::D2, i, {});
      s.app.fresh = {nm(u)};
      ideal(st, s, i, u);
      push(st, steps, std::move(s));
      note(stats.maxD2Firings, st.fire_d2(i));
      return true;
    }
    // [i] at unblocked labels; [i]* at live IOA labels
    const std::vector<bool> alive = st.live(blk);
    for (int w = 0; w < L; ++w) {
      if (!alive[w]) continue;
      for (auto f = st.gamma[w].find_first(); f != Bits::npos; f = st.gamma[w].find_next(f)) {
        if (st.fkind[f] != K::AgBox) continue;
        AgentId i = st.fagent[f];
        int b = st.lhs[f];
        bool done = false;
        for (auto u = st.rel[i][w].find_first(); u != Bits::npos && !done; u = st.rel[i][w].find_next(u))
          done = st.has(static_cast<int>(u), b);
        if (done) continue;
        if (st.in_gen_tree(w)) {
          int v = fresh_label(st, Origin::ByAgBox, w);
          Step s = make(RuleName::AgBox, i, {nm(w)}, st.forms[f]);
          s.app.fresh = {nm(v)};
          choice(st, s, i, w, v);
          formula(st, s, v, b);
          st.note_agbox(i);
          push(st, steps, std::move(s));
        } else {
          int a = st.tuple[w][i];
          int z = fresh_label(st, Origin::ByAgBoxStar, a);
          Step s = make(RuleName::AgBoxStar, i, {nm(a), nm(w)}, st.forms[f]);
          s.app.fresh = {nm(z)};
          choice(st, s, i, a, z);
          formula(st, s, z, b);
          st.note_agbox(i);
          push(st, steps, std::move(s));
        }
        return true;
      }
    }
    // IoaOp; for a single agent independence holds trivially and the operation is skipped.
    if (n >= 2) {
      auto tuples = st.unsatisfied_ioa_tuples(blk);
      if (!tuples.empty()) {
        Step s = make(RuleName::IoaOpMacro, -1, {});
        for (const auto& t : tuples) {
          int u = fresh_label(st, Origin::ByIOA, -1, t);
          std::vector<Label> named;
          for (AgentId i = 0; i < n; ++i) {
            choice(st, s, i, t[i], u);
            named.push_back(nm(t[i]));
          }
          s.app.tuples.push_back(std::move(named));
          s.app.fresh.push_back(nm(u));
        }
        push(st, steps, std::move(s));
        return true;
      }
    }
    return false;
  }

  static void note(std::size_t& maxv, std::size_t v) { maxv = std::max(maxv, v); }

  // --- proof assembly ----------------------------------------------------

  static Derivation wrap(Derivation top, const std::vector<Step>& steps) {
    Sequent s = top.conclusion;
    for (auto it = steps.rbegin(); it != steps.rend(); ++it) {
      for (const auto& a : it->addR) s.antecedent.erase(a);
      for (const auto& g : it->addG) s.consequent.erase(g);
      Derivation d;
      d.conclusion = s;
      d.rule = it->app;
      d.premises.push_back(std::move(top));
      top = std::move(d);
    }
    return top;
  }

  Outcome close_leaf(const Impl& st, const std::vector<Step>& steps) {
    ++stats.leaves;
    auto [w, f] = *st.clash;
    Formula phi = st.forms[f];
    if (phi.kind() == K::NegAtom) phi = negate(phi);
    Derivation leaf;
    leaf.conclusion = st.materialize();
    leaf.rule.name = phi.is_literal() ? RuleName::Id : RuleName::GenId;
    leaf.rule.labels = {st.name[w]};
    leaf.rule.formula = phi;
    Outcome o;
    o.closed = true;
    o.proof = wrap(std::move(leaf), steps);
    return o;
  }

  // Applies rules until the sequent closes, opens, or reaches a branch point; at a branch point
  // a frame is pushed, its first premise entered, and saturation continues there.
  Outcome saturate(Impl& st, std::vector<Step>& steps, std::vector<Frame>& stack) {
    for (;;) {
      stats.maxLabels = std::max(stats.maxLabels, st.size());
      if (st.clash) return close_leaf(st, steps);
      std::optional<BranchPoint> bp;
      if (select(st, steps, bp)) continue;
      if (bp) {
        count_step(st, bp->app);
        Frame& f = stack.emplace_back();
        f.bp = std::move(*bp);
        f.node.rule = f.bp.app;
        f.steps = std::move(steps);
        steps.clear();
        f.mark = st.mark();
        if (opts_.checkInvariants) f.before = st.materialize();
        enter_premise(st, f);
        continue;
      }
      auto blk = st.blocking(opts_.loopCheck);
      if (auto c = st.unsaturated(blk); !c.empty())
        throw InternalError("no rule applies but the sequent is not stable (" + c + ")");
      ++stats.leaves;
      Outcome o;
      auto [m, r] = st.stability_model(blk);
      o.model = std::move(m);
      o.root = r;
      stats.modelWorlds = o.model.size();
      return o;
    }
  }

  static void enter_premise(Impl& st, Frame& f) {
    const Adds& a = f.bp.premises[f.next];
    f.fresh = {};
    for (auto [i, w, u] : a.choice)
      if (st.add_choice(i, w, u)) f.fresh.a.insert(RelAtom::choice(i, st.name[w], st.name[u]));
    for (auto [i, w] : a.ideal)
      if (st.add_ideal(i, w)) f.fresh.a.insert(RelAtom::ideal(i, st.name[w]));
    for (auto [w, id] : a.formula)
      if (st.add_formula(w, id)) f.fresh.g.insert({st.name[w], st.forms[id]});
  }

  int n_, k_;
  const ProveOptions& opts_;
  Label nextName_ = 1;
  std::size_t relClosedAt_ = static_cast<std::size_t>(-1);
};

// --- dead-step elimination ---------------------------------------------------

void add_uses(const Derivation& d, Elems& u) {
  const RuleApp& r = d.rule;
  auto L = [&](std::size_t j) { return r.labels.at(j); };
  auto F = [&](Label w) { u.g.insert({w, *r.formula}); };
  switch (r.name) {
    case RuleName::Id:
    case RuleName::GenId:
      F(L(0));
      u.g.insert({L(0), negate(*r.formula)});
      break;
    case RuleName::And: case RuleName::Or: case RuleName::Box: case RuleName::AgBox: case RuleName::Ought:
    case RuleName::Dia:
      F(L(0));
      break;
    case RuleName::AgDia:
      F(L(0));
      u.a.insert(RelAtom::choice(r.agent, L(0), L(1)));
      break;
    case RuleName::Perm:
      F(L(0));
      u.a.insert(RelAtom::ideal(r.agent, L(1)));
      break;
    case RuleName::Euc:
      u.a.insert(RelAtom::choice(r.agent, L(0), L(1)));
      u.a.insert(RelAtom::choice(r.agent, L(0), L(2)));
      break;
    case RuleName::D3:
      u.a.insert(RelAtom::ideal(r.agent, L(0)));
      u.a.insert(RelAtom::choice(r.agent, L(0), L(1)));
      break;
    case RuleName::Sym:
      u.a.insert(RelAtom::choice(r.agent, L(0), L(1)));
      break;
    case RuleName::Tra:
      u.a.insert(RelAtom::choice(r.agent, L(0), L(1)));
      u.a.insert(RelAtom::choice(r.agent, L(1), L(2)));
      break;
    case RuleName::BoxStar:
    case RuleName::OughtStar:
      F(L(0));
      break;
    case RuleName::AgBoxStar:
      u.a.insert(RelAtom::choice(r.agent, L(0), L(1)));
      F(L(1));
      break;
    case RuleName::AgDiaStar:
      u.a.insert(RelAtom::choice(r.agent, L(0), L(1)));
      F(L(0));
      break;
    case RuleName::Wk:
    case RuleName::Sub:
      u.a.insert(d.conclusion.antecedent.begin(), d.conclusion.antecedent.end());
      u.g.insert(d.conclusion.consequent.begin(), d.conclusion.consequent.end());
      break;
    default:
      break;
  }
  // Elements a premise must carry by the rule's schema: when already present they cannot be pruned.
  std::vector<RelAtom> ra;
  std::vector<Labelled> ga;
  switch (r.name) {
    case RuleName::And:
      ga = {{L(0), r.formula->left()}, {L(0), r.formula->right()}};
      break;
    case RuleName::Or: ga = {{L(0), r.formula->left()}, {L(0), r.formula->right()}}; break;
    case RuleName::Dia: case RuleName::AgDia: case RuleName::Perm: ga = {{L(1), r.formula->body()}}; break;
    case RuleName::AgDiaStar: ga = {{L(1), *r.formula}, {L(1), r.formula->body()}}; break;
    case RuleName::BoxStar: case RuleName::OughtStar: ga = {{L(1), *r.formula}}; break;
    case RuleName::Ref: ra = {RelAtom::choice(r.agent, L(0), L(0))}; break;
    case RuleName::Euc: ra = {RelAtom::choice(r.agent, L(1), L(2))}; break;
    case RuleName::Sym: ra = {RelAtom::choice(r.agent, L(1), L(0))}; break;
    case RuleName::Tra: ra = {RelAtom::choice(r.agent, L(0), L(2))}; break;
    case RuleName::D3: ra = {RelAtom::ideal(r.agent, L(1))}; break;
    case RuleName::APC:
      for (std::size_t m = 0; m < r.labels.size(); ++m)
        for (std::size_t j = m + 1; j < r.labels.size(); ++j) ra.push_back(RelAtom::choice(r.agent, L(m), L(j)));
      break;
    default: break;
  }
  for (const auto& a : ra)
    if (d.conclusion.antecedent.count(a)) u.a.insert(a);
  for (const auto& g : ga)
    if (d.conclusion.consequent.count(g)) u.g.insert(g);
}

Elems added(const Derivation& d, const Derivation& p) {
  Elems e;
  std::set_difference(p.conclusion.antecedent.begin(), p.conclusion.antecedent.end(), d.conclusion.antecedent.begin(),
                      d.conclusion.antecedent.end(), std::inserter(e.a, e.a.end()));
  std::set_difference(p.conclusion.consequent.begin(), p.conclusion.consequent.end(),
                      d.conclusion.consequent.begin(), d.conclusion.consequent.end(),
                      std::inserter(e.g, e.g.end()));
  return e;
}

bool meets(const Elems& x, const Elems& y) {
  for (const auto& a : x.a)
    if (y.a.count(a)) return true;
  for (const auto& g : x.g)
    if (y.g.count(g)) return true;
  return false;
}

bool mentions(const Elems& x, const std::vector<Label>& labels) {
  if (labels.empty()) return false;
  auto in = [&](Label l) { return std::find(labels.begin(), labels.end(), l) != labels.end(); };
  for (const auto& a : x.a)
    if (in(a.from) || in(a.to)) return true;
  for (const auto& g : x.g)
    if (in(g.label)) return true;
  return false;
}

struct PruneInfo {
  int keepBranch = -1;  // >= 0: this node is dropped in favour of that premise
  Elems dropped;        // elements added by a dropped node
  std::vector<PruneInfo> kids;
};

Elems analyse(const Derivation& d, PruneInfo& info) {
  info.kids.resize(d.premises.size());
  std::vector<Elems> used(d.premises.size());
  for (std::size_t j = 0; j < d.premises.size(); ++j) used[j] = analyse(d.premises[j], info.kids[j]);
  bool prunable = d.rule.name != RuleName::Wk && d.rule.name != RuleName::Sub;
  for (std::size_t j = 0; prunable && j < d.premises.size(); ++j) {
    Elems add = added(d, d.premises[j]);
    if (!meets(add, used[j]) && !mentions(used[j], d.rule.fresh)) {
      info.keepBranch = static_cast<int>(j);
      info.dropped = std::move(add);
      return std::move(used[j]);
    }
  }
  Elems out;
  for (std::size_t j = 0; j < d.premises.size(); ++j) {
    Elems add = added(d, d.premises[j]);
    for (const auto& a : used[j].a)
      if (!add.a.count(a)) out.a.insert(a);
    for (const auto& g : used[j].g)
      if (!add.g.count(g)) out.g.insert(g);
  }
  add_uses(d, out);
  return out;
}

Derivation rebuild(const Derivation& d, const PruneInfo& info, const Elems& removed) {
  if (info.keepBranch >= 0) {
    Elems r = removed;
    r.a.insert(info.dropped.a.begin(), info.dropped.a.end());
    r.g.insert(info.dropped.g.begin(), info.dropped.g.end());
    return rebuild(d.premises[info.keepBranch], info.kids[info.keepBranch], r);
  }
  Derivation out;
  out.rule = d.rule;
  for (const auto& a : d.conclusion.antecedent)
    if (!removed.a.count(a)) out.conclusion.antecedent.insert(a);
  for (const auto& g : d.conclusion.consequent)
    if (!removed.g.count(g)) out.conclusion.consequent.insert(g);
  for (std::size_t j = 0; j < d.premises.size(); ++j) out.premises.push_back(rebuild(d.premises[j], info.kids[j], removed));
  return out;
}

std::optional<Derivation> drop_addition(const Derivation& d, const Elems& addition) {
  PruneInfo info;
  Elems used = analyse(d, info);
  if (meets(addition, used)) return std::nullopt;
  return rebuild(d, info, addition);
}

// --- expansions --------------------------------------------------------------

Derivation node(Sequent s, RuleName r, AgentId i, std::vector<Label> labels, std::optional<Formula> f,
                std::vector<Label> fresh = {}) {
  Derivation d;
  d.conclusion = std::move(s);
  d.rule.name = r;
  d.rule.agent = i;
  d.rule.labels = std::move(labels);
  d.rule.formula = std::move(f);
  d.rule.fresh = std::move(fresh);
  return d;
}

// Derivation of s, which contains w : f and w : ~f, ending in atomic id leaves.
Derivation close_pair(Sequent s, Label w, Formula f, Label& next) {
  if (f.is_literal()) {
    if (f.kind() == K::NegAtom) f = negate(f);
    return node(std::move(s), RuleName::Id, -1, {w}, f);
  }
  if (f.kind() == K::Or || f.kind() == K::Dia || f.kind() == K::AgDia || f.kind() == K::Perm) f = negate(f);
  Formula g = negate(f);
  switch (f.kind()) {
    case K::And: {
      Sequent p = s;
      p.consequent.insert({w, g.left()});
      p.consequent.insert({w, g.right()});
      Sequent b1 = p, b2 = p;
      b1.consequent.insert({w, f.left()});
      b2.consequent.insert({w, f.right()});
      Derivation a = node(p, RuleName::And, -1, {w}, f);
      a.premises.push_back(close_pair(std::move(b1), w, f.left(), next));
      a.premises.push_back(close_pair(std::move(b2), w, f.right(), next));
      Derivation o = node(std::move(s), RuleName::Or, -1, {w}, g);
      o.premises.push_back(std::move(a));
      return o;
    }
    default: {
      auto labs = labels_of(s);
      while (labs.count(next)) ++next;
      Label u = next++;
      Sequent p1 = s;
      RuleName open = RuleName::Box, close = RuleName::Dia;
      if (f.kind() == K::AgBox) {
        open = RuleName::AgBox;
        close = RuleName::AgDia;
        p1.antecedent.insert(RelAtom::choice(f.agent(), w, u));
      } else if (f.kind() == K::Ought) {
        open = RuleName::Ought;
        close = RuleName::Perm;
        p1.antecedent.insert(RelAtom::ideal(f.agent(), u));
      }
      p1.consequent.insert({u, f.body()});
      Sequent p2 = p1;
      p2.consequent.insert({u, g.body()});
      Derivation inner = node(p1, close, g.is_agentive() ? g.agent() : -1, {w, u}, g);
      inner.premises.push_back(close_pair(std::move(p2), u, f.body(), next));
      Derivation outer = node(std::move(s), open, f.is_agentive() ? f.agent() : -1, {w}, f, {u});
      outer.premises.push_back(std::move(inner));
      return outer;
    }
  }
}

Derivation expand_genid_rec(const Derivation& d, Label& next) {
  if (d.rule.name == RuleName::GenId && d.rule.formula && !d.rule.formula->is_literal())
    return close_pair(d.conclusion, d.rule.labels.at(0), *d.rule.formula, next);
  Derivation out;
  out.conclusion = d.conclusion;
  out.rule = d.rule;
  if (out.rule.name == RuleName::GenId) out.rule.name = RuleName::Id;
  for (const auto& p : d.premises) out.premises.push_back(expand_genid_rec(p, next));
  return out;
}

void max_label(const Derivation& d, Label& m) {
  for (Label l : labels_of(d.conclusion)) m = std::max(m, l);
  for (Label l : d.rule.fresh) m = std::max(m, l);
  for (const auto& p : d.premises) max_label(p, m);
}

}  // namespace

Derivation prune_derivation(const Derivation& d) {
  PruneInfo info;
  analyse(d, info);
  return rebuild(d, info, {});
}

Derivation expand_genid(const Derivation& d, Label firstFreshName) {
  Label m = 0;
  max_label(d, m);
  Label next = std::max(firstFreshName, m + 1);
  return expand_genid_rec(d, next);
}

Derivation expand_ioa(const Derivation& d) {
  Derivation out;
  out.conclusion = d.conclusion;
  out.rule = d.rule;
  for (const auto& p : d.premises) out.premises.push_back(expand_ioa(p));
  if (d.rule.name != RuleName::IoaOpMacro) return out;
  // Chain of single IOA steps, first tuple at the bottom.
  Derivation top = std::move(out.premises.at(0));
  std::vector<Sequent> concl;
  Sequent s = d.conclusion;
  for (std::size_t t = 0; t < d.rule.tuples.size(); ++t) {
    concl.push_back(s);
    for (std::size_t i = 0; i < d.rule.tuples[t].size(); ++i)
      s.antecedent.insert(RelAtom::choice(static_cast<AgentId>(i), d.rule.tuples[t][i], d.rule.fresh[t]));
  }
  for (std::size_t t = d.rule.tuples.size(); t-- > 0;) {
    Derivation step;
    step.conclusion = concl[t];
    step.rule.name = RuleName::IOA;
    step.rule.labels = d.rule.tuples[t];
    step.rule.fresh = {d.rule.fresh[t]};
    step.premises.push_back(std::move(top));
    top = std::move(step);
  }
  return top;
}

Verdict prove(const Formula& phi, int agents, int choices, const ProveOptions& opts) {
  if (agents < 1) throw MalformedInput("agent count must be positive");
  if (choices < 0) throw MalformedInput("choice bound must be non-negative");
  check_agents(phi, agents);
  SearchState init = SearchState::initial(phi, agents, choices);
  Prover p(agents, choices, opts);
  SearchState::Impl st = init.impl();
  Outcome o = p.run(st);
  Verdict v;
  v.valid = o.closed;
  if (o.closed) {
    Derivation d = std::move(o.proof);
    if (opts.prune) d = prune_derivation(d);
    if (opts.expandIoa) d = expand_ioa(d);
    if (opts.expandGenId) d = expand_genid(d, p.peek_name());
    v.proof = std::move(d);
  } else {
    v.model = std::move(o.model);
    v.root = o.root;
  }
  v.stats = p.stats;
  return v;
}

}  // namespace dstit
