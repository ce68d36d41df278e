#include <algorithm>
#include <map>
#include <set>

#include "dstit/errors.hpp"
#include "search_state_impl.hpp"

namespace dstit {

SearchState::Impl::Impl(int agents, int choices) : n(agents), k(choices) {
  if (agents < 1) throw MalformedInput("agent count must be positive");
  if (choices < 0) throw MalformedInput("choice bound must be non-negative");
  rel.resize(n);
  ideal.resize(n);
  d2Fired.assign(n, 0);
}

int SearchState::Impl::index_of(Label l) const {
  auto it = idx.find(l);
  if (it == idx.end()) throw MalformedInput("unknown label " + label_name(l));
  return it->second;
}

int SearchState::Impl::intern(const Formula& f) {
  if (auto it = fid.find(f); it != fid.end()) return it->second;
  int l = -1, r = -1;
  if (!f.is_literal()) {
    l = intern(f.left());
    if (f.is_binary()) r = intern(f.right());
  }
  int id = static_cast<int>(forms.size());
  forms.push_back(f);
  fid.emplace(f, id);
  lhs.push_back(l);
  rhs.push_back(r);
  fkind.push_back(f.kind());
  fagent.push_back(f.agent());
  neg.push_back(-1);
  if (auto it = fid.find(negate(f)); it != fid.end()) {
    neg[id] = it->second;
    neg[it->second] = id;
  }
  for (auto& g : gamma) g.resize(forms.size());
  return id;
}

void SearchState::Impl::intern_all(const Formula& f) {
  for (const auto& g : subterms(f)) intern(g);
}

int SearchState::Impl::new_label(Label nm, Origin o, int par, std::vector<int> tup) {
  if (idx.count(nm)) throw InternalError("label " + label_name(nm) + " already exists");
  int w = static_cast<int>(name.size());
  name.push_back(nm);
  idx.emplace(nm, w);
  origin.push_back(o);
  parent.push_back(par);
  tuple.push_back(std::move(tup));
  gamma.emplace_back(forms.size());
  for (AgentId i = 0; i < n; ++i) {
    for (auto& row : rel[i]) row.resize(name.size());
    rel[i].emplace_back(name.size());
    ideal[i].resize(name.size());
  }
  trail.push_back({Change::Kind::Label});
  ++relVersion;
  return w;
}

bool SearchState::Impl::add_choice(int i, int w, int u) {
  if (rel[i][w].test(u)) return false;
  rel[i][w].set(u);
  trail.push_back({Change::Kind::Choice, i, w, u});
  ++relVersion;
  return true;
}

bool SearchState::Impl::add_ideal(int i, int w) {
  if (ideal[i].test(w)) return false;
  ideal[i].set(w);
  trail.push_back({Change::Kind::Ideal, i, w});
  return true;
}

bool SearchState::Impl::add_formula(int w, int f) {
  if (has(w, f)) return false;
  gamma[w].set(f);
  bool clashes = !clash && neg[f] >= 0 && has(w, neg[f]);
  if (clashes) clash = {w, f};
  trail.push_back({Change::Kind::Formula, w, f, clashes});
  return true;
}

std::size_t SearchState::Impl::fire_box(int f) {
  trail.push_back({Change::Kind::Box, f});
  return ++boxFired[f];
}

std::size_t SearchState::Impl::fire_ought(int f) {
  trail.push_back({Change::Kind::Ought, f});
  return ++oughtFired[f];
}

std::size_t SearchState::Impl::fire_d2(AgentId i) {
  trail.push_back({Change::Kind::D2, i});
  return ++d2Fired[i];
}

void SearchState::Impl::note_agbox(AgentId i) {
  agboxAgents.push_back(i);
  trail.push_back({Change::Kind::AgBox});
}

void SearchState::Impl::undo_to(std::size_t m) {
  using K = Change::Kind;
  auto decrement = [](std::map<int, std::size_t>& counts, int f) {
    if (--counts[f] == 0) counts.erase(f);
  };
  if (trail.size() > m) ++relVersion;
  while (trail.size() > m) {
    Change c = trail.back();
    trail.pop_back();
    switch (c.kind) {
      case K::Choice: rel[c.a][c.b].reset(c.c); break;
      case K::Ideal: ideal[c.a].reset(c.b); break;
      case K::Formula:
        gamma[c.a].reset(c.b);
        if (c.c) clash.reset();
        break;
      case K::Label:
        idx.erase(name.back());
        name.pop_back();
        origin.pop_back();
        parent.pop_back();
        tuple.pop_back();
        gamma.pop_back();
        for (AgentId i = 0; i < n; ++i) {
          rel[i].pop_back();
          for (auto& row : rel[i]) row.resize(name.size());
          ideal[i].resize(name.size());
        }
        break;
      case K::Box: decrement(boxFired, c.a); break;
      case K::Ought: decrement(oughtFired, c.a); break;
      case K::D2: --d2Fired[c.a]; break;
      case K::AgBox: agboxAgents.pop_back(); break;
    }
  }
}

std::vector<BlockStatus> SearchState::Impl::blocking(bool loopCheck) const {
  const std::size_t L = size();
  std::vector<BlockStatus> out(L);
  if (!loopCheck) return out;
  std::vector<int> direct(L, -1);
  for (std::size_t u = 1; u < L; ++u) {
    if (!in_gen_tree(static_cast<int>(u))) continue;
    for (int v = parent[u]; v > 0; v = parent[v]) {
      bool same = gamma[u] == gamma[v];
      for (AgentId i = 0; same && i < n; ++i) same = ideal[i].test(u) == ideal[i].test(v);
      if (same) {
        direct[u] = v;
        break;
      }
    }
  }
  for (std::size_t u = 1; u < L; ++u) {
    if (!in_gen_tree(static_cast<int>(u))) continue;
    int via = -1;
    for (int a = parent[u]; a >= 0; a = parent[a])
      if (direct[a] >= 0) {
        via = a;
        break;
      }
    if (via >= 0)
      out[u] = {BlockStatus::Kind::IndirectlyBlocked, name[via]};
    else if (direct[u] >= 0)
      out[u] = {BlockStatus::Kind::DirectlyBlocked, name[direct[u]]};
  }
  return out;
}

std::vector<bool> SearchState::Impl::live(const std::vector<BlockStatus>& blk) const {
  std::vector<bool> out(size());
  for (std::size_t u = 0; u < size(); ++u) {
    out[u] = !blk[u].blocked();
    if (!in_gen_tree(static_cast<int>(u)))
      for (int t : tuple[u]) out[u] = out[u] && !blk[t].blocked();
  }
  return out;
}

namespace {

// Labels of w's i-class under the undirected closure of the agent-i atoms.
std::vector<std::size_t> class_roots(const SearchState::Impl& s, AgentId i) {
  UnionFind uf(s.size());
  for (std::size_t w = 0; w < s.size(); ++w)
    for (auto u = s.rel[i][w].find_first(); u != Bits::npos; u = s.rel[i][w].find_next(u)) uf.unite(w, u);
  std::vector<std::size_t> root(s.size());
  for (std::size_t w = 0; w < s.size(); ++w) root[w] = uf.find(w);
  return root;
}

}  // namespace

std::vector<std::vector<int>> SearchState::Impl::unsatisfied_ioa_tuples(const std::vector<BlockStatus>& blk) const {
  const std::size_t L = size();
  std::vector<std::vector<std::size_t>> roots(n);
  const std::vector<bool> alive = live(blk);
  std::vector<std::vector<int>> reps(n);  // per agent: min unblocked non-IOA label of each class, in label order
  for (AgentId i = 0; i < n; ++i) {
    roots[i] = class_roots(*this, i);
    std::set<std::size_t> seen;
    for (std::size_t w = 0; w < L; ++w)
      if (in_gen_tree(static_cast<int>(w)) && !blk[w].blocked() && seen.insert(roots[i][w]).second)
        reps[i].push_back(static_cast<int>(w));
  }
  std::set<std::vector<std::size_t>> covered;
  for (std::size_t u = 0; u < L; ++u) {
    if (in_gen_tree(static_cast<int>(u)) || !alive[u]) continue;
    std::vector<std::size_t> key(n);
    for (AgentId i = 0; i < n; ++i) key[i] = roots[i][u];
    covered.insert(key);
  }
  std::vector<std::vector<int>> out;
  for (AgentId i = 0; i < n; ++i)
    if (reps[i].empty()) return out;
  std::vector<std::size_t> pick(n, 0);
  for (;;) {
    std::vector<std::size_t> key(n);
    std::vector<int> tup(n);
    for (AgentId i = 0; i < n; ++i) {
      tup[i] = reps[i][pick[i]];
      key[i] = roots[i][tup[i]];
    }
    if (!covered.count(key)) out.push_back(tup);
    int i = n - 1;
    for (; i >= 0; --i) {
      if (++pick[i] < reps[i].size()) break;
      pick[i] = 0;
    }
    if (i < 0) break;
  }
  return out;
}

bool SearchState::Impl::ioa_satisfied(const std::vector<BlockStatus>& blk) const {
  return unsatisfied_ioa_tuples(blk).empty();
}

std::string SearchState::Impl::unsaturated(const std::vector<BlockStatus>& blk) const {
  using K = Formula::Kind;
  const std::size_t L = size();
  const std::vector<bool> alive = live(blk);
  auto unblocked_tree = [&](std::size_t u) { return in_gen_tree(static_cast<int>(u)) && !blk[u].blocked(); };
  for (std::size_t w = 0; w < L; ++w)
    for (auto f = gamma[w].find_first(); f != Bits::npos; f = gamma[w].find_next(f))
      if (neg[f] >= 0 && has(w, neg[f])) return "C_id";
  for (std::size_t w = 0; w < L; ++w) {
    for (auto f = gamma[w].find_first(); f != Bits::npos; f = gamma[w].find_next(f)) {
      int b = lhs[f];
      AgentId i = fagent[f];
      switch (fkind[f]) {
        case K::Or:
          if (!has(w, b) || !has(w, rhs[f])) return "C_or";
          break;
        case K::And:
          if (!has(w, b) && !has(w, rhs[f])) return "C_and";
          break;
        case K::Dia:
          for (std::size_t u = 0; u < L; ++u)
            if (!has(u, b)) return "C_dia";
          break;
        case K::Box: {
          bool ok = false;
          for (std::size_t u = 0; u < L && !ok; ++u) ok = unblocked_tree(u) && has(u, b);
          if (!ok) return "C_box";
          break;
        }
        case K::AgDia:
          for (auto u = rel[i][w].find_first(); u != Bits::npos; u = rel[i][w].find_next(u))
            if (!has(u, b) || !has(u, f)) return "C_agdia";
          break;
        case K::AgBox: {
          if (!alive[w]) break;
          bool ok = false;
          for (auto u = rel[i][w].find_first(); u != Bits::npos && !ok; u = rel[i][w].find_next(u)) ok = has(u, b);
          if (!ok) return "C_agbox";
          break;
        }
        case K::Perm:
          for (auto u = ideal[i].find_first(); u != Bits::npos; u = ideal[i].find_next(u))
            if (!has(u, b)) return "C_perm";
          break;
        case K::Ought: {
          bool ok = false;
          for (std::size_t u = 0; u < L && !ok; ++u) ok = unblocked_tree(u) && ideal[i].test(u) && has(u, b);
          if (!ok) return "C_ought";
          break;
        }
        default: break;
      }
    }
  }
  for (AgentId i = 0; i < n; ++i)
    for (std::size_t w = 0; w < L; ++w)
      if (!rel[i][w].test(w)) return "C_ref";
  for (AgentId i = 0; i < n; ++i)
    for (std::size_t w = 0; w < L; ++w)
      for (auto u = rel[i][w].find_first(); u != Bits::npos; u = rel[i][w].find_next(u))
        if (!rel[i][w].is_subset_of(rel[i][u])) return "C_euc";
  for (AgentId i = 0; i < n; ++i) {
    bool ok = false;
    for (std::size_t u = 0; u < L && !ok; ++u) ok = unblocked_tree(u) && ideal[i].test(u);
    if (!ok) return "C_d2";
  }
  for (AgentId i = 0; i < n; ++i)
    for (auto w = ideal[i].find_first(); w != Bits::npos; w = ideal[i].find_next(w))
      if (!rel[i][w].is_subset_of(ideal[i])) return "C_d3";
  if (k > 0) {
    // k+1 pairwise unrelated labels
    for (AgentId i = 0; i < n; ++i) {
      std::vector<std::size_t> pick;
      auto related = [&](std::size_t a, std::size_t b) { return rel[i][a].test(b) || rel[i][b].test(a); };
      auto search = [&](auto&& self, std::size_t from) -> bool {
        if (pick.size() == static_cast<std::size_t>(k) + 1) return true;
        for (std::size_t w = from; w < L; ++w) {
          bool ok = true;
          for (auto p : pick) ok = ok && !related(p, w);
          if (!ok) continue;
          pick.push_back(w);
          if (self(self, w + 1)) return true;
          pick.pop_back();
        }
        return false;
      };
      if (search(search, 0)) return "C_apc";
    }
  }
  if (n >= 2 && !ioa_satisfied(blk)) return "IOA";
  return {};
}

Sequent SearchState::Impl::materialize() const {
  Sequent s;
  const std::size_t L = size();
  for (AgentId i = 0; i < n; ++i)
    for (std::size_t w = 0; w < L; ++w) {
      for (auto u = rel[i][w].find_first(); u != Bits::npos; u = rel[i][w].find_next(u))
        s.antecedent.insert(RelAtom::choice(i, name[w], name[u]));
      if (ideal[i].test(w)) s.antecedent.insert(RelAtom::ideal(i, name[w]));
    }
  for (std::size_t w = 0; w < L; ++w)
    for (auto f = gamma[w].find_first(); f != Bits::npos; f = gamma[w].find_next(f))
      s.consequent.insert({name[w], forms[f]});
  return s;
}

std::pair<DsModel, World> SearchState::Impl::stability_model(const std::vector<BlockStatus>& blk) const {
  const std::size_t L = size();
  std::vector<int> world(L, -1);
  DsModel m;
  m.agents = n;
  m.choices = k;
  const std::vector<bool> alive = live(blk);
  for (std::size_t w = 0; w < L; ++w)
    if (alive[w]) {
      world[w] = static_cast<int>(m.worlds.size());
      m.worlds.push_back(label_name(name[w]));
    }
  const std::size_t W = m.worlds.size();
  m.rel.resize(n);
  m.ideal.resize(n);
  for (AgentId i = 0; i < n; ++i) {
    std::vector<Bits> r(W, Bits(W));
    for (std::size_t w = 0; w < L; ++w) {
      if (world[w] < 0) continue;
      for (auto v = rel[i][w].find_first(); v != Bits::npos; v = rel[i][w].find_next(v)) {
        if (world[v] >= 0) {
          r[world[w]].set(world[v]);
        } else if (blk[v].kind == BlockStatus::Kind::DirectlyBlocked) {
          int u = index_of(blk[v].via);
          if (world[u] >= 0) r[world[w]].set(world[u]);
        }
      }
    }
    // Euclidean closure: R wu, R wv give R uv.
    for (bool changed = true; changed;) {
      changed = false;
      for (std::size_t w = 0; w < W; ++w)
        for (auto u = r[w].find_first(); u != Bits::npos; u = r[w].find_next(u)) {
          Bits before = r[u];
          r[u] |= r[w];
          if (r[u] != before) changed = true;
        }
    }
    for (std::size_t w = 0; w < W; ++w)
      for (auto u = r[w].find_first(); u != Bits::npos; u = r[w].find_next(u)) m.rel[i].insert({w, u});
    for (std::size_t w = 0; w < L; ++w)
      if (world[w] >= 0 && ideal[i].test(w)) m.ideal[i].insert(world[w]);
  }
  for (std::size_t f = 0; f < forms.size(); ++f) {
    if (fkind[f] == Formula::Kind::Atom) m.val.try_emplace(forms[f].name());
    if (fkind[f] != Formula::Kind::NegAtom) continue;
    auto& s = m.val[forms[f].name()];
    for (std::size_t w = 0; w < L; ++w)
      if (world[w] >= 0 && has(w, f)) s.insert(world[w]);
  }
  return {std::move(m), static_cast<World>(world[0])};
}

// ---------------------------------------------------------------------------

SearchState::SearchState(int agents, int choices) : impl_(std::make_unique<Impl>(agents, choices)) {}
SearchState::SearchState(const SearchState& o) : impl_(std::make_unique<Impl>(*o.impl_)) {}
SearchState& SearchState::operator=(const SearchState& o) {
  if (this != &o) impl_ = std::make_unique<Impl>(*o.impl_);
  return *this;
}
SearchState::SearchState(SearchState&&) noexcept = default;
SearchState& SearchState::operator=(SearchState&&) noexcept = default;
SearchState::~SearchState() = default;

SearchState SearchState::initial(const Formula& phi, int agents, int choices) {
  check_agents(phi, agents);
  SearchState s(agents, choices);
  s.impl_->intern_all(phi);
  s.add_label(0, Origin::Root);
  s.add_formula(0, phi);
  return s;
}

Label SearchState::add_label(Label nm, Origin o, std::optional<Label> parent, std::vector<Label> ioaTuple) {
  Impl& s = *impl_;
  if (s.size() == 0 && o != Origin::Root) throw MalformedInput("the first label must be the root");
  if (s.size() > 0 && o == Origin::Root) throw MalformedInput("only one root label");
  std::vector<int> tup;
  int par = -1;
  if (o == Origin::ByIOA) {
    if (ioaTuple.size() != static_cast<std::size_t>(s.n)) throw MalformedInput("IOA label needs one tuple entry per agent");
    for (Label l : ioaTuple) tup.push_back(s.index_of(l));
  } else if (o != Origin::Root) {
    if (!parent) throw MalformedInput("non-root label needs a parent");
    par = s.index_of(*parent);
    if (!s.in_gen_tree(par)) throw MalformedInput("IOA labels have no children");
  }
  s.new_label(nm, o, par, std::move(tup));
  return nm;
}

void SearchState::add_atom(const RelAtom& a) {
  Impl& s = *impl_;
  if (a.agent < 0 || a.agent >= s.n) throw AgentRangeError(a.agent, s.n);
  if (a.is_choice())
    s.add_choice(a.agent, s.index_of(a.from), s.index_of(a.to));
  else
    s.add_ideal(a.agent, s.index_of(a.from));
}

void SearchState::add_formula(Label w, const Formula& f) {
  Impl& s = *impl_;
  check_agents(f, s.n);
  int id = s.intern(f);
  s.add_formula(s.index_of(w), id);
}

int SearchState::agents() const { return impl_->n; }
int SearchState::choices() const { return impl_->k; }
Label SearchState::root() const {
  if (impl_->size() == 0) throw MalformedInput("state has no labels");
  return impl_->name[0];
}
std::vector<Label> SearchState::labels() const { return impl_->name; }
Origin SearchState::origin(Label l) const { return impl_->origin[impl_->index_of(l)]; }

std::set<Label> SearchState::ioa_labels() const {
  std::set<Label> out;
  for (std::size_t w = 0; w < impl_->size(); ++w)
    if (impl_->origin[w] == Origin::ByIOA) out.insert(impl_->name[w]);
  return out;
}

Sequent SearchState::sequent() const { return impl_->materialize(); }

GenerationTree SearchState::generation_tree() const {
  const Impl& s = *impl_;
  GenerationTree g;
  if (s.size() == 0) return g;
  g.root = s.name[0];
  for (std::size_t w = 0; w < s.size(); ++w) {
    if (!s.in_gen_tree(static_cast<int>(w))) continue;
    g.vertices.insert(s.name[w]);
    if (s.parent[w] >= 0) g.edges.insert({s.name[s.parent[w]], s.name[w]});
  }
  return g;
}

BlockStatus SearchState::block_status(Label u) const {
  int w = impl_->index_of(u);
  return impl_->blocking(true)[w];
}

bool SearchState::is_stable() const { return unsaturated_condition().empty(); }

std::string SearchState::unsaturated_condition() const { return impl_->unsaturated(impl_->blocking(true)); }

bool SearchState::ioa_satisfied() const { return impl_->ioa_satisfied(impl_->blocking(true)); }

std::pair<std::vector<std::vector<Label>>, std::vector<Label>> SearchState::ioa_op(Label firstFreshName) {
  Impl& s = *impl_;
  auto tuples = s.unsatisfied_ioa_tuples(s.blocking(true));
  if (tuples.empty()) throw InternalError("ioa_op called on an IOA-satisfied state");
  std::vector<std::vector<Label>> named;
  std::vector<Label> fresh;
  Label next = firstFreshName;
  for (const auto& t : tuples) {
    while (s.idx.count(next)) ++next;
    int u = s.new_label(next, Origin::ByIOA, -1, t);
    std::vector<Label> nt;
    for (AgentId i = 0; i < s.n; ++i) {
      s.add_choice(i, t[i], u);
      nt.push_back(s.name[t[i]]);
    }
    named.push_back(nt);
    fresh.push_back(next);
  }
  return {named, fresh};
}

std::pair<DsModel, World> SearchState::extract_stability_model() const {
  auto blk = impl_->blocking(true);
  if (auto c = impl_->unsaturated(blk); !c.empty()) throw InstabilityError("sequent is not stable (" + c + ")");
  return impl_->stability_model(blk);
}

}  // namespace dstit
