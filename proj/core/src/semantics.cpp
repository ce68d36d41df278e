#include "dstit/semantics.hpp"

#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "dstit/errors.hpp"

namespace dstit {

World DsModel::world(std::string_view name) const {
  for (World w = 0; w < worlds.size(); ++w)
    if (worlds[w] == name) return w;
  throw UnknownWorld(std::string(name));
}

std::string ConditionReport::summary() const {
  std::string out;
  auto add = [&](const char* name, const ConditionResult& r) {
    out += name;
    out += r.ok ? ": ok" : ": FAIL (" + r.witness + ")";
    out += '\n';
  };
  add("C1", c1);
  add("C2", c2);
  add("C3", c3);
  add("D1", d1);
  add("D2", d2);
  add("D3", d3);
  return out;
}

namespace {

void check_shape(const DsModel& m) {
  if (m.agents < 1) throw MalformedInput("model needs at least one agent");
  if (m.worlds.empty()) throw MalformedInput("model has no worlds");
  if (m.rel.size() != static_cast<std::size_t>(m.agents) ||
      m.ideal.size() != static_cast<std::size_t>(m.agents))
    throw MalformedInput("model must give one relation and one ideal set per agent");
  auto in = [&](World w) { return w < m.worlds.size(); };
  for (const auto& r : m.rel)
    for (auto [a, b] : r)
      if (!in(a) || !in(b)) throw MalformedInput("relation mentions an unknown world");
  for (const auto& s : m.ideal)
    for (World w : s)
      if (!in(w)) throw MalformedInput("ideal set mentions an unknown world");
  for (const auto& [p, s] : m.val)
    for (World w : s)
      if (!in(w)) throw MalformedInput("valuation of " + p + " mentions an unknown world");
}

std::string pair_str(const DsModel& m, World a, World b) {
  return "(" + m.worlds[a] + "," + m.worlds[b] + ")";
}

// Pairwise unrelated subset of size `need`, by backtracking.
bool unrelated_subset(const DsModel& m, AgentId i, std::size_t need, std::vector<World>& pick,
                      World from) {
  if (pick.size() == need) return true;
  for (World w = from; w < m.size(); ++w) {
    bool ok = true;
    for (World u : pick)
      if (m.related(i, u, w) || m.related(i, w, u)) {
        ok = false;
        break;
      }
    if (!ok) continue;
    pick.push_back(w);
    if (unrelated_subset(m, i, need, pick, w + 1)) return true;
    pick.pop_back();
  }
  return false;
}

}  // namespace

ConditionReport validate_frame(const DsModel& m) {
  check_shape(m);
  ConditionReport rep;
  const std::size_t n = m.size();
  auto agent_tag = [](AgentId i) { return "agent " + std::to_string(i) + ": "; };

  // Row w of agent i is R_[i](w).
  std::vector<std::vector<std::vector<bool>>> rows(m.agents, std::vector<std::vector<bool>>(n, std::vector<bool>(n)));
  for (AgentId i = 0; i < m.agents; ++i)
    for (auto [a, b] : m.rel[i]) rows[i][a][b] = true;

  for (AgentId i = 0; i < m.agents && rep.c1.ok; ++i) {
    const auto& r = rows[i];
    for (World w = 0; w < n && rep.c1.ok; ++w)
      if (!r[w][w]) rep.c1 = {false, agent_tag(i) + "reflexivity " + pair_str(m, w, w)};
    for (auto [a, b] : m.rel[i]) {
      if (!rep.c1.ok) break;
      if (!r[b][a]) rep.c1 = {false, agent_tag(i) + "symmetry " + pair_str(m, a, b)};
    }
    for (auto [a, b] : m.rel[i]) {
      if (!rep.c1.ok) break;
      if (r[a] == r[b]) continue;
      for (World c = 0; c < n; ++c)
        if (r[b][c] && !r[a][c]) {
          rep.c1 = {false, agent_tag(i) + "transitivity " + pair_str(m, a, b) + pair_str(m, b, c)};
          break;
        }
    }
  }

  // Candidate cells per agent: the distinct successor sets R_[i](w).
  std::vector<std::vector<std::vector<bool>>> cells(m.agents);
  for (AgentId i = 0; i < m.agents; ++i) {
    std::set<std::vector<bool>> seen;
    for (World w = 0; w < n; ++w)
      if (seen.insert(rows[i][w]).second) cells[i].push_back(rows[i][w]);
  }
  std::vector<std::size_t> choice(m.agents, 0);
  auto empty_cells = [&] {
    std::string wit = "empty intersection of cells";
    for (AgentId j = 0; j < m.agents; ++j) {
      const auto& c = cells[j][choice[j]];
      wit += " " + std::to_string(j) + ":{";
      bool first = true;
      for (World u = 0; u < n; ++u)
        if (c[u]) {
          wit += (first ? "" : ",") + m.worlds[u];
          first = false;
        }
      wit += "}";
    }
    rep.c2 = {false, wit};
  };
  if (rep.c1.ok) {
    // Cells partition the worlds: every combination must be the class tuple of some world.
    std::vector<std::map<std::vector<bool>, std::size_t>> cellIndex(m.agents);
    for (AgentId i = 0; i < m.agents; ++i)
      for (std::size_t c = 0; c < cells[i].size(); ++c) cellIndex[i].emplace(cells[i][c], c);
    std::set<std::vector<std::size_t>> realized;
    for (World w = 0; w < n; ++w) {
      std::vector<std::size_t> t(m.agents);
      for (AgentId i = 0; i < m.agents; ++i) t[i] = cellIndex[i].at(rows[i][w]);
      realized.insert(std::move(t));
    }
    // Combinations in lexicographic order; the first absent one is reached within |realized| + 1 steps.
    for (;;) {
      if (!realized.count(choice)) {
        empty_cells();
        break;
      }
      AgentId i = m.agents - 1;
      while (i >= 0 && ++choice[i] == cells[i].size()) choice[i--] = 0;
      if (i < 0) break;
    }
  } else {
    std::function<void(AgentId, std::vector<bool>)> walk = [&](AgentId i, std::vector<bool> acc) {
      if (!rep.c2.ok) return;
      if (i == m.agents) {
        for (bool b : acc)
          if (b) return;
        empty_cells();
        return;
      }
      for (std::size_t c = 0; c < cells[i].size(); ++c) {
        choice[i] = c;
        std::vector<bool> next(n);
        for (World u = 0; u < n; ++u) next[u] = acc[u] && cells[i][c][u];
        walk(i + 1, next);
      }
    };
    walk(0, std::vector<bool>(n, true));
  }

  if (m.choices > 0) {
    for (AgentId i = 0; i < m.agents && rep.c3.ok; ++i) {
      std::vector<World> pick;
      if (unrelated_subset(m, i, static_cast<std::size_t>(m.choices) + 1, pick, 0)) {
        std::string wit = agent_tag(i) + "pairwise unrelated {";
        for (std::size_t j = 0; j < pick.size(); ++j) wit += (j ? "," : "") + m.worlds[pick[j]];
        rep.c3 = {false, wit + "}"};
      }
    }
  }

  for (AgentId i = 0; i < m.agents; ++i) {
    if (m.ideal[i].empty() && rep.d2.ok) rep.d2 = {false, agent_tag(i) + "empty ideal set"};
    for (World w : m.ideal[i]) {
      if (!rep.d3.ok) break;
      for (World u = 0; u < n; ++u)
        if (rows[i][w][u] && !m.ideal[i].count(u)) {
          rep.d3 = {false, agent_tag(i) + "ideal " + m.worlds[w] + " reaches non-ideal " + m.worlds[u]};
          break;
        }
    }
  }
  return rep;
}

std::vector<bool> truth_set(const DsModel& m, const Formula& f) {
  using K = Formula::Kind;
  const std::size_t n = m.size();
  auto agent_ok = [&](AgentId i) {
    if (i < 0 || i >= m.agents) throw AgentRangeError(i, m.agents);
  };
  switch (f.kind()) {
    case K::Atom:
    case K::NegAtom: {
      std::vector<bool> out(n, f.kind() == K::NegAtom);
      auto it = m.val.find(f.name());
      if (it != m.val.end())
        for (World w : it->second) out[w] = f.kind() == K::Atom;
      return out;
    }
    case K::And:
    case K::Or: {
      auto l = truth_set(m, f.left());
      auto r = truth_set(m, f.right());
      for (World w = 0; w < n; ++w) l[w] = f.kind() == K::And ? (l[w] && r[w]) : (l[w] || r[w]);
      return l;
    }
    case K::Box:
    case K::Dia: {
      auto b = truth_set(m, f.body());
      bool all = true, any = false;
      for (bool x : b) {
        all = all && x;
        any = any || x;
      }
      return std::vector<bool>(n, f.kind() == K::Box ? all : any);
    }
    case K::AgBox:
    case K::AgDia: {
      agent_ok(f.agent());
      auto b = truth_set(m, f.body());
      std::vector<bool> out(n, f.kind() == K::AgBox);
      for (auto [w, u] : m.rel[f.agent()]) {
        if (f.kind() == K::AgBox && !b[u]) out[w] = false;
        if (f.kind() == K::AgDia && b[u]) out[w] = true;
      }
      return out;
    }
    case K::Ought:
    case K::Perm: {
      agent_ok(f.agent());
      auto b = truth_set(m, f.body());
      bool all = true, any = false;
      for (World u : m.ideal[f.agent()]) {
        all = all && b[u];
        any = any || b[u];
      }
      return std::vector<bool>(n, f.kind() == K::Ought ? all : any);
    }
  }
  return std::vector<bool>(n, false);
}

bool satisfies(const DsModel& m, World w, const Formula& f) {
  if (w >= m.size()) throw UnknownWorld(std::to_string(w));
  return truth_set(m, f)[w];
}

bool satisfies(const DsModel& m, std::string_view w, const Formula& f) {
  return satisfies(m, m.world(w), f);
}

bool valid_on_model(const DsModel& m, const Formula& f) {
  for (bool b : truth_set(m, f))
    if (!b) return false;
  return true;
}

bool satisfies_sequent(const DsModel& m, const Interpretation& itp, const Sequent& s) {
  auto at = [&](Label l) {
    auto it = itp.find(l);
    if (it == itp.end()) throw IncompleteInterpretation("no world for label " + label_name(l));
    if (it->second >= m.size()) throw UnknownWorld(std::to_string(it->second));
    return it->second;
  };
  for (Label l : labels_of(s)) at(l);
  for (const auto& a : s.antecedent) {
    if (a.agent < 0 || a.agent >= m.agents) throw AgentRangeError(a.agent, m.agents);
    bool holds = a.is_choice() ? m.related(a.agent, at(a.from), at(a.to))
                               : m.ideal[a.agent].count(at(a.from)) > 0;
    if (!holds) return true;
  }
  for (const auto& lf : s.consequent)
    if (satisfies(m, at(lf.label), lf.formula)) return true;
  return false;
}

std::string to_dot(const DsModel& m) {
  std::ostringstream os;
  os << "graph model {\n";
  for (World w = 0; w < m.size(); ++w) {
    os << "  \"" << m.worlds[w] << "\" [label=\"" << m.worlds[w];
    for (const auto& [p, s] : m.val)
      if (s.count(w)) os << "\\n" << p;
    for (AgentId i = 0; i < m.agents; ++i)
      if (m.ideal[i].count(w)) os << "\\nideal " << i;
    os << "\"];\n";
  }
  for (AgentId i = 0; i < m.agents; ++i)
    for (auto [a, b] : m.rel[i])
      if (a < b) os << "  \"" << m.worlds[a] << "\" -- \"" << m.worlds[b] << "\" [label=\"" << i << "\"];\n";
  os << "}\n";
  return os.str();
}

}  // namespace dstit
