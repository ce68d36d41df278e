#include <cstdint>
#include <map>
#include <vector>

#include "dstit/errors.hpp"
#include "dstit/semantics.hpp"

namespace dstit {

namespace {

using Mask = std::uint64_t;

struct Op {
  Formula::Kind kind;
  int agentSlot = -1;  // index into the relevant-agent list
  int var = -1;
  int l = -1, r = -1;
};

struct Program {
  std::vector<Op> ops;  // post-order; last op is the root
  std::vector<std::string> vars;
  std::vector<AgentId> agents;  // agents mentioned by the formula
  std::vector<bool> deontic;    // per agent slot
};

int compile(const Formula& f, Program& p, std::map<Formula, int>& memo) {
  if (auto it = memo.find(f); it != memo.end()) return it->second;
  Op op{f.kind()};
  if (f.is_literal()) {
    for (std::size_t j = 0; j < p.vars.size(); ++j)
      if (p.vars[j] == f.name()) op.var = static_cast<int>(j);
  } else {
    op.l = compile(f.left(), p, memo);
    if (f.is_binary()) op.r = compile(f.right(), p, memo);
    if (f.is_agentive())
      for (std::size_t j = 0; j < p.agents.size(); ++j)
        if (p.agents[j] == f.agent()) op.agentSlot = static_cast<int>(j);
  }
  p.ops.push_back(op);
  int id = static_cast<int>(p.ops.size()) - 1;
  memo.emplace(f, id);
  return id;
}

// Set partitions of {0..m-1} with at most maxBlocks blocks, as block masks, restricted-growth order.
std::vector<std::vector<Mask>> partitions(std::size_t m, std::size_t maxBlocks) {
  std::vector<std::vector<Mask>> out;
  std::vector<std::size_t> a(m, 0);
  auto emit = [&] {
    std::size_t blocks = 0;
    for (auto x : a) blocks = std::max(blocks, x + 1);
    std::vector<Mask> ms(blocks, 0);
    for (std::size_t w = 0; w < m; ++w) ms[a[w]] |= Mask{1} << w;
    out.push_back(std::move(ms));
  };
  std::vector<std::size_t> pref(m, 0);  // max of a[0..j]
  auto rec = [&](auto&& self, std::size_t j) -> void {
    if (j == m) {
      emit();
      return;
    }
    std::size_t hi = j == 0 ? 0 : pref[j - 1] + 1;
    for (std::size_t v = 0; v <= hi; ++v) {
      if (v + 1 > maxBlocks) break;
      a[j] = v;
      pref[j] = j == 0 ? v : std::max(pref[j - 1], v);
      self(self, j + 1);
    }
  };
  rec(rec, 0);
  return out;
}

bool independent(const std::vector<const std::vector<Mask>*>& parts, std::size_t i, Mask acc) {
  if (acc == 0) return false;
  if (i == parts.size()) return true;
  for (Mask b : *parts[i])
    if (!independent(parts, i + 1, acc & b)) return false;
  return true;
}

Mask eval(const Program& p, std::vector<Mask>& scratch, const std::vector<Mask>& varMask,
          const std::vector<const std::vector<Mask>*>& cells, const std::vector<Mask>& ideal, Mask full) {
  using K = Formula::Kind;
  for (std::size_t j = 0; j < p.ops.size(); ++j) {
    const Op& op = p.ops[j];
    Mask r = 0;
    switch (op.kind) {
      case K::Atom: r = varMask[op.var]; break;
      case K::NegAtom: r = ~varMask[op.var] & full; break;
      case K::And: r = scratch[op.l] & scratch[op.r]; break;
      case K::Or: r = scratch[op.l] | scratch[op.r]; break;
      case K::Box: r = scratch[op.l] == full ? full : 0; break;
      case K::Dia: r = scratch[op.l] ? full : 0; break;
      case K::AgBox:
        for (Mask b : *cells[op.agentSlot])
          if ((b & ~scratch[op.l]) == 0) r |= b;
        break;
      case K::AgDia:
        for (Mask b : *cells[op.agentSlot])
          if (b & scratch[op.l]) r |= b;
        break;
      case K::Ought: r = (ideal[op.agentSlot] & ~scratch[op.l]) == 0 ? full : 0; break;
      case K::Perm: r = (ideal[op.agentSlot] & scratch[op.l]) ? full : 0; break;
    }
    scratch[j] = r;
  }
  return scratch.back();
}

DsModel build(const Program& p, int n, int k, std::size_t m, Mask full,
              const std::vector<const std::vector<Mask>*>& cells, const std::vector<Mask>& ideal,
              const std::vector<Mask>& varMask) {
  DsModel out;
  out.agents = n;
  out.choices = k;
  for (std::size_t w = 0; w < m; ++w) out.worlds.push_back(std::to_string(w));
  out.rel.resize(n);
  out.ideal.resize(n);
  for (AgentId i = 0; i < n; ++i) {
    int slot = -1;
    for (std::size_t j = 0; j < p.agents.size(); ++j)
      if (p.agents[j] == i) slot = static_cast<int>(j);
    std::vector<Mask> blocks = slot >= 0 ? *cells[slot] : std::vector<Mask>{full};
    for (Mask b : blocks)
      for (World a = 0; a < m; ++a)
        for (World c = 0; c < m; ++c)
          if ((b >> a & 1) && (b >> c & 1)) out.rel[i].insert({a, c});
    for (World w = 0; w < m; ++w)
      if (slot < 0 || !p.deontic[slot] || (ideal[slot] >> w & 1)) out.ideal[i].insert(w);
  }
  for (std::size_t j = 0; j < p.vars.size(); ++j) {
    auto& s = out.val[p.vars[j]];
    for (World w = 0; w < m; ++w)
      if (varMask[j] >> w & 1) s.insert(w);
  }
  return out;
}

}  // namespace

std::optional<DsModel> find_countermodel_bounded(const Formula& f, int n, int k, std::size_t maxWorlds) {
  if (n < 1) throw MalformedInput("agent count must be positive");
  check_agents(f, n);
  if (maxWorlds > 64) maxWorlds = 64;

  Program p;
  for (const auto& v : variables(f)) p.vars.push_back(v);
  auto deon = deontic_agents_of(f);
  for (AgentId i : agents_of(f)) {
    p.agents.push_back(i);
    p.deontic.push_back(deon.count(i) > 0);
  }
  std::map<Formula, int> memo;
  compile(f, p, memo);
  std::vector<Mask> scratch(p.ops.size());
  const std::size_t r = p.agents.size();
  const std::size_t nv = p.vars.size();

  for (std::size_t m = 1; m <= maxWorlds; ++m) {
    const Mask full = m == 64 ? ~Mask{0} : (Mask{1} << m) - 1;
    auto parts = partitions(m, k > 0 ? static_cast<std::size_t>(k) : m);
    std::vector<std::size_t> pick(r, 0);
    std::vector<const std::vector<Mask>*> cells(r);
    const std::size_t valBits = m * nv;
    if (valBits >= 63) throw InternalError("oracle bound too large for the formula's variables");
    const std::uint64_t valCount = std::uint64_t{1} << valBits;
    std::vector<Mask> varMask(nv);

    for (;;) {
      for (std::size_t j = 0; j < r; ++j) cells[j] = &parts[pick[j]];
      if (r < 2 || independent(cells, 0, full)) {
        // Ideal sets: non-empty unions of cells, only for deontic agents.
        std::vector<Mask> idealPick(r, 1);
        std::vector<Mask> ideal(r, full);
        for (;;) {
          for (std::size_t j = 0; j < r; ++j) {
            if (!p.deontic[j]) continue;
            Mask s = 0;
            for (std::size_t b = 0; b < cells[j]->size(); ++b)
              if (idealPick[j] >> b & 1) s |= (*cells[j])[b];
            ideal[j] = s;
          }
          for (std::uint64_t v = 0; v < valCount; ++v) {
            for (std::size_t q = 0; q < nv; ++q) {
              Mask mk = 0;
              for (std::size_t w = 0; w < m; ++w)
                if (v >> (w * nv + q) & 1) mk |= Mask{1} << w;
              varMask[q] = mk;
            }
            if ((eval(p, scratch, varMask, cells, ideal, full) & 1) == 0)
              return build(p, n, k, m, full, cells, ideal, varMask);
          }
          std::size_t j = 0;
          for (; j < r; ++j) {
            if (!p.deontic[j]) continue;
            Mask lim = Mask{1} << cells[j]->size();
            if (++idealPick[j] < lim) break;
            idealPick[j] = 1;
          }
          if (j == r) break;
        }
      }
      std::size_t j = 0;
      for (; j < r; ++j) {
        if (++pick[j] < parts.size()) break;
        pick[j] = 0;
      }
      if (j == r) break;
    }
  }
  return std::nullopt;
}

}  // namespace dstit
