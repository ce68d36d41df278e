#include "dstit/sequent.hpp"

#include <map>
#include <numeric>

namespace dstit {

const char* to_string(Origin o) {
  switch (o) {
    case Origin::Root: return "root";
    case Origin::ByBox: return "box";
    case Origin::ByOught: return "ought";
    case Origin::ByD2: return "d2";
    case Origin::ByAgBox: return "agbox";
    case Origin::ByAgBoxStar: return "agbox*";
    case Origin::ByIOA: return "ioa";
  }
  return "?";
}

std::set<Label> labels_of(const RelAtom& a) { return {a.from, a.to}; }

std::set<Label> labels_of(const Sequent& s) {
  std::set<Label> out;
  for (const auto& a : s.antecedent) {
    out.insert(a.from);
    out.insert(a.to);
  }
  for (const auto& lf : s.consequent) out.insert(lf.label);
  return out;
}

FormulaSet restrict(const Consequent& gamma, Label w) {
  FormulaSet out;
  for (const auto& lf : gamma)
    if (lf.label == w) out.insert(lf.formula);
  return out;
}

bool ri_path(const Antecedent& rels, AgentId i, Label w, Label u) {
  if (w == u) return true;
  std::map<Label, std::size_t> idx;
  auto index = [&](Label l) {
    auto [it, fresh] = idx.emplace(l, idx.size());
    return it->second;
  };
  index(w);
  index(u);
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (const auto& a : rels)
    if (a.is_choice() && a.agent == i) edges.emplace_back(index(a.from), index(a.to));
  UnionFind uf(idx.size());
  for (auto [a, b] : edges) uf.unite(a, b);
  return uf.same(idx[w], idx[u]);
}

std::string label_name(Label l) { return "w" + std::to_string(l); }

std::string to_string(const RelAtom& a) {
  if (a.is_choice())
    return "R[" + std::to_string(a.agent) + "] " + label_name(a.from) + " " + label_name(a.to);
  return "I[" + std::to_string(a.agent) + "] " + label_name(a.from);
}

std::string to_string(const Labelled& lf) { return label_name(lf.label) + " : " + to_string(lf.formula); }

std::string to_string(const Sequent& s) {
  std::string out;
  bool first = true;
  for (const auto& a : s.antecedent) {
    out += first ? "" : ", ";
    out += to_string(a);
    first = false;
  }
  out += first ? "=> " : " => ";
  first = true;
  for (const auto& lf : s.consequent) {
    out += first ? "" : ", ";
    out += to_string(lf);
    first = false;
  }
  return out;
}

void UnionFind::resize(std::size_t n) {
  std::size_t old = parent_.size();
  parent_.resize(n);
  rank_.resize(n, 0);
  for (std::size_t i = old; i < n; ++i) parent_[i] = i;
}

std::size_t UnionFind::find(std::size_t x) {
  while (parent_[x] != x) {
    parent_[x] = parent_[parent_[x]];
    x = parent_[x];
  }
  return x;
}

bool UnionFind::unite(std::size_t a, std::size_t b) {
  a = find(a);
  b = find(b);
  if (a == b) return false;
  if (rank_[a] < rank_[b]) std::swap(a, b);
  parent_[b] = a;
  if (rank_[a] == rank_[b]) ++rank_[a];
  return true;
}

}  // namespace dstit
