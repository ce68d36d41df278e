#pragma once

#include <compare>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "dstit/syntax.hpp"

namespace dstit {

using Label = std::uint32_t;

// Which rule introduced a label during search.
enum class Origin : std::uint8_t { Root, ByBox, ByOught, ByD2, ByAgBox, ByAgBoxStar, ByIOA };

const char* to_string(Origin o);

struct RelAtom {
  enum class Kind : std::uint8_t { Choice, Ideal };
  Kind kind = Kind::Choice;
  AgentId agent = 0;
  Label from = 0;
  Label to = 0;  // equals `from` for Ideal atoms

  static RelAtom choice(AgentId i, Label w, Label u) { return {Kind::Choice, i, w, u}; }
  static RelAtom ideal(AgentId i, Label w) { return {Kind::Ideal, i, w, w}; }
  bool is_choice() const { return kind == Kind::Choice; }

  friend auto operator<=>(const RelAtom&, const RelAtom&) = default;
};

struct Labelled {
  Label label = 0;
  Formula formula = Formula::atom("p");

  friend bool operator==(const Labelled&, const Labelled&) = default;
  friend std::strong_ordering operator<=>(const Labelled& a, const Labelled& b) {
    if (auto c = a.label <=> b.label; c != 0) return c;
    return a.formula <=> b.formula;
  }
};

using Antecedent = std::set<RelAtom>;
using Consequent = std::set<Labelled>;

struct Sequent {
  Antecedent antecedent;
  Consequent consequent;

  friend bool operator==(const Sequent&, const Sequent&) = default;
};

std::set<Label> labels_of(const RelAtom& a);
std::set<Label> labels_of(const Sequent& s);
FormulaSet restrict(const Consequent& gamma, Label w);
bool ri_path(const Antecedent& rels, AgentId i, Label w, Label u);

std::string label_name(Label l);
std::string to_string(const RelAtom& a);
std::string to_string(const Labelled& lf);
std::string to_string(const Sequent& s);

// Disjoint sets over dense label indices.
class UnionFind {
public:
  explicit UnionFind(std::size_t n = 0) { resize(n); }
  void resize(std::size_t n);
  std::size_t find(std::size_t x);
  bool unite(std::size_t a, std::size_t b);
  bool same(std::size_t a, std::size_t b) { return find(a) == find(b); }
  std::size_t size() const { return parent_.size(); }

private:
  std::vector<std::size_t> parent_;
  std::vector<std::uint8_t> rank_;
};

}  // namespace dstit
