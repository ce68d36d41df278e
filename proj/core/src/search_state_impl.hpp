#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

#include <boost/dynamic_bitset.hpp>

#include "dstit/search.hpp"

namespace dstit {

using Bits = boost::dynamic_bitset<std::uint64_t>;

// Dense label indices (creation order) map to printable names. Formula ids follow
// structural order for the initial universe; formulas interned later are appended.
struct SearchState::Impl {
  int n = 1;
  int k = 0;

  std::vector<Formula> forms;
  std::unordered_map<Formula, int> fid;
  std::vector<int> neg, lhs, rhs;
  std::vector<Formula::Kind> fkind;
  std::vector<int> fagent;

  std::vector<Label> name;
  std::unordered_map<Label, int> idx;
  std::vector<Origin> origin;
  std::vector<int> parent;               // -1 for the root and IOA labels
  std::vector<std::vector<int>> tuple;   // IOA labels: one label per agent
  std::vector<Bits> gamma;               // per label, over formula ids
  std::vector<std::vector<Bits>> rel;    // rel[i][w]: u with R_[i] w u
  std::vector<Bits> ideal;               // ideal[i]: labels with I_[i]

  std::map<int, std::size_t> boxFired;
  std::map<int, std::size_t> oughtFired;
  std::vector<std::size_t> d2Fired;
  std::vector<int> agboxAgents;

  std::optional<std::pair<int, int>> clash;  // (label, formula id) with the negation also present

  // Undo log: every change made through the mutators below, so a branch can roll back.
  struct Change {
    enum class Kind { Choice, Ideal, Formula, Label, Box, Ought, D2, AgBox } kind;
    int a = 0, b = 0, c = 0;
  };
  std::vector<Change> trail;
  // Bumped whenever labels or choice atoms change, including by undo; never repeats.
  std::size_t relVersion = 0;

  Impl(int agents, int choices);

  std::size_t size() const { return name.size(); }
  int index_of(Label l) const;
  int intern(const Formula& f);
  void intern_all(const Formula& f);  // subterms in structural order

  int new_label(Label nm, Origin o, int par, std::vector<int> tup);
  bool add_choice(int i, int w, int u);
  bool add_ideal(int i, int w);
  bool add_formula(int w, int f);
  std::size_t fire_box(int f);
  std::size_t fire_ought(int f);
  std::size_t fire_d2(AgentId i);
  void note_agbox(AgentId i);
  std::size_t mark() const { return trail.size(); }
  void undo_to(std::size_t m);
  bool has(int w, int f) const { return gamma[w].test(static_cast<std::size_t>(f)); }

  std::vector<BlockStatus> blocking(bool loopCheck) const;
  // Labels that act as worlds: unblocked, and for IOA labels every tuple member unblocked too.
  std::vector<bool> live(const std::vector<BlockStatus>& blk) const;
  bool in_gen_tree(int w) const { return origin[w] != Origin::ByIOA; }

  // Saturation, with the blocking statuses supplied by the caller.
  std::string unsaturated(const std::vector<BlockStatus>& blk) const;
  // Tuples range over unblocked non-IOA labels; only live IOA labels cover them.
  bool ioa_satisfied(const std::vector<BlockStatus>& blk) const;
  std::vector<std::vector<int>> unsatisfied_ioa_tuples(const std::vector<BlockStatus>& blk) const;

  Sequent materialize() const;
  std::pair<DsModel, World> stability_model(const std::vector<BlockStatus>& blk) const;
};

}  // namespace dstit
