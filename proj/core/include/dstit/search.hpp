#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dstit/calculus.hpp"
#include "dstit/semantics.hpp"
#include "dstit/sequent.hpp"
#include "dstit/syntax.hpp"

namespace dstit {

struct GenerationTree {
  Label root = 0;
  std::set<Label> vertices;
  std::set<std::pair<Label, Label>> edges;  // (parent, child)
};

struct BlockStatus {
  enum class Kind { Unblocked, DirectlyBlocked, IndirectlyBlocked };
  Kind kind = Kind::Unblocked;
  Label via = 0;  // loop ancestor, or the directly blocked ancestor for indirect blocking

  bool blocked() const { return kind != Kind::Unblocked; }
};

// A thread's top sequent together with its generation tree and IOA bookkeeping.
class SearchState {
public:
  SearchState(int agents, int choices);
  SearchState(const SearchState& other);
  SearchState& operator=(const SearchState& other);
  SearchState(SearchState&&) noexcept;
  SearchState& operator=(SearchState&&) noexcept;
  ~SearchState();

  // The start of every search: => w0 : phi.
  static SearchState initial(const Formula& phi, int agents, int choices);

  // Manual construction, mainly for tests. The first label added is the root.
  // IOA labels take their tuple (one label per agent) instead of a parent.
  Label add_label(Label name, Origin origin, std::optional<Label> parent = std::nullopt,
                  std::vector<Label> ioaTuple = {});
  void add_atom(const RelAtom& a);
  void add_formula(Label w, const Formula& f);

  int agents() const;
  int choices() const;
  Label root() const;
  std::vector<Label> labels() const;  // creation order
  Origin origin(Label l) const;
  std::set<Label> ioa_labels() const;
  Sequent sequent() const;
  GenerationTree generation_tree() const;

  BlockStatus block_status(Label u) const;
  bool is_stable() const;
  // Names the first violated saturation condition, empty when stable.
  std::string unsaturated_condition() const;
  bool ioa_satisfied() const;
  // Adds one fresh IOA label per unsatisfied tuple; returns the tuples and the new labels.
  std::pair<std::vector<std::vector<Label>>, std::vector<Label>> ioa_op(Label firstFreshName);
  std::pair<DsModel, World> extract_stability_model() const;

  struct Impl;
  Impl& impl() { return *impl_; }
  const Impl& impl() const { return *impl_; }

private:
  std::unique_ptr<Impl> impl_;
};

struct ProveOptions {
  std::size_t labelCap = 10000;
  bool loopCheck = true;
  std::size_t budget = 0;  // steps; 0 means unlimited
  bool prune = true;
  bool expandGenId = false;
  bool expandIoa = false;
  // Re-verify generation-tree shape after every step and IOA-satisfaction after every IoaOp;
  // a violation throws InternalError.
  bool checkInvariants = false;
  std::function<void(const std::string&)> trace;
};

struct SearchStats {
  std::size_t steps = 0;
  std::size_t leaves = 0;
  std::size_t maxLabels = 0;
  std::size_t maxBoxFirings = 0;    // per target formula within one thread
  std::size_t maxOughtFirings = 0;  // per target formula within one thread
  std::size_t maxD2Firings = 0;     // per agent within one thread
  std::size_t modelWorlds = 0;
};

struct Verdict {
  bool valid = false;
  std::optional<Derivation> proof;
  std::optional<DsModel> model;
  World root = 0;
  SearchStats stats;
};

Verdict prove(const Formula& phi, int agents, int choices, const ProveOptions& opts = {});

// Post-processing of derivations; each result checks whenever the input does.
Derivation prune_derivation(const Derivation& d);
Derivation expand_genid(const Derivation& d, Label firstFreshName);
Derivation expand_ioa(const Derivation& d);

}  // namespace dstit
