#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dstit/sequent.hpp"
#include "dstit/syntax.hpp"

namespace dstit {

using World = std::size_t;

struct DsModel {
  int agents = 1;
  int choices = 0;  // 0: unlimited
  std::vector<std::string> worlds;
  std::vector<std::set<std::pair<World, World>>> rel;  // one relation per agent
  std::vector<std::set<World>> ideal;                  // one ideal set per agent
  std::map<std::string, std::set<World>> val;

  std::size_t size() const { return worlds.size(); }
  World world(std::string_view name) const;  // throws UnknownWorld
  bool related(AgentId i, World w, World u) const { return rel[i].count({w, u}) > 0; }
};

struct ConditionResult {
  bool ok = true;
  std::string witness;
};

struct ConditionReport {
  ConditionResult c1, c2, c3, d1, d2, d3;
  bool ok() const { return c1.ok && c2.ok && c3.ok && d1.ok && d2.ok && d3.ok; }
  std::string summary() const;
};

// Throws MalformedInput when a relation or ideal set mentions an unknown world.
ConditionReport validate_frame(const DsModel& m);

// Worlds at which f holds.
std::vector<bool> truth_set(const DsModel& m, const Formula& f);
bool satisfies(const DsModel& m, World w, const Formula& f);
bool satisfies(const DsModel& m, std::string_view w, const Formula& f);
bool valid_on_model(const DsModel& m, const Formula& f);

using Interpretation = std::map<Label, World>;
bool satisfies_sequent(const DsModel& m, const Interpretation& itp, const Sequent& s);

// Exhaustive search over models with at most maxWorlds worlds for one falsifying f at world 0.
std::optional<DsModel> find_countermodel_bounded(const Formula& f, int n, int k, std::size_t maxWorlds);

std::string to_dot(const DsModel& m);

}  // namespace dstit
