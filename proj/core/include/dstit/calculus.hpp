#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "dstit/sequent.hpp"
#include "dstit/syntax.hpp"

namespace dstit {

enum class RuleName {
  Id, GenId, And, Or, Box, Dia, AgBox, AgDia, Ought, Perm,
  Ref, Euc, D2, D3, IOA, APC,
  Sym, Tra, BoxStar, OughtStar, AgBoxStar, AgDiaStar,
  Wk, Sub, IoaOpMacro
};

const char* to_string(RuleName r);
std::optional<RuleName> rule_from_string(std::string_view s);
bool rule_has_agent(RuleName r);

// Instantiation data of one rule application. Meaning of `labels` per rule:
//   Id, GenId, And, Or, Box, AgBox, Ought: [w] (the principal label)
//   Dia, AgDia, Perm: [w, u] (principal label, target label)
//   Ref: [w]; Euc: [w, u, v] (R wu, R wv give R uv); D3: [w, u]
//   Sym: [w, u]; Tra: [w, u, v] (R wu, R uv give R wv)
//   IOA: [w_0 .. w_{n-1}]; APC: [w_0 .. w_k]
//   BoxStar, OughtStar: [u, w] (u:phi in the conclusion becomes w:phi in the premise)
//   AgBoxStar, AgDiaStar: [w, u] (the principal atom R wu)
//   Sub: [u, w] (the conclusion is the premise with u renamed to w)
// `fresh` holds eigenvariables; `tuples` the agent tuples of an IoaOpMacro step.
struct RuleApp {
  RuleName name = RuleName::Id;
  AgentId agent = -1;
  std::vector<Label> labels;
  std::optional<Formula> formula;
  std::vector<Label> fresh;
  std::vector<std::vector<Label>> tuples;
};

struct Derivation {
  Sequent conclusion;
  RuleApp rule;
  std::vector<Derivation> premises;
};

struct CheckOptions {
  int agents = 1;
  int choices = 0;
  // Reject GenId leaves on non-literal formulas.
  bool atomicLeaves = false;
};

struct CheckResult {
  bool ok = true;
  std::string message;
  std::vector<std::size_t> path;  // premise indices from the root to the failing node

  explicit operator bool() const { return ok; }
};

CheckResult check_step(const Sequent& conclusion, const RuleApp& rule, const std::vector<Sequent>& premises,
                       const CheckOptions& opts);
CheckResult check_derivation(const Derivation& d, const Sequent& claimedRoot, const CheckOptions& opts);

std::size_t derivation_size(const Derivation& d);
std::size_t derivation_height(const Derivation& d);
std::set<RuleName> rules_used(const Derivation& d);

// Initial sequent of a proof search: empty antecedent, the formula at w0.
Sequent goal_sequent(const Formula& f, Label root = 0);

}  // namespace dstit
