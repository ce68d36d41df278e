#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "dstit/search.hpp"
#include "dstit/syntax.hpp"

namespace dstit {

struct KnowledgeBase {
  std::vector<Formula> norms;
  std::vector<Formula> facts;
  int agents = 1;
  int choices = 0;
};

// Line format: `agents: N`, `choices: K`, `norm: <formula>`, `fact: <formula>`, `# comment`.
// Header lines may appear anywhere; formulas are parsed once the agent count is known.
KnowledgeBase parse_kb(std::string_view text);
KnowledgeBase load_kb(const std::string& path);

// Norms then facts, left-folded; the empty base gives top().
Formula kb_conjunction(const KnowledgeBase& kb);

struct TaskVerdict {
  bool answer = false;
  Formula question;  // the formula whose validity was decided
  Verdict verdict;   // proof when question is valid, counter-model otherwise
};

// answer: the duty is implied (question valid).
TaskVerdict duty_check(const KnowledgeBase& kb, AgentId i, const Formula& goal, const ProveOptions& opts = {});
// answer: compliant (no implied contrary duty, question invalid).
TaskVerdict compliance_check(const KnowledgeBase& kb, AgentId i, const Formula& act, const ProveOptions& opts = {});
// answer: jointly fulfillable (question invalid).
TaskVerdict joint_fulfillment_check(const KnowledgeBase& kb, const ProveOptions& opts = {});

}  // namespace dstit
