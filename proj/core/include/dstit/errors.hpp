#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace dstit {

class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& msg, std::size_t pos)
      : std::runtime_error("parse error at " + std::to_string(pos) + ": " + msg), pos_(pos) {}
  std::size_t position() const { return pos_; }

private:
  std::size_t pos_;
};

class AgentRangeError : public std::runtime_error {
public:
  AgentRangeError(int agent, int agentCount)
      : std::runtime_error("agent index " + std::to_string(agent) + " out of range (agents: " +
                           std::to_string(agentCount) + ")"),
        agent_(agent) {}
  int agent() const { return agent_; }

private:
  int agent_;
};

// Input files that are syntactically fine but structurally wrong.
class MalformedInput : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class UnknownWorld : public std::runtime_error {
public:
  explicit UnknownWorld(const std::string& w) : std::runtime_error("unknown world: " + w) {}
};

class IncompleteInterpretation : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class InstabilityError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Bugs and tripwires: label cap, oracle disagreement, broken invariants.
class InternalError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

class BudgetExhausted : public std::runtime_error {
public:
  BudgetExhausted(std::size_t steps, std::vector<int> agboxAgents, std::size_t labels)
      : std::runtime_error("step budget exhausted after " + std::to_string(steps) + " steps"),
        steps_(steps), agboxAgents_(std::move(agboxAgents)), labels_(labels) {}
  std::size_t steps() const { return steps_; }
  // Agents of the [i]-expansions along the thread that was running out of budget.
  const std::vector<int>& agbox_agents() const { return agboxAgents_; }
  std::size_t labels() const { return labels_; }

private:
  std::size_t steps_;
  std::vector<int> agboxAgents_;
  std::size_t labels_;
};

}  // namespace dstit
