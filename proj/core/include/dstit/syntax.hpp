#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <set>
#include <string>
#include <string_view>

namespace dstit {

using AgentId = int;

// Immutable formula in negation normal form. Copies share structure.
class Formula {
public:
  enum class Kind : std::uint8_t { Atom, NegAtom, And, Or, Box, Dia, AgBox, AgDia, Ought, Perm };

  static Formula atom(std::string name);
  static Formula neg_atom(std::string name);
  static Formula conj(Formula l, Formula r);
  static Formula disj(Formula l, Formula r);
  static Formula box(Formula f);
  static Formula dia(Formula f);
  static Formula agbox(AgentId i, Formula f);
  static Formula agdia(AgentId i, Formula f);
  static Formula ought(AgentId i, Formula f);
  static Formula perm(AgentId i, Formula f);

  Kind kind() const { return node_->kind; }
  const std::string& name() const { return node_->name; }
  AgentId agent() const { return node_->agent; }
  const Formula& left() const { return *node_->l; }
  const Formula& right() const { return *node_->r; }
  const Formula& body() const { return *node_->l; }

  bool is_literal() const { return kind() == Kind::Atom || kind() == Kind::NegAtom; }
  bool is_binary() const { return kind() == Kind::And || kind() == Kind::Or; }
  bool is_agentive() const { return kind() >= Kind::AgBox; }
  std::size_t hash() const { return node_->hash; }
  std::size_t size() const { return node_->size; }

  friend bool operator==(const Formula& a, const Formula& b);
  friend std::strong_ordering operator<=>(const Formula& a, const Formula& b);

private:
  struct Node {
    Kind kind;
    AgentId agent = -1;
    std::string name;
    std::shared_ptr<const Formula> l, r;
    std::size_t hash = 0;
    std::size_t size = 0;
  };
  explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  static Formula make(Kind k, AgentId i, std::string name, const Formula* l, const Formula* r);

  std::shared_ptr<const Node> node_;
};

using FormulaSet = std::set<Formula>;

Formula negate(const Formula& f);
Formula implies(const Formula& a, const Formula& b);
Formula iff(const Formula& a, const Formula& b);
Formula top();
Formula bottom();

// sufo: binary connectives contribute their operands only.
FormulaSet subformulae(const Formula& f);
// Every node of the tree, binary ones included.
FormulaSet subterms(const Formula& f);
std::size_t complexity(const Formula& f);
std::set<std::string> variables(const Formula& f);
std::set<AgentId> agents_of(const Formula& f);
// Agents that occur under O[i] or P[i].
std::set<AgentId> deontic_agents_of(const Formula& f);
AgentId max_agent(const Formula& f);  // -1 when agent-free

std::string to_string(const Formula& f);

struct ParseOptions {
  // Accept identifiers starting with '_' (needed to read back certificates mentioning `_t`).
  bool allowReserved = false;
};

Formula parse(std::string_view text, int agentCount, ParseOptions opts = {});

// Throws AgentRangeError when an index is >= agentCount.
void check_agents(const Formula& f, int agentCount);

inline constexpr const char* kTopVariable = "_t";

}  // namespace dstit

template <>
struct std::hash<dstit::Formula> {
  std::size_t operator()(const dstit::Formula& f) const noexcept { return f.hash(); }
};
