#include "dstit/tasks.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>

#include "dstit/errors.hpp"

namespace dstit {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

int parse_nat(std::string_view s, std::size_t line) {
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || v < 0)
    throw MalformedInput("line " + std::to_string(line) + ": expected a natural number");
  return v;
}

struct Line {
  std::size_t no;
  std::string_view key, value;
};

}  // namespace

KnowledgeBase parse_kb(std::string_view text) {
  std::vector<Line> lines;
  std::size_t no = 0;
  while (!text.empty()) {
    auto nl = text.find('\n');
    std::string_view raw = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++no;
    std::string_view s = trim(raw);
    if (s.empty() || s.front() == '#') continue;
    auto colon = s.find(':');
    if (colon == std::string_view::npos) throw MalformedInput("line " + std::to_string(no) + ": missing ':'");
    lines.push_back({no, trim(s.substr(0, colon)), trim(s.substr(colon + 1))});
  }
  KnowledgeBase kb;
  for (const auto& l : lines) {
    if (l.key == "agents") {
      kb.agents = parse_nat(l.value, l.no);
      if (kb.agents < 1) throw MalformedInput("line " + std::to_string(l.no) + ": agent count must be positive");
    } else if (l.key == "choices") {
      kb.choices = parse_nat(l.value, l.no);
    } else if (l.key != "norm" && l.key != "fact") {
      throw MalformedInput("line " + std::to_string(l.no) + ": unknown key '" + std::string(l.key) + "'");
    }
  }
  for (const auto& l : lines) {
    if (l.key != "norm" && l.key != "fact") continue;
    Formula f = [&] {
      try {
        return parse(l.value, kb.agents);
      } catch (const ParseError& e) {
        throw MalformedInput("line " + std::to_string(l.no) + ": " + e.what());
      }
    }();
    (l.key == "norm" ? kb.norms : kb.facts).push_back(std::move(f));
  }
  return kb;
}

KnowledgeBase load_kb(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MalformedInput("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_kb(ss.str());
}

Formula kb_conjunction(const KnowledgeBase& kb) {
  std::optional<Formula> acc;
  for (const auto* part : {&kb.norms, &kb.facts})
    for (const auto& f : *part) acc = acc ? Formula::conj(*acc, f) : f;
  return acc ? *acc : top();
}

TaskVerdict duty_check(const KnowledgeBase& kb, AgentId i, const Formula& goal, const ProveOptions& opts) {
  if (i < 0 || i >= kb.agents) throw AgentRangeError(i, kb.agents);
  check_agents(goal, kb.agents);
  Formula q = implies(kb_conjunction(kb), Formula::ought(i, goal));
  Verdict v = prove(q, kb.agents, kb.choices, opts);
  bool a = v.valid;
  return {a, q, std::move(v)};
}

TaskVerdict compliance_check(const KnowledgeBase& kb, AgentId i, const Formula& act, const ProveOptions& opts) {
  if (i < 0 || i >= kb.agents) throw AgentRangeError(i, kb.agents);
  check_agents(act, kb.agents);
  Formula q = implies(kb_conjunction(kb), Formula::ought(i, negate(act)));
  Verdict v = prove(q, kb.agents, kb.choices, opts);
  bool a = !v.valid;
  return {a, q, std::move(v)};
}

TaskVerdict joint_fulfillment_check(const KnowledgeBase& kb, const ProveOptions& opts) {
  Formula q = implies(kb_conjunction(kb), bottom());
  Verdict v = prove(q, kb.agents, kb.choices, opts);
  bool a = !v.valid;
  return {a, q, std::move(v)};
}

}  // namespace dstit
