#include "dstit/certificate.hpp"

#include <cctype>
#include <map>

#include <json.hpp>

#include "dstit/errors.hpp"

namespace dstit {

using nlohmann::json;

namespace {

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

// Labels are printed as w<n>; other names read from files get ids from a separate range.
class LabelTable {
public:
  Label get(const std::string& name) {
    if (name.size() > 1 && name[0] == 'w' && name.size() < 10) {
      bool digits = true;
      for (std::size_t j = 1; j < name.size(); ++j) digits = digits && std::isdigit(static_cast<unsigned char>(name[j]));
      if (digits && (name.size() == 2 || name[1] != '0')) return static_cast<Label>(std::stoul(name.substr(1)));
    }
    if (name.empty()) throw MalformedInput("empty label");
    for (char ch : name)
      if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '_') throw MalformedInput("bad label: " + name);
    auto [it, fresh] = other_.emplace(name, kOtherBase + static_cast<Label>(other_.size()));
    return it->second;
  }

private:
  static constexpr Label kOtherBase = 1u << 30;
  std::map<std::string, Label> other_;
};

LabelTable& table() {
  thread_local LabelTable t;
  return t;
}

int read_agent_index(std::string_view s, std::size_t& pos, int agents) {
  // expects "[<nat>]" at pos
  if (pos >= s.size() || s[pos] != '[') throw MalformedInput("expected '[' in relational atom");
  std::size_t close = s.find(']', pos);
  if (close == std::string_view::npos) throw MalformedInput("expected ']' in relational atom");
  std::string num = trim(s.substr(pos + 1, close - pos - 1));
  if (num.empty()) throw MalformedInput("missing agent index");
  for (char ch : num)
    if (!std::isdigit(static_cast<unsigned char>(ch))) throw MalformedInput("bad agent index: " + num);
  int i = num.size() > 6 ? agents : std::stoi(num);
  if (i >= agents) throw AgentRangeError(i, agents);
  pos = close + 1;
  return i;
}

std::vector<std::string> words(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (std::isspace(static_cast<unsigned char>(ch))) {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

json rule_json(const RuleApp& r) {
  json j;
  j["name"] = to_string(r.name);
  if (r.agent >= 0) j["agent"] = r.agent;
  if (!r.labels.empty()) {
    j["labels"] = json::array();
    for (Label l : r.labels) j["labels"].push_back(label_name(l));
  }
  if (r.formula) j["formula"] = to_string(*r.formula);
  if (!r.fresh.empty()) {
    j["fresh"] = json::array();
    for (Label l : r.fresh) j["fresh"].push_back(label_name(l));
  }
  if (!r.tuples.empty()) {
    j["tuples"] = json::array();
    for (const auto& t : r.tuples) {
      json a = json::array();
      for (Label l : t) a.push_back(label_name(l));
      j["tuples"].push_back(a);
    }
  }
  return j;
}

json node_json(const Derivation& d) {
  json j;
  json ant = json::array(), con = json::array();
  for (const auto& a : d.conclusion.antecedent) ant.push_back(to_string(a));
  for (const auto& lf : d.conclusion.consequent) con.push_back(to_string(lf));
  j["sequent"] = {{"antecedent", ant}, {"consequent", con}};
  j["rule"] = rule_json(d.rule);
  j["premises"] = json::array();
  for (const auto& p : d.premises) j["premises"].push_back(node_json(p));
  return j;
}

const json& field(const json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) throw MalformedInput(std::string("missing field '") + name + "'");
  return j.at(name);
}

std::vector<Label> label_list(const json& j) {
  if (!j.is_array()) throw MalformedInput("label list expected");
  std::vector<Label> out;
  for (const auto& x : j) {
    if (!x.is_string()) throw MalformedInput("label must be a string");
    out.push_back(table().get(x.get<std::string>()));
  }
  return out;
}

RuleApp rule_from(const json& j, int agents) {
  RuleApp r;
  const json& name = field(j, "name");
  if (!name.is_string()) throw MalformedInput("rule name must be a string");
  auto rn = rule_from_string(name.get<std::string>());
  if (!rn) throw MalformedInput("unknown rule '" + name.get<std::string>() + "'");
  r.name = *rn;
  if (j.contains("agent")) {
    if (!j["agent"].is_number_integer()) throw MalformedInput("agent must be an integer");
    r.agent = j["agent"].get<int>();
  }
  if (j.contains("labels")) r.labels = label_list(j["labels"]);
  if (j.contains("formula")) {
    if (!j["formula"].is_string()) throw MalformedInput("formula must be a string");
    r.formula = parse(j["formula"].get<std::string>(), agents, {true});
  }
  if (j.contains("fresh")) r.fresh = label_list(j["fresh"]);
  if (j.contains("tuples")) {
    if (!j["tuples"].is_array()) throw MalformedInput("tuples must be an array");
    for (const auto& t : j["tuples"]) r.tuples.push_back(label_list(t));
  }
  return r;
}

Derivation node_from(const json& j, int agents) {
  Derivation d;
  const json& seq = field(j, "sequent");
  const json& ant = field(seq, "antecedent");
  const json& con = field(seq, "consequent");
  if (!ant.is_array() || !con.is_array()) throw MalformedInput("sequent parts must be arrays");
  for (const auto& a : ant) {
    if (!a.is_string()) throw MalformedInput("relational atom must be a string");
    d.conclusion.antecedent.insert(parse_rel_atom(a.get<std::string>(), agents));
  }
  for (const auto& c : con) {
    if (!c.is_string()) throw MalformedInput("labelled formula must be a string");
    d.conclusion.consequent.insert(parse_labelled(c.get<std::string>(), agents));
  }
  d.rule = rule_from(field(j, "rule"), agents);
  const json& ps = field(j, "premises");
  if (!ps.is_array()) throw MalformedInput("premises must be an array");
  for (const auto& p : ps) d.premises.push_back(node_from(p, agents));
  return d;
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw MalformedInput(std::string("invalid JSON: ") + e.what());
  }
}

int nat_field(const json& j, const char* name, int min) {
  const json& x = field(j, name);
  if (!x.is_number_integer() || x.get<long long>() < min || x.get<long long>() > 1000000)
    throw MalformedInput(std::string("field '") + name + "' must be an integer >= " + std::to_string(min));
  return x.get<int>();
}

}  // namespace

RelAtom parse_rel_atom(std::string_view text, int agents) {
  std::string s = trim(text);
  if (s.size() < 2 || (s[0] != 'R' && s[0] != 'I')) throw MalformedInput("bad relational atom: " + s);
  std::size_t pos = 1;
  int i = read_agent_index(s, pos, agents);
  auto ws = words(std::string_view(s).substr(pos));
  if (s[0] == 'R') {
    if (ws.size() != 2) throw MalformedInput("bad relational atom: " + s);
    return RelAtom::choice(i, table().get(ws[0]), table().get(ws[1]));
  }
  if (ws.size() != 1) throw MalformedInput("bad ideal atom: " + s);
  return RelAtom::ideal(i, table().get(ws[0]));
}

Labelled parse_labelled(std::string_view text, int agents) {
  auto colon = text.find(':');
  if (colon == std::string_view::npos) throw MalformedInput("labelled formula needs ':'");
  Label l = table().get(trim(text.substr(0, colon)));
  return {l, parse(text.substr(colon + 1), agents, {true})};
}

std::string proof_to_json(const ProofFile& pf, int indent) {
  json j;
  j["format"] = "dstit-proof/1";
  j["agents"] = pf.agents;
  j["choices"] = pf.choices;
  if (pf.goal) j["goal"] = to_string(*pf.goal);
  j["root"] = node_json(pf.proof);
  return j.dump(indent) + "\n";
}

ProofFile proof_from_json(std::string_view text) {
  json j = parse_json(text);
  if (!j.is_object()) throw MalformedInput("proof file must be an object");
  if (j.contains("format") && j["format"] != "dstit-proof/1") throw MalformedInput("unsupported proof format");
  ProofFile pf;
  pf.agents = nat_field(j, "agents", 1);
  pf.choices = nat_field(j, "choices", 0);
  if (j.contains("goal")) {
    if (!j["goal"].is_string()) throw MalformedInput("goal must be a string");
    pf.goal = parse(j["goal"].get<std::string>(), pf.agents, {true});
  }
  pf.proof = node_from(field(j, "root"), pf.agents);
  return pf;
}

std::string model_to_json(const ModelFile& mf, int indent) {
  const DsModel& m = mf.model;
  json j;
  j["agents"] = m.agents;
  j["choices"] = m.choices;
  j["worlds"] = m.worlds;
  j["rel"] = json::array();
  for (const auto& r : m.rel) {
    json a = json::array();
    for (auto [x, y] : r) a.push_back({m.worlds[x], m.worlds[y]});
    j["rel"].push_back(a);
  }
  j["ideal"] = json::array();
  for (const auto& s : m.ideal) {
    json a = json::array();
    for (World w : s) a.push_back(m.worlds[w]);
    j["ideal"].push_back(a);
  }
  j["val"] = json::object();
  for (const auto& [p, s] : m.val) {
    json a = json::array();
    for (World w : s) a.push_back(m.worlds[w]);
    j["val"][p] = a;
  }
  if (mf.root) j["root"] = *mf.root;
  return j.dump(indent) + "\n";
}

ModelFile model_from_json(std::string_view text) {
  json j = parse_json(text);
  if (!j.is_object()) throw MalformedInput("model file must be an object");
  ModelFile mf;
  DsModel& m = mf.model;
  m.agents = nat_field(j, "agents", 1);
  m.choices = nat_field(j, "choices", 0);
  const json& ws = field(j, "worlds");
  if (!ws.is_array() || ws.empty()) throw MalformedInput("worlds must be a non-empty array");
  std::map<std::string, World> idx;
  for (const auto& w : ws) {
    if (!w.is_string()) throw MalformedInput("world identifiers must be strings");
    std::string name = w.get<std::string>();
    if (!idx.emplace(name, m.worlds.size()).second) throw MalformedInput("duplicate world " + name);
    m.worlds.push_back(name);
  }
  auto world = [&](const json& w) {
    if (!w.is_string()) throw MalformedInput("world identifiers must be strings");
    auto it = idx.find(w.get<std::string>());
    if (it == idx.end()) throw MalformedInput("unknown world " + w.get<std::string>());
    return it->second;
  };
  const json& rel = field(j, "rel");
  const json& ideal = field(j, "ideal");
  if (!rel.is_array() || rel.size() != static_cast<std::size_t>(m.agents))
    throw MalformedInput("rel must list one relation per agent");
  if (!ideal.is_array() || ideal.size() != static_cast<std::size_t>(m.agents))
    throw MalformedInput("ideal must list one set per agent");
  for (const auto& r : rel) {
    if (!r.is_array()) throw MalformedInput("relation must be an array of pairs");
    auto& out = m.rel.emplace_back();
    for (const auto& pr : r) {
      if (!pr.is_array() || pr.size() != 2) throw MalformedInput("relation entries must be pairs");
      out.insert({world(pr[0]), world(pr[1])});
    }
  }
  for (const auto& s : ideal) {
    if (!s.is_array()) throw MalformedInput("ideal set must be an array");
    auto& out = m.ideal.emplace_back();
    for (const auto& w : s) out.insert(world(w));
  }
  if (j.contains("val")) {
    if (!j["val"].is_object()) throw MalformedInput("val must be an object");
    for (const auto& [p, s] : j["val"].items()) {
      if (!s.is_array()) throw MalformedInput("valuation of " + p + " must be an array");
      auto& out = m.val[p];
      for (const auto& w : s) out.insert(world(w));
    }
  }
  if (j.contains("root")) {
    world(j["root"]);
    mf.root = j["root"].get<std::string>();
  }
  return mf;
}

}  // namespace dstit
