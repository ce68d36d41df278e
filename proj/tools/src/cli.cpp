#include "cli.hpp"

#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "dstit/certificate.hpp"
#include "dstit/errors.hpp"
#include "dstit/search.hpp"
#include "dstit/semantics.hpp"
#include "dstit/tasks.hpp"

namespace dstit::cli {

namespace {

using json = nlohmann::ordered_json;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MalformedInput("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw MalformedInput("cannot write " + path);
  out << text;
}

ProveOptions prove_options(const RunConfig& cfg, std::ostream& err) {
  ProveOptions o;
  o.labelCap = cfg.labelCap;
  o.loopCheck = cfg.loopCheck;
  o.budget = cfg.budget;
  o.prune = !cfg.rawProof;
  o.expandGenId = cfg.expandGenId;
  o.expandIoa = cfg.expandIoa;
  if (cfg.trace) o.trace = [&err](const std::string& line) { err << line << "\n"; };
  return o;
}

json stats_json(const SearchStats& s) {
  return {{"steps", s.steps},
          {"leaves", s.leaves},
          {"max_labels", s.maxLabels},
          {"max_box_firings", s.maxBoxFirings},
          {"max_ought_firings", s.maxOughtFirings},
          {"max_d2_firings", s.maxD2Firings},
          {"model_worlds", s.modelWorlds}};
}

void print_model(const DsModel& m, World root, std::ostream& out) {
  out << "worlds:";
  for (const auto& w : m.worlds) out << " " << w;
  out << "\nroot: " << m.worlds[root] << "\n";
  for (int i = 0; i < m.agents; ++i) {
    // Choice cells of agent i.
    std::vector<bool> seen(m.size());
    out << "choices[" << i << "]:";
    for (World w = 0; w < m.size(); ++w) {
      if (seen[w]) continue;
      out << " {";
      bool first = true;
      for (World u = 0; u < m.size(); ++u)
        if (m.related(i, w, u)) {
          seen[u] = true;
          out << (first ? "" : ",") << m.worlds[u];
          first = false;
        }
      out << "}";
    }
    out << "\nideal[" << i << "]: {";
    bool first = true;
    for (World w : m.ideal[i]) {
      out << (first ? "" : ",") << m.worlds[w];
      first = false;
    }
    out << "}\n";
  }
  for (const auto& [p, ws] : m.val) {
    out << "V(" << p << "): {";
    bool first = true;
    for (World w : ws) {
      out << (first ? "" : ",") << m.worlds[w];
      first = false;
    }
    out << "}\n";
  }
}

// Soundness tripwire: a valid verdict must have no bounded counter-model, and an invalid one
// must have one whenever the bound covers the extracted model.
void oracle_cross_check(const RunConfig& cfg, const Formula& phi, int n, int k, const Verdict& v) {
  if (!cfg.oracleBound) return;
  std::size_t bound = *cfg.oracleBound;
  auto found = find_countermodel_bounded(phi, n, k, bound);
  if (v.valid && found) throw InternalError("oracle disagreement: VALID but a bounded counter-model exists");
  if (!v.valid && !found && bound >= v.model->size())
    throw InternalError("oracle disagreement: INVALID but no counter-model within the bound");
}

// Verifies a freshly produced certificate before it is reported.
void self_check(const Formula& phi, int n, int k, const Verdict& v) {
  if (v.valid) {
    auto r = check_derivation(*v.proof, goal_sequent(phi), {n, k, false});
    if (!r) throw InternalError("emitted proof does not check: " + r.message);
  } else {
    auto rep = validate_frame(*v.model);
    if (!rep.ok()) throw InternalError("extracted model violates frame conditions: " + rep.summary());
    if (satisfies(*v.model, v.root, phi)) throw InternalError("extracted model does not falsify the formula");
  }
}

std::string certificate_text(const Formula& phi, int n, int k, const Verdict& v) {
  if (v.valid) return proof_to_json({n, k, phi, *v.proof});
  return model_to_json({*v.model, v.model->worlds[v.root]});
}

struct Report {
  std::string command;
  std::string question;
  std::string answer;
  bool positive = false;
  int agents = 1, choices = 0;
  const Formula* phi = nullptr;
  const Verdict* verdict = nullptr;
};

int emit(const RunConfig& cfg, const Report& r, std::ostream& out) {
  const Verdict& v = *r.verdict;
  std::string cert = certificate_text(*r.phi, r.agents, r.choices, v);
  if (cfg.certPath) write_file(*cfg.certPath, cert);
  if (cfg.dotPath && v.model) write_file(*cfg.dotPath, to_dot(*v.model));
  if (cfg.out == OutputMode::Structured) {
    json j;
    j["command"] = r.command;
    j["question"] = r.question;
    j["agents"] = r.agents;
    j["choices"] = r.choices;
    j["verdict"] = v.valid ? "VALID" : "INVALID";
    j["answer"] = r.answer;
    j["stats"] = stats_json(v.stats);
    if (cfg.certPath) j["certificate_path"] = *cfg.certPath;
    j["certificate"] = json::parse(cert);
    out << j.dump(1) << "\n";
  } else {
    if (r.command != "prove") out << "question: " << r.question << "\n";
    out << (v.valid ? "VALID" : "INVALID") << "\n";
    if (r.command != "prove") out << "answer: " << r.answer << "\n";
    if (v.valid) {
      out << "proof: " << derivation_size(*v.proof) << " steps, height " << derivation_height(*v.proof) << "\n";
    } else {
      print_model(*v.model, v.root, out);
    }
    out << "search: " << v.stats.steps << " steps, " << v.stats.maxLabels << " labels\n";
    if (cfg.certPath) out << "certificate: " << *cfg.certPath << "\n";
  }
  return r.positive ? kPositive : kNegative;
}

int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const BudgetExhausted& e) {
    err << "error: " << e.what() << " (" << e.labels() << " labels; [i]-expansion agents:";
    for (int i : e.agbox_agents()) err << " " << i;
    err << ")\n";
    return kBudget;
  } catch (const InternalError& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternal;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const AgentRangeError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const MalformedInput& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const UnknownWorld& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const nlohmann::json::exception& e) {
    err << "error: malformed file: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternal;
  }
}

void check_config(const RunConfig& cfg) {
  if (cfg.agents < 1) throw MalformedInput("--agents must be at least 1");
  if (cfg.choices < 0) throw MalformedInput("--choices must be non-negative");
}

KnowledgeBase load(const RunConfig& cfg, const std::string& path) {
  KnowledgeBase kb = parse_kb(read_file(path));
  if (cfg.agentsGiven) kb.agents = cfg.agents;
  if (cfg.choicesGiven) kb.choices = cfg.choices;
  return kb;
}

int run_task(const RunConfig& cfg, const std::string& command, const KnowledgeBase& kb, const TaskVerdict& tv,
             const std::string& yes, const std::string& no, std::ostream& out) {
  oracle_cross_check(cfg, tv.question, kb.agents, kb.choices, tv.verdict);
  self_check(tv.question, kb.agents, kb.choices, tv.verdict);
  Report r{command, to_string(tv.question), tv.answer ? yes : no, tv.answer, kb.agents, kb.choices, &tv.question,
           &tv.verdict};
  return emit(cfg, r, out);
}

ModelFile load_model(const std::string& path, const std::optional<std::string>& world, World& w) {
  ModelFile mf = model_from_json(read_file(path));
  if (mf.model.size() == 0) throw MalformedInput("model has no worlds");
  std::string name = world ? *world : mf.root ? *mf.root : mf.model.worlds[0];
  w = mf.model.world(name);
  return mf;
}

}  // namespace

int cmd_prove(const RunConfig& cfg, const std::string& formula, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    check_config(cfg);
    Formula phi = parse(formula, cfg.agents);
    Verdict v = prove(phi, cfg.agents, cfg.choices, prove_options(cfg, err));
    oracle_cross_check(cfg, phi, cfg.agents, cfg.choices, v);
    self_check(phi, cfg.agents, cfg.choices, v);
    Report r{"prove", to_string(phi), v.valid ? "valid" : "invalid", v.valid, cfg.agents, cfg.choices, &phi, &v};
    return emit(cfg, r, out);
  });
}

int cmd_check_proof(const RunConfig& cfg, const std::string& path, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    ProofFile pf = proof_from_json(read_file(path));
    Sequent root = pf.goal ? goal_sequent(*pf.goal) : pf.proof.conclusion;
    CheckResult res = check_derivation(pf.proof, root, {pf.agents, pf.choices, false});
    if (cfg.out == OutputMode::Structured) {
      json j{{"command", "check-proof"}, {"ok", res.ok}, {"message", res.message}, {"path", res.path}};
      out << j.dump(1) << "\n";
    } else if (res.ok) {
      out << "proof OK (" << derivation_size(pf.proof) << " steps)\n";
    } else {
      out << "proof REJECTED: " << res.message << "\n";
      out << "at premise path:";
      for (auto p : res.path) out << " " << p;
      out << "\n";
    }
    return res.ok ? kPositive : kNegative;
  });
}

int cmd_check_model(const RunConfig& cfg, const std::string& path, const std::string& formula,
                    const std::optional<std::string>& world, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    World w = 0;
    ModelFile mf = load_model(path, world, w);
    Formula phi = parse(formula, mf.model.agents);
    ConditionReport rep = validate_frame(mf.model);
    bool falsified = !satisfies(mf.model, w, phi);
    bool ok = rep.ok() && falsified;
    if (cfg.out == OutputMode::Structured) {
      json j{{"command", "check-model"},
             {"ok", ok},
             {"frame", rep.ok()},
             {"frame_report", rep.summary()},
             {"falsified", falsified},
             {"world", mf.model.worlds[w]}};
      out << j.dump(1) << "\n";
    } else {
      out << "frame conditions: " << (rep.ok() ? "OK" : "VIOLATED") << "\n";
      if (!rep.ok()) out << rep.summary() << "\n";
      out << "formula at " << mf.model.worlds[w] << ": " << (falsified ? "false" : "true") << "\n";
      out << (ok ? "counter-model OK" : "counter-model REJECTED") << "\n";
    }
    return ok ? kPositive : kNegative;
  });
}

int cmd_mc(const RunConfig& cfg, const std::string& path, const std::string& formula,
           const std::optional<std::string>& world, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    World w = 0;
    ModelFile mf = load_model(path, world, w);
    Formula phi = parse(formula, mf.model.agents);
    bool holds = satisfies(mf.model, w, phi);
    if (cfg.out == OutputMode::Structured) {
      json j{{"command", "mc"}, {"world", mf.model.worlds[w]}, {"formula", to_string(phi)}, {"holds", holds}};
      out << j.dump(1) << "\n";
    } else {
      out << mf.model.worlds[w] << " |= " << to_string(phi) << ": " << (holds ? "true" : "false") << "\n";
    }
    return holds ? kPositive : kNegative;
  });
}

int cmd_duty(const RunConfig& cfg, const std::string& kbPath, int agent, const std::string& goal, std::ostream& out,
             std::ostream& err) {
  return guarded(err, [&] {
    KnowledgeBase kb = load(cfg, kbPath);
    TaskVerdict tv = duty_check(kb, agent, parse(goal, kb.agents), prove_options(cfg, err));
    return run_task(cfg, "duty", kb, tv, "duty holds", "not a duty", out);
  });
}

int cmd_comply(const RunConfig& cfg, const std::string& kbPath, int agent, const std::string& act,
               std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    KnowledgeBase kb = load(cfg, kbPath);
    TaskVerdict tv = compliance_check(kb, agent, parse(act, kb.agents), prove_options(cfg, err));
    return run_task(cfg, "comply", kb, tv, "compliant", "non-compliant", out);
  });
}

int cmd_fulfill(const RunConfig& cfg, const std::string& kbPath, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    KnowledgeBase kb = load(cfg, kbPath);
    TaskVerdict tv = joint_fulfillment_check(kb, prove_options(cfg, err));
    return run_task(cfg, "fulfill", kb, tv, "fulfillable", "not fulfillable", out);
  });
}

}  // namespace dstit::cli
