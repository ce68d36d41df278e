// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "dstit/certificate.hpp"
#include "dstit/errors.hpp"
#include "dstit/search.hpp"
#include "dstit/tasks.hpp"
#include "support/random.hpp"

using namespace dstit;
using F = Formula;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int id, const std::string& title, bool ok, const std::string& detail) {
  std::printf("%s %2d %s: %s\n", ok ? "PASS" : "FAIL", id, title.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string secs(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3fs", s);
  return buf;
}

bool proof_checks(const Verdict& v, const F& phi, int n, int k) {
  if (!v.valid || !v.proof) return false;
  // Through the certificate format, as the standalone checker would see it.
  ProofFile back = proof_from_json(proof_to_json({n, k, phi, *v.proof}));
  return check_derivation(back.proof, goal_sequent(phi), {n, k, false}).ok;
}

bool model_checks(const Verdict& v, const F& phi) {
  if (v.valid || !v.model) return false;
  return validate_frame(*v.model).ok() && !satisfies(*v.model, v.root, phi);
}

KnowledgeBase kb_of(std::vector<const char*> norms, std::vector<const char*> facts) {
  KnowledgeBase kb;
  for (const char* s : norms) kb.norms.push_back(parse(s, 1));
  for (const char* s : facts) kb.facts.push_back(parse(s, 1));
  return kb;
}

void guarded(int id, const std::string& title, const std::function<void()>& body) {
  try {
    body();
  } catch (const std::exception& e) {
    report(id, title, false, std::string("exception: ") + e.what());
  }
}

struct Case {
  F phi;
  int n, k;
};

std::vector<Case> corpus() {
  std::mt19937_64 rng(20240601);
  std::vector<Case> out;
  std::set<std::tuple<std::string, int, int>> seen;
  while (out.size() < 600) {
    int n = 1 + static_cast<int>(rng() % 2);
    int k = static_cast<int>(rng() % 3);
    // A single variable in half of the cases makes valid formulas less rare.
    std::vector<std::string> vars = out.size() % 2 ? std::vector<std::string>{"p"} : std::vector<std::string>{"p", "q"};
    F phi = rnd::random_formula(rng, 2 + rng() % 5, n, vars);
    if (complexity(phi) > 6) continue;
    if (seen.insert({to_string(phi), n, k}).second) out.push_back({phi, n, k});
  }
  return out;
}

}  // namespace

int main() {
  const char* oic = "O[0] p -> dia [0] p";
  const char* weak = "(O[0] n & dia [0] ~n & dia [0] f & box (f -> n)) -> O[0] f";
  const char* strong = "(O[0] n & dia [0] ~n & dia [0] f & box (n -> f)) -> O[0] f";

  guarded(1, "ought-implies-can", [&] {
    F phi = parse(oic, 1);
    auto t0 = Clock::now();
    Verdict v = prove(phi, 1, 0);
    double t = seconds_since(t0);
    std::set<RuleName> allowed{RuleName::Id,    RuleName::GenId, RuleName::Or,  RuleName::D2,
                               RuleName::Dia,   RuleName::AgBox, RuleName::D3,  RuleName::Perm};
    std::set<RuleName> used = v.proof ? rules_used(*v.proof) : std::set<RuleName>{};
    bool rulesOk = v.proof && std::includes(allowed.begin(), allowed.end(), used.begin(), used.end());
    bool ok = v.valid && t < 1.0 && proof_checks(v, phi, 1, 0) && rulesOk;
    report(1, "ought-implies-can", ok,
           std::string(v.valid ? "VALID" : "INVALID") + " in " + secs(t) + ", proof " +
               std::to_string(v.proof ? derivation_size(*v.proof) : 0) + " steps, rules " +
               (rulesOk ? "within the example's set" : "outside the example's set"));
  });

  guarded(2, "duty check, weak premise", [&] {
    F phi = parse(weak, 1);
    auto t0 = Clock::now();
    Verdict v = prove(phi, 1, 0);
    double t = seconds_since(t0);
    bool shape = false;
    std::string detail = v.valid ? "VALID" : "INVALID";
    if (!v.valid && v.model) {
      const DsModel& m = *v.model;
      bool single = m.ideal[0].size() == 1;
      World z = single ? *m.ideal[0].begin() : 0;
      shape = m.size() == 4 && single && satisfies(m, z, F::atom("n")) && !satisfies(m, z, F::atom("f"));
      detail += ", " + std::to_string(m.size()) + " worlds, ideal set size " + std::to_string(m.ideal[0].size());
    }
    report(2, "duty check, weak premise", !v.valid && t < 5.0 && model_checks(v, phi) && shape,
           detail + " in " + secs(t));
  });

  guarded(3, "duty check, strong premise", [&] {
    F phi = parse(strong, 1);
    Verdict v = prove(phi, 1, 0);
    report(3, "duty check, strong premise", v.valid && proof_checks(v, phi, 1, 0),
           std::string(v.valid ? "VALID" : "INVALID") + ", proof checks: " +
               (v.valid && proof_checks(v, phi, 1, 0) ? "yes" : "no"));
  });

  guarded(4, "joint fulfillment", [&] {
    KnowledgeBase kb = kb_of({"O[0] n", "O[0] p"},
                             {"dia [0] n", "dia [0] ~n", "dia [0] p", "dia [0] ~p", "box ([0] n -> ![0] p)"});
    TaskVerdict tv = joint_fulfillment_check(kb);
    bool checks = proof_checks(tv.verdict, tv.question, 1, 0);
    report(4, "joint fulfillment", !tv.answer && checks,
           std::string(tv.answer ? "fulfillable" : "not fulfillable") + ", proof checks: " + (checks ? "yes" : "no"));
  });

  guarded(5, "compliance", [&] {
    KnowledgeBase kb = kb_of({"O[0] n"}, {"dia [0] f & dia [0] car"});
    TaskVerdict tv = compliance_check(kb, 0, F::atom("car"));
    bool checks = model_checks(tv.verdict, tv.question);
    report(5, "compliance", tv.answer && checks,
           std::string(tv.answer ? "compliant" : "non-compliant") + ", counter-model checks: " + (checks ? "yes" : "no"));
  });

  guarded(6, "loop-check necessity", [&] {
    F phi = parse("dia [0] p | dia [1] q", 2);
    auto t0 = Clock::now();
    Verdict v = prove(phi, 2, 2);
    double t = seconds_since(t0);
    bool halted = !v.valid && t < 30.0 && v.stats.maxLabels <= 200 && model_checks(v, phi);
    std::string detail = std::string(v.valid ? "VALID" : "INVALID") + " in " + secs(t) + " with " +
                         std::to_string(v.stats.maxLabels) + " labels";
    bool diverged = false;
    ProveOptions o;
    o.loopCheck = false;
    o.budget = 5000;
    try {
      prove(phi, 2, 2, o);
      detail += "; without loop-checking the search halted";
    } catch (const BudgetExhausted& e) {
      const auto& ag = e.agbox_agents();
      bool alternating = ag.size() >= 20;
      for (std::size_t j = ag.size() >= 20 ? ag.size() - 20 : 1; alternating && j < ag.size(); ++j)
        alternating = ag[j] != ag[j - 1];
      diverged = alternating;
      detail += "; without loop-checking the budget ran out after " + std::to_string(e.steps()) + " steps, " +
                std::to_string(e.labels()) + " labels, " + (alternating ? "alternating" : "non-alternating") +
                " [i]-expansions";
    }
    report(6, "loop-check necessity", halted && diverged, detail);
  });

  const std::vector<Case> cases = corpus();
  std::vector<Verdict> verdicts;
  std::vector<std::string> errors;
  auto t0 = Clock::now();
  for (const Case& c : cases) {
    try {
      verdicts.push_back(prove(c.phi, c.n, c.k));
    } catch (const std::exception& e) {
      verdicts.push_back({});
      errors.push_back(to_string(c.phi) + ": " + e.what());
    }
  }
  double proveTime = seconds_since(t0);

  guarded(7, "oracle agreement", [&] {
    auto t1 = Clock::now();
    std::size_t disagree = 0, valid = 0;
    std::string first;
    for (std::size_t j = 0; j < cases.size(); ++j) {
      const Case& c = cases[j];
      const Verdict& v = verdicts[j];
      valid += v.valid;
      std::size_t bound = std::max<std::size_t>(v.model ? v.model->size() : 0, 4);
      bool found = find_countermodel_bounded(c.phi, c.n, c.k, bound).has_value();
      if (found == v.valid) {
        ++disagree;
        if (first.empty()) first = " (first: " + to_string(c.phi) + ")";
      }
    }
    double t = proveTime + seconds_since(t1);
    report(7, "oracle agreement", disagree == 0 && errors.empty() && t < 600.0,
           std::to_string(cases.size()) + " formulas (" + std::to_string(valid) + " valid), " +
               std::to_string(disagree) + " disagreements, " + std::to_string(errors.size()) + " errors, " +
               secs(t) + first);
  });

  guarded(8, "certificate soundness", [&] {
    std::size_t proofs = 0, proofsOk = 0, models = 0, modelsOk = 0;
    for (std::size_t j = 0; j < cases.size(); ++j) {
      const Case& c = cases[j];
      const Verdict& v = verdicts[j];
      if (v.valid) {
        ++proofs;
        proofsOk += proof_checks(v, c.phi, c.n, c.k);
      } else if (v.model) {
        ++models;
        modelsOk += model_checks(v, c.phi);
      }
    }
    report(8, "certificate soundness", proofs == proofsOk && models == modelsOk && proofs + models == cases.size(),
           std::to_string(proofsOk) + "/" + std::to_string(proofs) + " proofs and " + std::to_string(modelsOk) + "/" +
               std::to_string(models) + " counter-models check");
  });

  guarded(9, "exclusivity and duality", [&] {
    std::size_t checked = 0, clashes = 0;
    for (std::size_t j = 0; j < cases.size(); ++j) {
      if (!verdicts[j].valid) continue;
      ++checked;
      clashes += prove(negate(cases[j].phi), cases[j].n, cases[j].k).valid;
    }
    std::mt19937_64 rng(99);
    std::size_t dual = 0;
    for (int t = 0; t < 1000; ++t) {
      int n = 1 + t % 2;
      DsModel m = rnd::random_model(rng, n, t % 3, 4);
      F f = rnd::random_formula(rng, 10, n);
      World w = rng() % m.size();
      dual += satisfies(m, w, f) != satisfies(m, w, negate(f));
    }
    report(9, "exclusivity and duality", clashes == 0 && dual == 1000,
           std::to_string(checked) + " valid formulas with invalid negations: " + std::to_string(checked - clashes) +
               "; duality on " + std::to_string(dual) + "/1000 triples");
  });

  guarded(10, "termination instrumentation", [&] {
    std::size_t maxLabels = 0, box = 0, ought = 0, d2 = 0;
    for (const Verdict& v : verdicts) {
      maxLabels = std::max(maxLabels, v.stats.maxLabels);
      box = std::max(box, v.stats.maxBoxFirings);
      ought = std::max(ought, v.stats.maxOughtFirings);
      d2 = std::max(d2, v.stats.maxD2Firings);
    }
    bool ok = errors.empty() && maxLabels <= ProveOptions{}.labelCap && box <= 1 && ought <= 1 && d2 <= 1;
    report(10, "termination instrumentation", ok,
           "max labels " + std::to_string(maxLabels) + ", per-thread firings: box " + std::to_string(box) +
               ", ought " + std::to_string(ought) + ", D2 " + std::to_string(d2));
  });

  for (const auto& e : errors) std::printf("  error: %s\n", e.c_str());
  std::printf("%s: %d criteria failed\n", failures ? "FAILED" : "OK", failures);
  return failures ? 1 : 0;
}
