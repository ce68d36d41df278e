#include <iostream>

#include <CLI11.hpp>

#include "cli.hpp"

int main(int argc, char** argv) {
  using namespace dstit::cli;
  RunConfig cfg;
  CLI::App app{"Decision procedure for multi-agent deontic STIT logics"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string mode = "human";
  std::size_t oracleBound = 0;
  auto* agentsOpt = app.add_option("--agents", cfg.agents, "Number of agents n")->check(CLI::PositiveNumber);
  auto* choicesOpt = app.add_option("--choices", cfg.choices, "Choice bound k (0: unlimited)")->check(CLI::NonNegativeNumber);
  app.add_option("--out", mode, "Output mode")->check(CLI::IsMember({"human", "structured"}));
  app.add_option("--cert", cfg.certPath, "Write the certificate to this file");
  app.add_option("--dot", cfg.dotPath, "Write counter-models as DOT to this file");
  app.add_flag("--trace", cfg.trace, "Print rule applications to stderr");
  app.add_option("--label-cap", cfg.labelCap, "Abort when a thread exceeds this many labels");
  auto* oracleOpt = app.add_option("--oracle-bound", oracleBound, "Cross-check verdicts with bounded model search");
  bool noLoop = false;
  app.add_flag("--no-loopcheck", noLoop, "Disable blocking (diverges on some inputs)");
  app.add_option("--budget", cfg.budget, "Abort after this many rule applications (0: unlimited)");
  app.add_flag("--expand-genid", cfg.expandGenId, "Expand generalized initial sequents to atomic ones");
  app.add_flag("--expand-ioa", cfg.expandIoa, "Expand IoaOp steps to single IOA steps");
  app.add_flag("--raw-proof", cfg.rawProof, "Keep steps whose additions are never used");

  std::string formula, path, kb;
  std::optional<std::string> world;
  int agent = 0;

  auto* prove = app.add_subcommand("prove", "Decide validity of a formula");
  prove->add_option("formula", formula)->required();
  auto* checkProof = app.add_subcommand("check-proof", "Check a proof certificate");
  checkProof->add_option("file", path)->required();
  auto* checkModel = app.add_subcommand("check-model", "Check a counter-model certificate");
  checkModel->add_option("file", path)->required();
  checkModel->add_option("formula", formula)->required();
  checkModel->add_option("--world", world, "World to evaluate at (default: the file's root)");
  auto* mc = app.add_subcommand("mc", "Evaluate a formula on a model");
  mc->add_option("file", path)->required();
  mc->add_option("formula", formula)->required();
  mc->add_option("--world", world, "World to evaluate at (default: the file's root)");
  auto* duty = app.add_subcommand("duty", "Is O[agent] goal implied by the knowledge base?");
  duty->add_option("kb", kb)->required();
  duty->add_option("--agent", agent)->required();
  duty->add_option("--goal", formula)->required();
  auto* comply = app.add_subcommand("comply", "Is the act compliant with the knowledge base?");
  comply->add_option("kb", kb)->required();
  comply->add_option("--agent", agent)->required();
  comply->add_option("--act", formula)->required();
  auto* fulfill = app.add_subcommand("fulfill", "Can all obligations be fulfilled jointly?");
  fulfill->add_option("kb", kb)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kUsage;
  }
  cfg.out = mode == "structured" ? OutputMode::Structured : OutputMode::Human;
  cfg.loopCheck = !noLoop;
  cfg.agentsGiven = agentsOpt->count() > 0;
  cfg.choicesGiven = choicesOpt->count() > 0;
  if (oracleOpt->count() > 0) cfg.oracleBound = oracleBound;

  if (*prove) return cmd_prove(cfg, formula, std::cout, std::cerr);
  if (*checkProof) return cmd_check_proof(cfg, path, std::cout, std::cerr);
  if (*checkModel) return cmd_check_model(cfg, path, formula, world, std::cout, std::cerr);
  if (*mc) return cmd_mc(cfg, path, formula, world, std::cout, std::cerr);
  if (*duty) return cmd_duty(cfg, kb, agent, formula, std::cout, std::cerr);
  if (*comply) return cmd_comply(cfg, kb, agent, formula, std::cout, std::cerr);
  if (*fulfill) return cmd_fulfill(cfg, kb, std::cout, std::cerr);
  return kUsage;
}
