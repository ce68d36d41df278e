#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>

namespace dstit::cli {

enum class OutputMode { Human, Structured };

// Process exit codes.
inline constexpr int kPositive = 0;
inline constexpr int kNegative = 1;
inline constexpr int kUsage = 2;
inline constexpr int kInternal = 3;
inline constexpr int kBudget = 4;

struct RunConfig {
  int agents = 1;
  int choices = 0;
  bool agentsGiven = false;  // overrides a knowledge base header when set
  bool choicesGiven = false;
  OutputMode out = OutputMode::Human;
  std::optional<std::string> certPath;
  std::optional<std::string> dotPath;
  bool trace = false;
  std::size_t labelCap = 10000;
  std::optional<std::size_t> oracleBound;
  bool loopCheck = true;
  std::size_t budget = 0;
  bool expandGenId = false;
  bool expandIoa = false;
  bool rawProof = false;
};

// Each command writes its report to `out`, diagnostics to `err`, and returns the exit code.
int cmd_prove(const RunConfig& cfg, const std::string& formula, std::ostream& out, std::ostream& err);
int cmd_check_proof(const RunConfig& cfg, const std::string& path, std::ostream& out, std::ostream& err);
int cmd_check_model(const RunConfig& cfg, const std::string& path, const std::string& formula,
                    const std::optional<std::string>& world, std::ostream& out, std::ostream& err);
int cmd_mc(const RunConfig& cfg, const std::string& path, const std::string& formula,
           const std::optional<std::string>& world, std::ostream& out, std::ostream& err);
int cmd_duty(const RunConfig& cfg, const std::string& kbPath, int agent, const std::string& goal, std::ostream& out,
             std::ostream& err);
int cmd_comply(const RunConfig& cfg, const std::string& kbPath, int agent, const std::string& act,
               std::ostream& out, std::ostream& err);
int cmd_fulfill(const RunConfig& cfg, const std::string& kbPath, std::ostream& out, std::ostream& err);

}  // namespace dstit::cli
