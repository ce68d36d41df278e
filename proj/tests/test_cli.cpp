#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "../tools/src/cli.hpp"

using namespace dstit::cli;
namespace fs = std::filesystem;

namespace {

std::string fixture(const std::string& name) { return std::string(DSTIT_FIXTURES) + "/" + name; }

const char* kDuty = "(O[0] n & dia [0] ~n & dia [0] f & box (f -> n)) -> O[0] f";

struct Outcome {
  int code;
  std::string out, err;
};

template <class Fn>
Outcome run(Fn fn) {
  std::ostringstream out, err;
  int code = fn(out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
protected:
  void SetUp() override {
    dir = fs::temp_directory_path() /
          ("dstit_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }
  std::string path(const std::string& name) const { return (dir / name).string(); }
  static std::string slurp(const std::string& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }
  fs::path dir;
};

}  // namespace

TEST_F(CliTest, ProveValidWritesCheckableCertificate) {
  RunConfig cfg;
  cfg.certPath = path("oic.json");
  Outcome r = run([&](auto& o, auto& e) { return cmd_prove(cfg, "O[0] p -> dia [0] p", o, e); });
  EXPECT_EQ(r.code, kPositive) << r.err;
  EXPECT_NE(r.out.find("VALID"), std::string::npos);
  Outcome c = run([&](auto& o, auto& e) { return cmd_check_proof(cfg, *cfg.certPath, o, e); });
  EXPECT_EQ(c.code, kPositive) << c.err;
}

TEST_F(CliTest, TamperedProofIsRejected) {
  RunConfig cfg;
  cfg.certPath = path("oic.json");
  ASSERT_EQ(run([&](auto& o, auto& e) { return cmd_prove(cfg, "O[0] p -> dia [0] p", o, e); }).code, kPositive);
  auto j = nlohmann::json::parse(slurp(*cfg.certPath));
  ASSERT_EQ(j["root"]["rule"]["name"], "or");
  j["root"]["rule"]["name"] = "and";
  std::ofstream(path("bad.json")) << j.dump();
  EXPECT_EQ(run([&](auto& o, auto& e) { return cmd_check_proof(cfg, path("bad.json"), o, e); }).code, kNegative);
  j["root"]["rule"]["name"] = "nonsense";
  std::ofstream(path("worse.json")) << j.dump();
  EXPECT_EQ(run([&](auto& o, auto& e) { return cmd_check_proof(cfg, path("worse.json"), o, e); }).code, kUsage);
  EXPECT_EQ(run([&](auto& o, auto& e) { return cmd_check_proof(cfg, path("missing.json"), o, e); }).code, kUsage);
}

TEST_F(CliTest, ProveInvalidWritesModelAndDot) {
  RunConfig cfg;
  cfg.certPath = path("m.json");
  cfg.dotPath = path("m.dot");
  cfg.oracleBound = 4;
  Outcome r = run([&](auto& o, auto& e) { return cmd_prove(cfg, kDuty, o, e); });
  EXPECT_EQ(r.code, kNegative) << r.err;
  EXPECT_NE(r.out.find("INVALID"), std::string::npos);
  EXPECT_EQ(slurp(path("m.dot")).rfind("graph model", 0), 0u);
  Outcome c = run([&](auto& o, auto& e) { return cmd_check_model(cfg, path("m.json"), kDuty, std::nullopt, o, e); });
  EXPECT_EQ(c.code, kPositive) << c.out << c.err;
}

TEST_F(CliTest, LoopCheckExampleAndBudget) {
  RunConfig cfg;
  cfg.agents = 2;
  cfg.choices = 2;
  EXPECT_EQ(run([&](auto& o, auto& e) { return cmd_prove(cfg, "dia [0] p | dia [1] q", o, e); }).code, kNegative);
  cfg.loopCheck = false;
  cfg.budget = 5000;
  Outcome r = run([&](auto& o, auto& e) { return cmd_prove(cfg, "dia [0] p | dia [1] q", o, e); });
  EXPECT_EQ(r.code, kBudget);
  EXPECT_NE(r.err.find("budget"), std::string::npos);
}

TEST_F(CliTest, UsageErrors) {
  RunConfig cfg;
  Outcome r = run([&](auto& o, auto& e) { return cmd_prove(cfg, "p &", o, e); });
  EXPECT_EQ(r.code, kUsage);
  EXPECT_FALSE(r.err.empty());
  EXPECT_EQ(run([&](auto& o, auto& e) { return cmd_prove(cfg, "[3] p", o, e); }).code, kUsage);
  RunConfig none;
  none.agents = 0;
  EXPECT_EQ(run([&](auto& o, auto& e) { return cmd_prove(none, "p", o, e); }).code, kUsage);
}

TEST_F(CliTest, LabelCapIsInternal) {
  RunConfig cfg;
  cfg.labelCap = 2;
  EXPECT_EQ(run([&](auto& o, auto& e) { return cmd_prove(cfg, kDuty, o, e); }).code, kInternal);
}

TEST_F(CliTest, StructuredOutputIsDeterministicJson) {
  RunConfig cfg;
  cfg.out = OutputMode::Structured;
  cfg.agents = 2;
  cfg.choices = 1;
  auto once = [&] { return run([&](auto& o, auto& e) { return cmd_prove(cfg, "dia [0] p | [1] q", o, e); }); };
  Outcome a = once(), b = once();
  EXPECT_EQ(a.out, b.out);
  auto j = nlohmann::json::parse(a.out);
  EXPECT_EQ(j["command"], "prove");
  EXPECT_EQ(j["verdict"], "INVALID");
  EXPECT_EQ(j["agents"], 2);
  EXPECT_TRUE(j.contains("certificate"));
}

TEST_F(CliTest, ModelCommands) {
  RunConfig cfg;
  Outcome a = run([&](auto& o, auto& e) { return cmd_check_model(cfg, fixture("duty_model.json"), kDuty, "w", o, e); });
  EXPECT_EQ(a.code, kPositive) << a.out << a.err;
  Outcome b = run([&](auto& o, auto& e) { return cmd_check_model(cfg, fixture("duty_model.json"), "n", "w", o, e); });
  EXPECT_EQ(b.code, kNegative);
  Outcome c = run([&](auto& o, auto& e) { return cmd_check_model(cfg, fixture("duty_model.json"), kDuty, "q", o, e); });
  EXPECT_EQ(c.code, kUsage);
  Outcome d = run([&](auto& o, auto& e) { return cmd_mc(cfg, fixture("cycling_model.json"), "[0] left_jade", "w1", o, e); });
  EXPECT_EQ(d.code, kPositive);
  Outcome f = run([&](auto& o, auto& e) { return cmd_mc(cfg, fixture("cycling_model.json"), "coll", std::nullopt, o, e); });
  EXPECT_EQ(f.code, kNegative);
}

TEST_F(CliTest, TaskCommands) {
  RunConfig cfg;
  cfg.oracleBound = 4;
  EXPECT_EQ(run([&](auto& o, auto& e) { return cmd_duty(cfg, fixture("duty_weak.kb"), 0, "f", o, e); }).code,
            kNegative);
  EXPECT_EQ(run([&](auto& o, auto& e) { return cmd_duty(cfg, fixture("duty_strong.kb"), 0, "f", o, e); }).code,
            kPositive);
  EXPECT_EQ(run([&](auto& o, auto& e) { return cmd_comply(cfg, fixture("comply_car.kb"), 0, "car", o, e); }).code,
            kPositive);
  EXPECT_EQ(run([&](auto& o, auto& e) { return cmd_comply(cfg, fixture("comply_left.kb"), 0, "right", o, e); }).code,
            kNegative);
  cfg.certPath = path("conflict.json");
  Outcome r = run([&](auto& o, auto& e) { return cmd_fulfill(cfg, fixture("fulfill_conflict.kb"), o, e); });
  EXPECT_EQ(r.code, kNegative);
  EXPECT_NE(r.out.find("question:"), std::string::npos);
  EXPECT_EQ(run([&](auto& o, auto& e) { return cmd_check_proof(cfg, *cfg.certPath, o, e); }).code, kPositive);
  EXPECT_EQ(run([&](auto& o, auto& e) { return cmd_fulfill(cfg, fixture("empty.kb"), o, e); }).code, kPositive);
  EXPECT_EQ(run([&](auto& o, auto& e) { return cmd_duty(cfg, fixture("duty_weak.kb"), 3, "f", o, e); }).code, kUsage);
  EXPECT_EQ(run([&](auto& o, auto& e) { return cmd_fulfill(cfg, fixture("nope.kb"), o, e); }).code, kUsage);
}
