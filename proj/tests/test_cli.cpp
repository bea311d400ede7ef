#include "generators.hpp"

#include <nlohmann/json.hpp>

#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <sys/wait.h>

namespace specgen {
namespace {

struct CliRun {
  int exit_code;
  std::string output;
};

CliRun cli(const std::string &args) {
  std::string cmd = std::string(SPECGEN_CLI_PATH) + " " + args + " 2>&1";
  FILE *pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) throw std::runtime_error("popen failed");
  std::string out;
  std::array<char, 4096> buf;
  while (std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), n);
  int status = ::pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string fixture(const std::string &name) { return "'" + (testing::fixture_dir() / name).string() + "'"; }

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("specgen_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    std::filesystem::remove_all(dir_);
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }

  std::filesystem::path dir_;
};

TEST_F(CliTest, MutateListsTheFamily) {
  auto r = cli("mutate 'requires a <= b;'");
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_EQ(r.output, "0\t//@ requires a <= b;\n-1\t//@ requires a - 1 <= b;\n-1\t//@ requires a < b;\n");
}

TEST_F(CliTest, MutateKindFilterAndJson) {
  auto r = cli("mutate 'requires x < n + 1;' --kinds arithmetic --json");
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_NE(r.output.find("x < n - 1"), std::string::npos);
  EXPECT_EQ(r.output.find("x <= n"), std::string::npos);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(cli("").exit_code, 2);
  EXPECT_EQ(cli("frobnicate").exit_code, 2);
  EXPECT_EQ(cli("mutate 'requires a <= ;'").exit_code, 2);
  EXPECT_EQ(cli("mutate 'requires a <= b;' --kinds bitwise").exit_code, 2);
  EXPECT_EQ(cli("verify /nonexistent.java").exit_code, 2);
}

TEST_F(CliTest, BadConfigIsAUsageError) {
  std::ofstream(dir_ / "bad.yaml") << "endpoint:\n  modle: x\n";
  auto r = cli("verify " + fixture("TwoSum.annotated.java") + " --config '" + (dir_ / "bad.yaml").string() + "'");
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.output.find("endpoint.modle"), std::string::npos) << r.output;
}

TEST_F(CliTest, EvalOracleAgainstTraces) {
  auto r = cli("eval " + fixture("TwoSum.annotated.java") + " " + fixture("twosum_traces.jsonl"));
  EXPECT_EQ(r.exit_code, 0) << r.output;
  EXPECT_NE(r.output.find("verdict: pass"), std::string::npos);
}

TEST_F(CliTest, VerifyWithTraceAdapter) {
  auto r = cli("verify " + fixture("TwoSum.annotated.java") + " --trace " + fixture("twosum_traces.jsonl") + " --json");
  EXPECT_EQ(r.exit_code, 0) << r.output;
  EXPECT_EQ(nlohmann::json::parse(r.output)["outcome"], "pass");
}

TEST_F(CliTest, VerifyWithStubCommand) {
  auto r = cli("verify " + fixture("TwoSum.annotated.java") +
               " --verifier-cmd \"echo 'TwoSum.java:4: verify: Postcondition'; exit 1 # {file}\"");
  EXPECT_EQ(r.exit_code, 1) << r.output;
  EXPECT_NE(r.output.find("unprovable-postcondition"), std::string::npos) << r.output;
}

TEST_F(CliTest, RepairWeakensTheWrongInvariant) {
  auto src = testing::read_text(testing::fixture_dir() / "TwoSum.annotated.java");
  auto pos = src.find("0 <= i && i <= n;");
  ASSERT_NE(pos, std::string::npos);
  src.replace(pos, 17, "0 <= i && i < n;");
  std::ofstream(dir_ / "TwoSum.java") << src;
  auto r = cli("repair '" + (dir_ / "TwoSum.java").string() + "' --trace " + fixture("twosum_traces.jsonl"));
  EXPECT_EQ(r.exit_code, 0) << r.output;
  EXPECT_NE(r.output.find("verified after 4 verifier calls"), std::string::npos) << r.output;
  EXPECT_NE(r.output.find("//@ maintaining 0 <= i && i <= n;"), std::string::npos);
}

TEST_F(CliTest, GenerateWritesReports) {
  auto r = cli("generate " + fixture("TwoSum.java") + " --config " + fixture("twosum.yaml") + " --out '" +
               dir_.string() + "'");
  EXPECT_EQ(r.exit_code, 0) << r.output;
  auto report = testing::read_text(dir_ / "report.jsonl");
  auto entry = nlohmann::json::parse(report.substr(0, report.find('\n')));
  EXPECT_EQ(entry["outcome"], "verified-by-mutation");
  EXPECT_EQ(entry["repair_calls"], 4);
  EXPECT_TRUE(std::filesystem::exists(dir_ / "summary.txt"));

  auto rep = cli("report '" + dir_.string() + "' --json");
  EXPECT_EQ(rep.exit_code, 0);
  auto s = nlohmann::json::parse(rep.output);
  EXPECT_EQ(s["number_of_passes"], 1);
  EXPECT_DOUBLE_EQ(s["mean_verifier_calls"].get<double>(), 14.0);
}

TEST_F(CliTest, GenerateSuccessProbability) {
  nlohmann::json scripts = nlohmann::json::array();
  auto good = testing::read_text(testing::fixture_dir() / "TwoSum.annotated.java");
  for (int k = 0; k < 10; ++k) {
    std::vector<std::string> responses(10, k < 6 ? "```java\n" + good + "```" : "no idea");
    scripts.push_back({{"responses", responses}});
  }
  std::ofstream(dir_ / "chats.json") << nlohmann::json{{"scripts", scripts}}.dump();
  std::ofstream(dir_ / "cfg.yaml") << "endpoint: {client: scripted, script: chats.json}\n"
                                   << "verifier: {adapter: trace, trace_file: '"
                                   << (testing::fixture_dir() / "twosum_traces.jsonl").string() << "'}\n";
  auto r = cli("generate " + fixture("TwoSum.java") + " --attempts 10 --workers 2 --json --config '" +
               (dir_ / "cfg.yaml").string() + "' --out '" + (dir_ / "out").string() + "'");
  EXPECT_EQ(r.exit_code, 0) << r.output;
  auto summary = nlohmann::json::parse(r.output.substr(r.output.rfind("{\"entries\"")));
  EXPECT_DOUBLE_EQ(summary["programs"][0]["success_probability"].get<double>(), 0.6);
}

}  // namespace
}  // namespace specgen
