#include <gtest/gtest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

namespace {

#ifndef SCHEMAX_CLI_PATH
#error "SCHEMAX_CLI_PATH must point at the schemax binary"
#endif

struct RunResult {
  int exit_code;
  std::string output;  // stdout + stderr
};

RunResult run_cli(const std::string& args) {
  std::string cmd = std::string(SCHEMAX_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  EXPECT_NE(pipe, nullptr);
  std::string output;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0)
    output.append(buf.data(), n);
  int status = pclose(pipe);
  return RunResult{WIFEXITED(status) ? WEXITSTATUS(status) : -1, output};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("schemax_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    std::filesystem::create_directories(dir_);
    pop_path_ = write("pop.txt", "00110\n00111\n01010\n01101\n10101\n");
    fit_path_ = write("fit.json",
                      R"({"00110": 5, "00111": 3, "01010": 4, "01101": 1, "10101": 7})");
    config_path_ = write("config.json", R"({
      "ell": 5,
      "population_file": "pop.txt",
      "fitness": "fit.json",
      "crossover": "1pt:1/2",
      "mutation": "p=1/8",
      "u": "01010",
      "mode": "rational",
      "seed": 7,
      "generations": 2,
      "replicates": 3
    })");
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& content) {
    std::filesystem::path p = dir_ / name;
    std::ofstream out(p);
    out << content;
    return p.string();
  }

  std::filesystem::path dir_;
  std::string pop_path_, fit_path_, config_path_;
};

TEST_F(CliTest, ExampleMatchesStoredValues) {
  RunResult r = run_cli("example");
  EXPECT_EQ(r.exit_code, 0) << r.output;
  EXPECT_NE(r.output.find("401/1280 479/1280 143/1280 257/1280"),
            std::string::npos)
      << r.output;
  EXPECT_NE(r.output.find("all stages match"), std::string::npos);
}

TEST_F(CliTest, SchemaAvgTrivialMask) {
  RunResult r = run_cli("schema-avg --pop " + pop_path_ + " --u 00000");
  EXPECT_EQ(r.exit_code, 0) << r.output;
  EXPECT_EQ(r.output, "schema,value\n*****,1\n");
}

TEST_F(CliTest, SchemaAvgWithSelection) {
  RunResult r = run_cli("schema-avg --pop " + pop_path_ + " --u 01010 --fitness " +
                        fit_path_);
  EXPECT_EQ(r.exit_code, 0) << r.output;
  EXPECT_NE(r.output.find("*0*0*,7/20"), std::string::npos) << r.output;
  EXPECT_NE(r.output.find("*1*1*,1/5"), std::string::npos) << r.output;
}

TEST_F(CliTest, StepEmitsValuesBoundsSlack) {
  RunResult r = run_cli("step --config " + config_path_);
  EXPECT_EQ(r.exit_code, 0) << r.output;
  EXPECT_NE(r.output.find("schema,value,bound,slack"), std::string::npos);
  EXPECT_NE(r.output.find("*0*0*,401/1280,1029/5120,115/1024"), std::string::npos)
      << r.output;
}

TEST_F(CliTest, StepFloatModeOverride) {
  RunResult r = run_cli("step --config " + config_path_ + " --mode float");
  EXPECT_EQ(r.exit_code, 0) << r.output;
  // 401/1280 = 0.31328125, printed with 17 significant digits.
  EXPECT_NE(r.output.find("*0*0*,0.313281"), std::string::npos) << r.output;
}

TEST_F(CliTest, StepJsonFormat) {
  RunResult r = run_cli("step --config " + config_path_ + " --format json");
  EXPECT_EQ(r.exit_code, 0) << r.output;
  nlohmann::json parsed = nlohmann::json::parse(r.output);
  ASSERT_TRUE(parsed.is_array());
  ASSERT_EQ(parsed.size(), 4u);
  EXPECT_EQ(parsed[0]["schema"], "*0*0*");
  EXPECT_EQ(parsed[0]["value"], "401/1280");
}

TEST_F(CliTest, TrajectoryGenerations) {
  RunResult r = run_cli("trajectory --config " + config_path_ + " --generations 1");
  EXPECT_EQ(r.exit_code, 0) << r.output;
  EXPECT_NE(r.output.find("0,*0*0*,1/5"), std::string::npos) << r.output;
  EXPECT_NE(r.output.find("1,*0*0*,401/1280"), std::string::npos) << r.output;
}

TEST_F(CliTest, ValidateReportsCounts) {
  RunResult r = run_cli("validate --ell 5 --trials 12 --seed 3");
  EXPECT_EQ(r.exit_code, 0) << r.output;
  EXPECT_NE(r.output.find("12/12 oracle matches"), std::string::npos) << r.output;
  RunResult rf = run_cli("validate --ell 6 --trials 8 --seed 4 --mode float");
  EXPECT_EQ(rf.exit_code, 0) << rf.output;
  EXPECT_NE(rf.output.find("8/8 oracle matches"), std::string::npos) << rf.output;
}

TEST_F(CliTest, MontecarloReportsReplicates) {
  RunResult r = run_cli("montecarlo --config " + config_path_ +
                        " --replicates 2 --seed 5");
  EXPECT_EQ(r.exit_code, 0) << r.output;
  EXPECT_NE(r.output.find("replicate,schema,empirical,exact,abs_error,sigma"),
            std::string::npos)
      << r.output;
  EXPECT_NE(r.output.find("1,*1*1*"), std::string::npos) << r.output;
}

TEST_F(CliTest, DeterministicOutput) {
  std::string cmd = "montecarlo --config " + config_path_ + " --replicates 3 --seed 9";
  RunResult a = run_cli(cmd);
  RunResult b = run_cli(cmd);
  EXPECT_EQ(a.exit_code, 0);
  EXPECT_EQ(a.output, b.output);
  RunResult c = run_cli("step --config " + config_path_);
  RunResult d = run_cli("step --config " + config_path_);
  EXPECT_EQ(c.output, d.output);
}

TEST_F(CliTest, OutFileWritesTheSameBytes) {
  std::string out_path = (dir_ / "rows.csv").string();
  RunResult direct = run_cli("step --config " + config_path_);
  RunResult filed = run_cli("step --config " + config_path_ + " --out " + out_path);
  EXPECT_EQ(filed.exit_code, 0);
  std::ifstream in(out_path);
  std::string content((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
  EXPECT_EQ(content, direct.output);
}

TEST_F(CliTest, UsageAndParseErrorsExitTwo) {
  EXPECT_EQ(run_cli("").exit_code, 2);
  EXPECT_EQ(run_cli("bogus-subcommand").exit_code, 2);
  EXPECT_EQ(run_cli("step").exit_code, 2);                       // missing --config
  EXPECT_EQ(run_cli("step --config /does/not/exist.json").exit_code, 2);
  EXPECT_EQ(run_cli("schema-avg --pop " + pop_path_ + " --u 012").exit_code, 2);
  EXPECT_EQ(run_cli("validate --ell 20 --trials 2").exit_code, 2);
  RunResult help = run_cli("--help");
  EXPECT_EQ(help.exit_code, 0);
  EXPECT_NE(help.output.find("schema-avg"), std::string::npos);
}

TEST_F(CliTest, MismatchedMaskLengthExitsTwo) {
  std::string bad = write("bad_config.json", R"({
    "ell": 5, "population_file": "pop.txt", "u": "0101"
  })");
  EXPECT_EQ(run_cli("step --config " + bad).exit_code, 2);
}

}  // namespace
