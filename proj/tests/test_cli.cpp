#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pco_cli/app.hpp"
#include "pco_cli/config.hpp"

namespace fs = std::filesystem;
using pco::cli::run_cli;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("pco_cli_" + name);
  fs::remove_all(p);
  return p;
}

const std::string kData = PCO_TEST_DATA;
const std::string kConfigs = PCO_CONFIG_DIR;

}  // namespace

TEST(Cli, UsageErrors) {
  EXPECT_EQ(cli({}).code, 2);
  EXPECT_EQ(cli({"frobnicate"}).code, 2);
  EXPECT_EQ(cli({"experiment", "fig9"}).code, 2);
  EXPECT_EQ(cli({"validate-prc"}).code, 2);
  EXPECT_EQ(cli({"--help"}).code, 0);
}

TEST(Cli, ValidatePrc) {
  EXPECT_EQ(cli({"validate-prc", "--prc", "standard", "--n", "3"}).code, 0);
  const Result steep = cli({"validate-prc", "--prc", "linear:1.5", "--n", "3"});
  EXPECT_EQ(steep.code, 1);
  EXPECT_NE(steep.out.find("z="), std::string::npos) << steep.out;
  EXPECT_EQ(cli({"validate-prc", "--prc", "table:" + kData + "/q4.csv", "--n", "4"}).code, 0);
  EXPECT_EQ(cli({"validate-prc", "--prc", "cubic", "--n", "3"}).code, 2);
  EXPECT_EQ(cli({"validate-prc", "--prc", "standard", "--grid", "10"}).code, 2);
}

TEST(Cli, SimulateInline) {
  const fs::path out = scratch("inline");
  const Result r = cli({"simulate", "--n", "3", "--prc", "standard", "--x0", "0,2.1,4.2", "--out", out.string()});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("terminal V"), std::string::npos);
  EXPECT_NE(r.out.find("jumps"), std::string::npos);
  EXPECT_NE(r.out.find("min dwell"), std::string::npos);
  for (const char* f : {"trajectory.csv", "events.csv", "v_trace.csv"}) EXPECT_TRUE(fs::exists(out / f)) << f;
}

TEST(Cli, SimulateConfigAndOverrides) {
  const fs::path out = scratch("config");
  Result r = cli({"simulate", kConfigs + "/standard.json", "--out", out.string()});
  EXPECT_EQ(r.code, 0) << r.err;
  r = cli({"simulate", kConfigs + "/standard.json", "--horizon", "2", "--out", out.string()});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("terminal t    2\n"), std::string::npos) << r.out;
  r = cli({"simulate", kConfigs + "/perturbed.json", "--horizon", "10", "--out", out.string()});
  EXPECT_EQ(r.code, 0) << r.err;
}

TEST(Cli, ConfigErrorsNameLineAndField) {
  Result r = cli({"simulate", kData + "/unknown_key.json"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("unknown_key.json:4"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("/horizn"), std::string::npos) << r.err;
  r = cli({"simulate", kData + "/bad_type.json"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("/x0/1"), std::string::npos) << r.err;
  r = cli({"simulate", kData + "/malformed.json"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("line 4"), std::string::npos) << r.err;
  EXPECT_EQ(cli({"simulate", kData + "/missing.json"}).code, 2);
  EXPECT_EQ(cli({"simulate", "--x0", "1,2"  , "--n", "3"}).code, 2);
  EXPECT_EQ(cli({"simulate", "--x0", "1,x,2"}).code, 2);
  EXPECT_EQ(cli({"simulate", "--policy", "sometimes", "--x0", "1,2,3"}).code, 2);
}

TEST(Cli, ConfigRejectsWrongSchema) {
  EXPECT_THROW(pco::cli::parse_config(R"({"schema": "pco-sim/9"})"), pco::cli::ConfigError);
  EXPECT_THROW(pco::cli::parse_config(R"({"n": 3})"), pco::cli::ConfigError);
  EXPECT_THROW(pco::cli::parse_config(R"({"schema": "pco-sim/1", "stop": {"v": 1}})"), pco::cli::ConfigError);
  const auto d = pco::cli::parse_config(R"({"schema": "pco-sim/1", "prc": {"family": "linear", "c": 0.25}})");
  EXPECT_EQ(d.prc, "linear:0.25");
}

TEST(Cli, InvalidPrcIsDiagnostic) {
  const Result r = cli({"simulate", "--prc", "linear:1.5", "--x0", "1,2,3", "--out", scratch("bad").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("fails validation"), std::string::npos);
  const Result forced = cli({"simulate", "--prc", "linear:1.5", "--x0", "1,2,3", "--allow-invalid-prc", "--horizon",
                             "10", "--out", scratch("forced").string()});
  EXPECT_EQ(forced.code, 0) << forced.err;
}

TEST(Cli, OutputDirectoryFromEnvironment) {
  const fs::path root = scratch("env");
  ::setenv(pco::cli::kOutDirEnv, root.c_str(), 1);
  const Result r = cli({"simulate", "--x0", "1,2,3", "--horizon", "3"});
  const Result named = cli({"simulate", kConfigs + "/standard.json", "--horizon", "3"});
  ::unsetenv(pco::cli::kOutDirEnv);
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(named.code, 0) << named.err;
  EXPECT_TRUE(fs::exists(root / "simulate" / "trajectory.csv"));
  EXPECT_TRUE(fs::exists(root / "standard-n3" / "trajectory.csv"));
}

TEST(Cli, ClosenessRoundTrip) {
  const fs::path a = scratch("close_a"), b = scratch("close_b"), c = scratch("close_c");
  ASSERT_EQ(cli({"simulate", kConfigs + "/standard.json", "--horizon", "30", "--out", a.string()}).code, 0);
  ASSERT_EQ(cli({"simulate", kConfigs + "/standard.json", "--horizon", "30", "--epsilon", "0.03", "--out",
                 b.string()})
                .code,
            0);
  ASSERT_EQ(cli({"simulate", "--x0", "1,3", "--horizon", "30", "--out", c.string()}).code, 0);
  const std::string ta = (a / "trajectory.csv").string();
  Result r = cli({"closeness", ta, ta, "--tau", "40"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("epsilon_star  0\n"), std::string::npos) << r.out;
  r = cli({"closeness", ta, (b / "trajectory.csv").string(), "--tau", "20"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.find("epsilon_star  0\n"), std::string::npos) << r.out;
  EXPECT_EQ(cli({"closeness", ta, (c / "trajectory.csv").string()}).code, 2);
  EXPECT_EQ(cli({"closeness", ta, (a / "events.csv").string()}).code, 2);
}

TEST(Cli, ReducedCorpusExperiment) {
  const Result r = cli({"experiment", "corpus", "--samples", "200", "--runs", "2", "--out",
                        scratch("corpus").string()});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  EXPECT_NE(r.out.find("property-corpus: PASS"), std::string::npos);
}
