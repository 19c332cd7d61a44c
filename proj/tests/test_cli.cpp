#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "sej/dataset.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Run run_cli(const std::string& args, const sej::testing::TempDir& dir) {
  const auto out = dir.path() / "stdout.txt";
  const auto err = dir.path() / "stderr.txt";
  const std::string cmd = std::string(SEJ_CLI_PATH) + " " + args + " >" + out.string() + " 2>" + err.string();
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST(Cli, SimulateIngestAnalyzeAndRefuseRerun) {
  sej::testing::TempDir dir;
  const auto sim = dir.path() / "sim";
  ASSERT_EQ(run_cli("simulate --seed 11 --out " + sim.string(), dir).code, 0);
  for (const char* f : {"judgments.csv", "outcomes.csv", "questions.csv", "simulation.json"}) {
    EXPECT_TRUE(fs::exists(sim / f)) << f;
  }
  const std::string inputs = " --judgments " + (sim / "judgments.csv").string() + " --outcomes " +
                             (sim / "outcomes.csv").string() + " --questions " + (sim / "questions.csv").string();

  const auto ingested = run_cli("ingest" + inputs, dir);
  ASSERT_EQ(ingested.code, 0) << ingested.err;
  const auto summary = nlohmann::json::parse(ingested.out);
  EXPECT_EQ(summary.at("questions"), 3);
  EXPECT_GT(summary.at("judgment_sets").get<int>(), 0);

  const auto base = dir.path() / "runs";
  const std::string analyze = "analyze" + inputs + " --mc-samples 200 --out " + base.string();
  const auto first = run_cli(analyze, dir);
  ASSERT_EQ(first.code, 0) << first.err;
  const fs::path run_dir(first.out.substr(0, first.out.find('\n')));
  EXPECT_TRUE(fs::exists(run_dir / "manifest.json"));
  EXPECT_TRUE(fs::exists(run_dir / "scores.csv"));

  const auto rerun = run_cli(analyze, dir);
  EXPECT_EQ(rerun.code, 3);
  EXPECT_NE(rerun.err.find("refusing to overwrite"), std::string::npos);
}

TEST(Cli, ValidationErrorsExitTwo) {
  sej::testing::TempDir dir;
  const auto bad = dir.path() / "bad.csv";
  write(bad, std::string(sej::kJudgmentsHeader) + "\nP1,Q1,A,35,3\nP1,Q1,B,30,3\nP1,Q1,C,30,3\nP1,Q1,D,30,3\n");
  const auto r = run_cli("ingest --judgments " + bad.string(), dir);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("row 2"), std::string::npos) << r.err;

  EXPECT_EQ(run_cli("ingest --judgments " + (dir.path() / "missing.csv").string(), dir).code, 2);
  EXPECT_EQ(run_cli("analyze --out x", dir).code, 2);
  EXPECT_EQ(run_cli("surface --sigma2 -1", dir).code, 2);
  EXPECT_EQ(run_cli("nonsense", dir).code, 2);
}

TEST(Cli, SurfaceSingleAndMulti) {
  sej::testing::TempDir dir;
  const auto single = run_cli("surface --sigma2 1 --step 0.1", dir);
  ASSERT_EQ(single.code, 0) << single.err;
  std::istringstream lines(single.out);
  std::string line;
  int rows = 0;
  while (std::getline(lines, line)) ++rows;
  EXPECT_EQ(rows, 1 + 11 * 11);

  const auto out = dir.path() / "grids";
  const auto multi = run_cli("surface --sigma2 1 --sigma2 0.1 --step 0.1 --out " + out.string(), dir);
  ASSERT_EQ(multi.code, 0) << multi.err;
  EXPECT_EQ(std::distance(fs::directory_iterator(out), fs::directory_iterator{}), 2);
}
