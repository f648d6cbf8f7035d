// End-to-end checks against the installed binary. Each case shells out via
// popen, captures stdout, and checks the exit code.

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

struct CommandResult {
  int exit_code = -1;
  std::string output;
};

CommandResult run_cli(const std::string& args) {
  const std::string cmd =
      std::string(FOLLOWSIM_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  EXPECT_NE(pipe, nullptr) << cmd;
  CommandResult result;
  char buf[4096];
  while (pipe && fgets(buf, sizeof buf, pipe)) result.output += buf;
  if (pipe) {
    const int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }
  return result;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string temp_path(const std::string& name) {
  return ::testing::TempDir() + name;
}

int count_lines(const std::string& text) {
  int n = 0;
  for (char c : text)
    if (c == '\n') ++n;
  return n;
}

TEST(Cli, NoSubcommandIsUsageError) {
  CommandResult r = run_cli("");
  EXPECT_EQ(r.exit_code, 2);
}

TEST(Cli, UnknownSubcommandIsUsageError) {
  EXPECT_EQ(run_cli("frobnicate").exit_code, 2);
}

TEST(Cli, HelpExitsCleanly) {
  CommandResult r = run_cli("--help");
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_NE(r.output.find("run"), std::string::npos);
  EXPECT_NE(r.output.find("bench"), std::string::npos);
  EXPECT_NE(r.output.find("calibrate"), std::string::npos);
  EXPECT_NE(r.output.find("priors"), std::string::npos);
}

TEST(Cli, PriorsDefaultLayers) {
  CommandResult r = run_cli("priors");
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_NE(r.output.find("38x38x4: 5776"), std::string::npos);
  EXPECT_NE(r.output.find("19x19x6: 2166"), std::string::npos);
  EXPECT_NE(r.output.find("total: 8732"), std::string::npos);
}

TEST(Cli, PriorsCustomLayers) {
  CommandResult r = run_cli("priors --layers 38x4,19x6");
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_NE(r.output.find("total: 7942"), std::string::npos);
  EXPECT_EQ(run_cli("priors --layers 38x4,banana").exit_code, 2);
  EXPECT_EQ(run_cli("priors --layers 0x4").exit_code, 2);
}

TEST(Cli, BenchExactTable) {
  CommandResult r = run_cli("bench --exact");
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_NE(r.output.find("mode: exact samples"), std::string::npos);
  EXPECT_NE(r.output.find("0.43209"), std::string::npos);
  EXPECT_NE(r.output.find("0.21224"), std::string::npos);
  EXPECT_NE(r.output.find("0.23056"), std::string::npos);
  EXPECT_NE(r.output.find("1.87408"), std::string::npos);
}

TEST(Cli, BenchUnknownBackendFails) {
  CommandResult r = run_cli("bench --exact --backend RESNET");
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.output.find("RESNET"), std::string::npos);
}

TEST(Cli, BenchCsvIsDeterministic) {
  const std::string out1 = temp_path("bench1.csv");
  const std::string out2 = temp_path("bench2.csv");
  EXPECT_EQ(run_cli("bench --draws 5000 --seed 11 --out " + out1).exit_code, 0);
  EXPECT_EQ(run_cli("bench --draws 5000 --seed 11 --out " + out2).exit_code, 0);
  const std::string csv1 = slurp(out1);
  EXPECT_EQ(csv1, slurp(out2));
  EXPECT_NE(csv1.find("backend,count,mean,sd,median,p95,min,max"),
            std::string::npos);
  EXPECT_NE(csv1.find("SSD,5000,"), std::string::npos);
  std::remove(out1.c_str());
  std::remove(out2.c_str());
}

TEST(Cli, CalibrateEmitsFragment) {
  const std::string out = temp_path("frag.ini");
  CommandResult r = run_cli("calibrate --out " + out);
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_NE(r.output.find("distance_m"), std::string::npos);
  const std::string frag = slurp(out);
  EXPECT_NE(frag.find("[nav]"), std::string::npos);
  EXPECT_NE(frag.find("x_thr = 0.054191"), std::string::npos);
  EXPECT_NE(frag.find("y_fwd_thr = "), std::string::npos);
  EXPECT_NE(frag.find("y_rev_thr = "), std::string::npos);
  EXPECT_NE(frag.find("[target]"), std::string::npos);
  EXPECT_NE(frag.find("point_cy = 0.156236"), std::string::npos);
  std::remove(out.c_str());
}

TEST(Cli, RunMissingConfigIsIoError) {
  CommandResult r = run_cli("run --config /nonexistent/scenario.ini");
  EXPECT_EQ(r.exit_code, 3);
  EXPECT_NE(r.output.find("error:"), std::string::npos);
}

TEST(Cli, RunBadConfigNamesTheProblem) {
  const std::string cfg = temp_path("bad.ini");
  {
    std::ofstream os(cfg);
    os << "[servo.steering]\nmin = 0.2\n";  // min above mid
  }
  CommandResult r = run_cli("run --config " + cfg);
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.output.find("servo.steering"), std::string::npos);
  std::remove(cfg.c_str());
}

TEST(Cli, RunDefaultScenarioPrintsSummary) {
  CommandResult r = run_cli("run --seed 3");
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_NE(r.output.find("\"metrics\""), std::string::npos);
  EXPECT_NE(r.output.find("\"in_fov_fraction\""), std::string::npos);
  EXPECT_NE(r.output.find("\"bus_publishes\""), std::string::npos);
  EXPECT_NE(r.output.find("\"camera/frame\": 450"), std::string::npos);
}

TEST(Cli, RunTraceIsByteIdenticalAcrossInvocations) {
  const std::string cfg = temp_path("scenario.ini");
  {
    std::ofstream os(cfg);
    os << "[detector]\nbackend = SSD\n[sim]\nduration_s = 4\nseed = 21\n"
       << "[trajectory]\nkind = stationary\nx = 3\ny = 0.5\n";
  }
  const std::string t1 = temp_path("trace1.jsonl");
  const std::string t2 = temp_path("trace2.jsonl");
  EXPECT_EQ(run_cli("run --config " + cfg + " --out " + t1).exit_code, 0);
  EXPECT_EQ(run_cli("run --config " + cfg + " --out " + t2).exit_code, 0);
  const std::string trace = slurp(t1);
  EXPECT_FALSE(trace.empty());
  EXPECT_EQ(trace, slurp(t2));
  // One JSON line per control tick: duration / period = 4 * 15.
  EXPECT_EQ(count_lines(trace), 60);
  EXPECT_NE(trace.find("\"tick\":0"), std::string::npos);
  EXPECT_NE(trace.find("\"case\":"), std::string::npos);
  // A seed override changes the trace.
  const std::string t3 = temp_path("trace3.jsonl");
  EXPECT_EQ(
      run_cli("run --config " + cfg + " --seed 22 --out " + t3).exit_code, 0);
  EXPECT_NE(slurp(t3), trace);
  std::remove(cfg.c_str());
  std::remove(t1.c_str());
  std::remove(t2.c_str());
  std::remove(t3.c_str());
}

TEST(Cli, RunConcurrentModeCompletes) {
  CommandResult r = run_cli("run --mode concurrent --seed 5");
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_NE(r.output.find("\"metrics\""), std::string::npos);
  EXPECT_EQ(run_cli("run --mode sideways").exit_code, 2);
}

TEST(Cli, RunUnwritableTraceIsIoError) {
  CommandResult r = run_cli("run --out /nonexistent/dir/trace.jsonl");
  EXPECT_EQ(r.exit_code, 3);
}

}  // namespace
