#include <sys/wait.h>

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "strobo/cli/report.hpp"
#include "strobo/cli/run.hpp"

using namespace strobo;
using namespace strobo::cli;
namespace fs = std::filesystem;

namespace {

const std::string kData = STROBO_DATA_DIR;
const std::string kCli = STROBO_CLI_PATH;

std::string sys(const std::string& name) { return kData + "/systems/" + name + ".json"; }

struct Run {
  int code = -1;
  std::string out;
};

Run run_cli(const std::string& args) {
  const std::string cmd = "'" + kCli + "' " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() / ("strobo-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter_++));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  static inline int counter_ = 0;
  fs::path path_;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunConfig config(const std::string& command, const std::string& system) {
  RunConfig c;
  c.command = command;
  c.system_path = system;
  c.steps = 500;
  return c;
}

}  // namespace

TEST(Cli, BellDebugPrintsTable) {
  auto r = run_cli("bell-debug 4 2");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "B_{4,2}: 2 term(s)\n  b=(0,2,0)  coeff 3\n  b=(1,0,1)  coeff 4\n");
}

TEST(Cli, BellDebugRejectsBadArity) { EXPECT_EQ(run_cli("bell-debug 2 3").code, 2); }

TEST(Cli, VerifyCosineSystemPasses) {
  auto r = run_cli("verify '" + sys("cos_ell2") + "' --ell 2 --samples 3 --seed 7");
  ASSERT_EQ(r.code, 0);
  auto rep = nlohmann::json::parse(r.out);
  validate_report(rep);
  EXPECT_EQ(rep["schema"], kReportSchema);
  EXPECT_EQ(rep["command"], "verify");
  EXPECT_EQ(rep["summary"]["verdict"], "pass");
  EXPECT_LE(rep["summary"]["max_identity_residual"].get<double>(), 1e-7);
  EXPECT_EQ(rep["results"].size(), 3u);
  EXPECT_EQ(rep["config"]["seed"], 7);
}

TEST(Cli, VerifyNegativeControlExitsOne) {
  auto r = run_cli("verify '" + sys("negative_control") + "' --ell 2 --samples 2");
  EXPECT_EQ(r.code, 1);
  auto rep = nlohmann::json::parse(r.out);
  EXPECT_EQ(rep["summary"]["verdict"], "hypothesis-failed");
}

TEST(Cli, VerifyNeedsEll) { EXPECT_EQ(run_cli("verify '" + sys("cos_ell2") + "'").code, 2); }

TEST(Cli, ZeroSamplesGiveEmptyResults) {
  auto r = run_cli("table '" + sys("linear") + "' --samples 0");
  ASSERT_EQ(r.code, 0);
  auto rep = nlohmann::json::parse(r.out);
  EXPECT_TRUE(rep["results"].is_array());
  EXPECT_TRUE(rep["results"].empty());
}

TEST(Cli, ExplicitPointsAndOrderOverride) {
  auto r = run_cli("table '" + sys("linear") + "' --point 1.0 --point -0.5 --order 2 --steps 400");
  ASSERT_EQ(r.code, 0);
  auto rep = nlohmann::json::parse(r.out);
  ASSERT_EQ(rep["results"].size(), 2u);
  EXPECT_EQ(rep["results"][0]["f"].size(), 2u);
  EXPECT_EQ(rep["config"]["order"], 2);
  const double f1 = rep["results"][0]["f"][0][0];
  EXPECT_NEAR(f1, 0.7 * 2 * std::numbers::pi, 1e-9);
}

TEST(Cli, WrongPointDimensionIsUsageError) {
  EXPECT_EQ(run_cli("table '" + sys("planar_ell2") + "' --point 1.0").code, 2);
}

TEST(Cli, FindOrbitConvergesToLimitCycle) {
  auto r = run_cli("find-orbit '" + sys("vdp_radial") + "' --guess 1.5 --eps 0.01");
  ASSERT_EQ(r.code, 0);
  auto rep = nlohmann::json::parse(r.out);
  EXPECT_EQ(rep["summary"]["status"], "converged");
  EXPECT_NEAR(rep["results"][0]["zero"][0].get<double>(), 2.0, 1e-6);
  EXPECT_LE(rep["results"][0]["validation"]["periodicity_residual"].get<double>(), 1e-4);
}

TEST(Cli, FindOrbitNoConvergenceExitsOne) {
  auto r = run_cli("find-orbit '" + sys("vdp_radial") + "' --guess 5 --max-iterations 1");
  EXPECT_EQ(r.code, 1);
  auto rep = nlohmann::json::parse(r.out);
  EXPECT_EQ(rep["summary"]["status"], "no-convergence");
  EXPECT_EQ(rep["summary"]["residual_trace"].size(), 2u);
}

TEST(Cli, ErrorsExitTwo) {
  TempDir tmp;
  EXPECT_EQ(run_cli("table '" + tmp.file("missing.json") + "'").code, 2);
  {
    std::ofstream(tmp.file("bad.json")) << "{\"dim\": 1, \"period\": \"2*pi\", \"order\": 1, \"fields\": {\"1\": [\"x1 +\"]}}";
  }
  EXPECT_EQ(run_cli("table '" + tmp.file("bad.json") + "'").code, 2);
  EXPECT_EQ(run_cli("table '" + sys("linear") + "' --out '" + tmp.file("no/such/dir/r.json") + "'").code, 2);
  EXPECT_EQ(run_cli("no-such-command").code, 2);
  EXPECT_EQ(run_cli("").code, 2);
}

TEST(Cli, ReportFileRoundTrip) {
  TempDir tmp;
  const std::string path = tmp.file("r.json");
  auto r = run_cli("table '" + sys("planar_ell2") + "' --samples 2 --steps 300 --out '" + path + "'");
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  auto rep = read_report(path);
  EXPECT_NO_THROW(validate_report(rep));
  EXPECT_EQ(rep["system"]["dim"], 2);
  EXPECT_EQ(rep["results"].size(), 2u);
  EXPECT_EQ(rep["results"][0]["z"].size(), 2u);
}

TEST(Cli, OutputIsDeterministicApartFromTimestamp) {
  TempDir tmp;
  const std::string args = "verify '" + sys("planar_ell2") + "' --ell 2 --samples 2 --seed 11 --steps 300 --out ";
  ASSERT_EQ(run_cli(args + "'" + tmp.file("a.json") + "'").code, 0);
  ASSERT_EQ(run_cli(args + "'" + tmp.file("b.json") + "'").code, 0);
  auto a = slurp(tmp.file("a.json")), b = slurp(tmp.file("b.json"));
  auto strip = [](std::string s) {
    auto ja = nlohmann::json::parse(s);
    ja.erase("generated_at");
    return ja.dump(2);
  };
  EXPECT_EQ(strip(a), strip(b));
  // only the timestamp line may differ
  std::istringstream sa(a), sb(b);
  std::string la, lb;
  int differing = 0;
  while (std::getline(sa, la) && std::getline(sb, lb)) {
    if (la != lb) {
      ++differing;
      EXPECT_NE(la.find("generated_at"), std::string::npos) << la;
    }
  }
  EXPECT_LE(differing, 1);
}

TEST(Report, ValidationRejectsIncompleteDocuments) {
  auto r = make_report("table");
  EXPECT_THROW(validate_report(r), ReportError);  // no system yet
  r["system"] = nlohmann::json::object();
  EXPECT_NO_THROW(validate_report(r));
  auto bad = r;
  bad["schema"] = "other/1";
  EXPECT_THROW(validate_report(bad), ReportError);
  bad = r;
  bad.erase("results");
  EXPECT_THROW(validate_report(bad), ReportError);
  bad = r;
  bad["command"] = "frobnicate";
  EXPECT_THROW(validate_report(bad), ReportError);
  auto bell = make_report("bell-debug");
  EXPECT_NO_THROW(validate_report(bell));
}

TEST(Report, ReadErrors) {
  TempDir tmp;
  EXPECT_THROW(read_report(tmp.file("nope.json")), IoError);
  std::ofstream(tmp.file("x.json")) << "not json";
  EXPECT_THROW(read_report(tmp.file("x.json")), ReportError);
}

TEST(Execute, SeededPointsAreReproducibleAndInBox) {
  RunConfig c = config("table", sys("planar_ell2"));
  c.samples = 4;
  c.seed = 3;
  c.box = 0.5;
  auto p = resolve_points(c, 2);
  auto q = resolve_points(c, 2);
  EXPECT_EQ(p, q);
  ASSERT_EQ(p.size(), 4u);
  for (const auto& z : p) {
    for (double v : z) {
      EXPECT_GE(v, -0.5);
      EXPECT_LT(v, 0.5);
    }
  }
  c.seed = 4;
  EXPECT_NE(resolve_points(c, 2), p);
  c.box = 0.0;
  EXPECT_THROW(resolve_points(c, 2), UsageError);
}

TEST(Execute, InProcessVerify) {
  RunConfig c = config("verify", sys("cos_ell2"));
  c.ell = 2;
  c.points = {{0.5}, {-1.0}};
  std::ostringstream out, err;
  EXPECT_EQ(execute(c, out, err), kExitOk);
  auto rep = nlohmann::json::parse(out.str());
  EXPECT_EQ(rep["summary"]["closure"], "checked");
  EXPECT_EQ(rep["results"][1]["z"][0], -1.0);
}

TEST(Execute, InProcessVerifyBelowClosureOrder) {
  RunConfig c = config("verify", sys("cos_ell2"));
  c.ell = 2;
  c.order = 3;
  c.points = {{0.5}};
  std::ostringstream out, err;
  EXPECT_EQ(execute(c, out, err), kExitOk);
  auto rep = nlohmann::json::parse(out.str());
  EXPECT_EQ(rep["summary"]["closure"], "not computable at this order");
  EXPECT_TRUE(rep["summary"]["max_closure_residual"].is_null());
}

TEST(Execute, NonPeriodicSystemWarnsInTableAndFailsVerify) {
  TempDir tmp;
  const std::string path = tmp.file("np.json");
  std::ofstream(path) << R"js({"name": "t", "dim": 1, "period": "2*pi", "order": 2, "fields": {"1": ["t*x1"], "2": ["x1"]}})js";
  {
    RunConfig c = config("table", path);
    c.points = {{1.0}};
    std::ostringstream out, err;
    EXPECT_EQ(execute(c, out, err), kExitOk);
    auto rep = nlohmann::json::parse(out.str());
    EXPECT_FALSE(rep["warnings"].empty());
    EXPECT_GT(rep["summary"]["periodicity_violations"].get<int>(), 0);
    EXPECT_NE(err.str().find("period"), std::string::npos);
  }
  {
    RunConfig c = config("verify", path);
    c.ell = 2;
    c.points = {{1.0}};
    std::ostringstream out, err;
    EXPECT_EQ(execute(c, out, err), kExitError);
  }
}

TEST(Execute, IntegrationFailureExitsOne) {
  TempDir tmp;
  const std::string path = tmp.file("blow.json");
  std::ofstream(path) << R"js({"name": "t", "dim": 1, "period": "1", "order": 1, "fields": {"1": ["exp(exp(exp(x1)))"]}})js";
  RunConfig c = config("table", path);
  c.points = {{3.0}};
  std::ostringstream out, err;
  EXPECT_EQ(execute(c, out, err), kExitFail);
  EXPECT_NE(err.str().find("step"), std::string::npos);
}

TEST(Execute, SpatialOrderBelowMinimumIsUsageError) {
  RunConfig c = config("table", sys("cos_ell2"));
  c.spatial_order = 1;
  std::ostringstream out, err;
  EXPECT_EQ(execute(c, out, err), kExitError);
}
