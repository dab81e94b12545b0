#include <gtest/gtest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct Run {
  int status = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(KLEINIAN_CLI) + " " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int st = pclose(p);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string data(const std::string& name) { return std::string(KLEINIAN_SOURCE_DIR) + "/data/" + name; }

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("kleinian_cli_test_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST(Cli, Solve) {
  const auto r = run("solve");
  EXPECT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("c = 0.000000000000+2.000000000000i"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("fixed(ABab) = -0.500000000000+0.500000000000i"), std::string::npos);
  EXPECT_NE(r.out.find("tr(ABab)^2 = 4.000000000000"), std::string::npos);
}

TEST(Cli, ValidateShippedGog) {
  const auto r = run("validate-gog --input " + data("abc-example.gog"));
  EXPECT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("\npass\n"), std::string::npos);
}

TEST(Cli, ValidateMutatedGogFails) {
  const auto p = scratch("bad.gog");
  std::ofstream(p) << slurp(data("abc-example.gog")) << "edge Ta Tb twoended=true\n";
  const auto r = run("validate-gog --input " + p.string());
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.out.find("clause ii: Ta,Tb"), std::string::npos) << r.out;
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run("").status, 2);
  EXPECT_EQ(run("frobnicate").status, 2);
  EXPECT_EQ(run("dfs --epsilon 0").status, 2);
  EXPECT_EQ(run("dfs --depth banana").status, 2);
  EXPECT_EQ(run("validate-gog").status, 2);
  EXPECT_EQ(run("tree-limit --input /nonexistent/file").status, 2);
  EXPECT_EQ(run("solve --no-such-flag").status, 2);
  EXPECT_EQ(run("solve --help").status, 0);
}

TEST(Cli, ConfigPrecedenceAndEcho) {
  const auto cfg = scratch("run.cfg");
  std::ofstream(cfg) << "epsilon=0.01\ndepth=4\n";
  const auto r = run("dfs --config " + cfg.string() + " --epsilon 0.005");
  EXPECT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("# epsilon=0.005\n"), std::string::npos);
  EXPECT_NE(r.out.find("# depth=4\n"), std::string::npos);
  std::ofstream(cfg) << "colour=red\n";
  EXPECT_EQ(run("solve --config " + cfg.string()).status, 2);
}

TEST(Cli, DfsIsByteDeterministic) {
  const auto a = scratch("a"), b = scratch("b");
  const std::string args = " --epsilon 0.01 --depth 7 --resolution 64 --seeds " + data("hw-seeds.packing");
  ASSERT_EQ(run("dfs --out " + a.string() + args).status, 0);
  ASSERT_EQ(run("dfs --threads 3 --out " + b.string() + args).status, 0);
  for (const char* ext : {".circles", ".points", ".ppm", ".svg"}) {
    const auto x = slurp(a.string() + ext), y = slurp(b.string() + ext);
    EXPECT_FALSE(x.empty()) << ext;
    // Headers echo the thread count; bodies must agree.
    EXPECT_EQ(x.substr(x.find("radius=")), y.substr(y.find("radius="))) << ext;
  }
  ASSERT_EQ(run("dfs --out " + b.string() + args).status, 0);
  for (const char* ext : {".circles", ".points", ".stats", ".ppm", ".svg"})
    EXPECT_EQ(slurp(a.string() + ext), slurp(b.string() + ext)) << ext;
  EXPECT_FALSE(fs::exists(a.string() + ".circles.tmp"));
}

TEST(Cli, VerifyGasketFile) {
  const auto p = scratch("quad.packing");
  std::ofstream(p) << "L 0 -1 0\nL 0 1 1\nC 0 0.5 0.5\nC 1 0.5 0.5\n";
  auto r = run("verify-gasket --input " + p.string());
  EXPECT_EQ(r.status, 0);
  auto j = nlohmann::json::parse(r.out);
  EXPECT_TRUE(j["report"]["pass"].get<bool>());
  EXPECT_EQ(j["report"]["quadruples"].get<int>(), 1);
  std::ofstream(p) << "L 0 -1 0\nL 0 1 1\nC 0 0.5 0.5\nC 1 0.5 0.45\n";
  r = run("verify-gasket --input " + p.string());
  EXPECT_EQ(r.status, 1);
  EXPECT_FALSE(nlohmann::json::parse(r.out)["report"]["pass"].get<bool>());
}

TEST(Cli, VerifyGasketFromDfs) {
  const auto r = run("verify-gasket --epsilon 0.01 --depth 8");
  EXPECT_EQ(r.status, 0) << r.out;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["source"], "dfs");
  EXPECT_LT(j["report"]["worst_residual"].get<double>(), 1e-5);
}

TEST(Cli, TreeLimitAndCuts) {
  auto r = run("tree-limit --input " + data("wedge.tree"));
  EXPECT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("diameter=3"), std::string::npos);
  EXPECT_NE(r.out.find("\n0 1 2 3\n"), std::string::npos);
  r = run("cuts --input " + data("theta.edges"));
  EXPECT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("pair n s components=3 flagged=true"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("vertex n cut_valency=1 local_valency=3"), std::string::npos);
}

TEST(Cli, PointsAndBench) {
  auto r = run("points --depth 5 --marking " + data("hw.marking"));
  EXPECT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("inf inf 1 a"), std::string::npos);
  r = run("bench --depth 8 --epsilon 0.01");
  EXPECT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("words_per_second="), std::string::npos);
}

TEST(Cli, PresetFile) {
  const auto r = run("solve --config " + std::string(KLEINIAN_SOURCE_DIR) + "/presets/hw-gasket.cfg --depth 3");
  EXPECT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("# preset=hw-gasket\n"), std::string::npos);
  EXPECT_NE(r.out.find("# depth=3\n"), std::string::npos);
}
