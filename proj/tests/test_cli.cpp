// End-to-end runs of the command line tool.

#include <json.hpp>

#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace {

struct CliResult {
  int code = -1;
  std::string out;
};

CliResult run(const std::string& args, const std::string& env = "") {
  std::string cmd = env + (env.empty() ? "" : " ") + CONETORSION_CLI_PATH + " " + args + " 2>/dev/null";
  CliResult r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf;
  std::size_t got;
  while ((got = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), got);
  int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("conetorsion_test_" + name)).string();
}

}  // namespace

TEST(Cli, TorsionCircleReportsHeadlineGap) {
  CliResult r = run("torsion --base sphere:1");
  EXPECT_EQ(r.code, 2);
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["breakdown"]["res_spectral"], "0");
  EXPECT_EQ(j["precision"], 50);
  EXPECT_TRUE(j["audits"]["headline_gap"].is_string());
}

TEST(Cli, OutputIsDeterministic) {
  CliResult a = run("torsion --base sphere:3 --eps 1/2 --eps 1/4");
  CliResult b = run("torsion --base sphere:3 --eps 1/2 --eps 1/4");
  EXPECT_FALSE(a.out.empty());
  EXPECT_EQ(a.out, b.out);
}

TEST(Cli, PrecisionFromEnvironmentAndFlag) {
  auto j = nlohmann::json::parse(run("torsion --base sphere:1", "CONETORSION_PRECISION=25").out);
  EXPECT_EQ(j["precision"], 25);
  j = nlohmann::json::parse(run("torsion --base sphere:1 --precision 30", "CONETORSION_PRECISION=25").out);
  EXPECT_EQ(j["precision"], 30);
  EXPECT_EQ(run("torsion --base sphere:1", "CONETORSION_PRECISION=abc").code, 1);
  EXPECT_EQ(run("torsion --base sphere:1 --precision 10").code, 1);
}

TEST(Cli, ConfigErrors) {
  EXPECT_EQ(run("torsion").code, 1);
  EXPECT_EQ(run("torsion --base klein:3").code, 1);
  EXPECT_EQ(run("torsion --spectrum-file /nonexistent/file.txt").code, 1);
  EXPECT_EQ(run("torsion --base sphere:1 --format xml").code, 1);
  EXPECT_EQ(run("verify --suite nosuch").code, 1);
  EXPECT_EQ(run("spectrum --base sphere:1 --out /nonexistent/dir/s.txt").code, 1);
  EXPECT_EQ(run("").code, 1);
}

TEST(Cli, SpectrumCircle) {
  CliResult r = run("spectrum --base sphere:1 --cutoff 10");
  EXPECT_EQ(r.code, 0);
  std::istringstream is(r.out);
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "dim=1 rank=1");
  std::getline(is, line);
  int lines = 0;
  while (std::getline(is, line)) {
    ++lines;
    EXPECT_EQ(line.substr(line.rfind(',') + 1), "2");
  }
  EXPECT_EQ(lines, 10);
}

TEST(Cli, SpectrumFileRoundTripThroughTorsion) {
  const std::string path = temp_path("s3.txt");
  ASSERT_EQ(run("spectrum --base sphere:3 --cutoff 30 --out " + path).code, 0);
  CliResult r = run("torsion --spectrum-file " + path);
  EXPECT_EQ(r.code, 0);
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["mode"], "approximate");
  EXPECT_TRUE(j["breakdown"]["tors"].is_null());
  std::filesystem::remove(path);
}

TEST(Cli, TableFormatAndDumps) {
  const std::string z = temp_path("z.json"), o = temp_path("o.json"), b = temp_path("b.json");
  CliResult r = run("torsion --base sphere:3 --format table --zeta-out " + z + " --olver-out " + o + " --bclass-out " + b);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("headline_gap"), std::string::npos);
  for (const auto& p : {z, o, b}) {
    std::ifstream f(p);
    ASSERT_TRUE(f.good()) << p;
    EXPECT_NO_THROW(nlohmann::json::parse(f));
    std::filesystem::remove(p);
  }
}

TEST(Cli, VerifySuites) {
  EXPECT_EQ(run("verify --suite scaling").code, 0);
  EXPECT_EQ(run("verify --suite dm --rmax 9").code, 0);
  EXPECT_EQ(run("verify --suite detratio --grid small").code, 0);
  CliResult h = run("verify --suite headline");
  EXPECT_EQ(h.code, 2);
  std::istringstream is(h.out);
  std::string line;
  while (std::getline(is, line)) EXPECT_NO_THROW(nlohmann::json::parse(line));
}
