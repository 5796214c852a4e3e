#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <string>

#include <nlohmann/json.hpp>

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(MINLAB_CLI) + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), buf.size(), pipe)) r.out += buf.data();
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

const std::string kData = MINLAB_DATA_DIR;

}  // namespace

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("--bogus").code, 2);
  EXPECT_EQ(run("minimal --spec").code, 2);
  EXPECT_EQ(run("scenario nope").code, 2);
  EXPECT_EQ(run("validate --spec /nonexistent.json").code, 2);
  EXPECT_EQ(run("transition --spec " + kData + "/q1.json --t 1 --level 8 --scheme weird").code, 2);
}

TEST(Cli, Validate) {
  auto r = run("validate --spec " + kData + "/q1.json --rows 20");
  ASSERT_EQ(r.code, 0);
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["conservative"], true);
  EXPECT_EQ(j["single_birth"], true);
}

TEST(Cli, TransitionJson) {
  auto r = run("transition --spec " + kData + "/two_state.json --t 1 --level 1");
  ASSERT_EQ(r.code, 0);
  auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j["p"][0][0].get<double>(), 0.567667641618, 1e-11);
}

TEST(Cli, Regular) {
  auto r = run("regular --spec " + kData + "/q2.json --method series");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(nlohmann::json::parse(r.out)["verdict"], "nonregular-numerical");
}

TEST(Cli, Compare) {
  auto r = run("compare --spec1 " + kData + "/bounded_low.json --spec2 " + kData +
               "/bounded_high.json --mmax 2 --kmax 4 --t 1");
  ASSERT_EQ(r.code, 0);
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["generator"]["verdict"], "holds");
  EXPECT_EQ(j["process"]["verdict"], "holds");
}

TEST(Cli, ScenarioKirstein) {
  auto r = run("scenario kirstein");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(nlohmann::json::parse(r.out)["pass"], true);
}

TEST(Cli, TransitionAtZeroIsIdentity) {
  auto r = run("transition --spec " + kData + "/two_state.json --t 0");
  ASSERT_EQ(r.code, 0);
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["p"], nlohmann::json::parse("[[1.0, 0.0], [0.0, 1.0]]"));
}

TEST(Cli, GlobalOptionAfterSubcommand) {
  auto r = run("scenario footnote --alpha 1");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(nlohmann::json::parse(r.out)["findings"]["regime"], "regular");
}
