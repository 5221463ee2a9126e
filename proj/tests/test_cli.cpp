#include <gtest/gtest.h>
#include <sys/wait.h>

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "negric/sweep.hpp"

using namespace negric;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + "'" NEGRIC_CLI_PATH "' " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return r;
  char buf[4096];
  std::size_t got;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  for (std::string line; std::getline(is, line);)
    if (!line.empty()) out.push_back(line);
  return out;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream is(line);
  for (std::string cell; std::getline(is, cell, ',');) out.push_back(cell);
  return out;
}

class ScratchDir {
 public:
  ScratchDir() : path_(fs::temp_directory_path() / ("negric_cli_" + std::to_string(::getpid()))) {
    fs::create_directories(path_);
  }
  ~ScratchDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

}  // namespace

TEST(Cli, DecideBoundaryExample) {
  const auto r = run("decide --family Qn --n 8 --a 1 --d -5/2");
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j.at("decision").at("answer"), "no");
  EXPECT_EQ(j.at("decision").at("l"), 6);
  EXPECT_EQ(j.at("decision").at("witness").at("iota_8"), "0");
  EXPECT_EQ(j.at("profile").at("f_p"), "7/2");
}

TEST(Cli, DecideYes) {
  const auto j = nlohmann::json::parse(run("decide --family Qn --n 6 --a 1 --d -1").out);
  EXPECT_EQ(j.at("decision").at("answer"), "yes");
  const auto l = nlohmann::json::parse(run("decide --family Ln --n 4 --a 1 --d -2").out);
  EXPECT_EQ(l.at("decision").at("answer"), "yes");
}

TEST(Cli, SweepMatchesTheTwoInequalities) {
  const auto r = run("sweep --family Qn --n 6 --a -3..3:1/2 --d -3..3:1/4 --threads 3");
  ASSERT_EQ(r.code, 0);
  const auto rows = lines(r.out);
  ASSERT_EQ(rows.front(), "a,d,T,iota_4,iota_5,iota_6,l,answer,sign_flipped");
  ASSERT_EQ(rows.size(), 1u + 13 * 25);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto cells = split(rows[i]);
    ASSERT_EQ(cells.size(), 9u);
    const Rational a = parse_rational(cells[0]), d = parse_rational(cells[1]);
    if (a == 0 && d == 0) {
      EXPECT_EQ(cells[7], "nilpotent");
      continue;
    }
    auto region = [](const Rational& x, const Rational& y) { return 2 * x + y > 0 && 3 * x + 2 * y > 0; };
    const bool yes = region(a, d) || region(-a, -d);
    EXPECT_EQ(cells[7], yes ? "yes" : "no") << rows[i];
    EXPECT_EQ(cells[8], yes && !region(a, d) ? "true" : "false") << rows[i];
  }
}

TEST(Cli, SweepIsByteIdenticalAcrossRunsAndThreadCounts) {
  const std::string args = "sweep --family Qn --n 8 --a -2..2:1/3 --d -2..2:1/2";
  const auto one = run(args + " --threads 1"), many = run(args + " --threads 4"), again = run(args + " --threads 4");
  ASSERT_EQ(one.code, 0);
  EXPECT_EQ(one.out, many.out);
  EXPECT_EQ(many.out, again.out);
  const auto j = run(args + " --format json");
  ASSERT_EQ(j.code, 0);
  EXPECT_NO_THROW((void)nlohmann::json::parse(j.out));
}

TEST(Cli, ConstructThenCertify) {
  ScratchDir dir;
  const auto r = run("construct --family Qn --n 6 --a 1 --d -1 --out metric.json", "NEGRIC_OUTPUT_DIR='" + dir.path().string() + "'");
  ASSERT_EQ(r.code, 0);
  const fs::path file = dir.path() / "metric.json";
  ASSERT_TRUE(fs::exists(file));
  const auto doc = nlohmann::json::parse(std::ifstream(file));
  EXPECT_TRUE(doc.at("certified").get<bool>());
  const auto c = run("certify --metric '" + file.string() + "'");
  EXPECT_EQ(c.code, 0);
  EXPECT_TRUE(nlohmann::json::parse(c.out).at("certificate").at("negative_definite").get<bool>());
}

TEST(Cli, CertifyFailsOnAFlatMetric) {
  ScratchDir dir;
  ASSERT_EQ(run("construct --family Qn --n 6 --a 1 --d -1 --out '" + (dir.path() / "m.json").string() + "'").code, 0);
  auto doc = nlohmann::json::parse(std::ifstream(dir.path() / "m.json"));
  // dropping every bracket leaves an abelian algebra, whose Ricci operator vanishes
  doc["algebra"]["brackets"] = nlohmann::json::array();
  std::ofstream(dir.path() / "flat.json") << doc.dump();
  EXPECT_EQ(run("certify --metric '" + (dir.path() / "flat.json").string() + "'").code, 3);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run("construct --family Qn --n 6 --a 1 --d -8/5").code, 2);
  EXPECT_EQ(run("decide --family Qn --n 6 --a 1 --d 1/0x").code, 4);
  EXPECT_EQ(run("decide --family Qn --n 6").code, 4);
  EXPECT_EQ(run("").code, 4);
  EXPECT_EQ(run("certify --metric /nonexistent/negric/metric.json").code, 5);
  EXPECT_EQ(run("decide --family Qn --n 7 --a 1 --d 1").code, 6);
  EXPECT_EQ(run("decide --family Qn --n 6 --a 0 --d 0").code, 6);
  EXPECT_EQ(run("necessity-test --family Qn --n 6 --a 1 --d -8/5 --samples 20 --seed 3").code, 0);
}

TEST(Cli, CatalogAndRicci) {
  const auto cat = run("catalog --family Qn --n 8");
  ASSERT_EQ(cat.code, 0);
  EXPECT_NO_THROW((void)nlohmann::json::parse(cat.out));
  const auto ric = run("ricci --family Qn --n 6 --x 0,0,0,0,0,0");
  ASSERT_EQ(ric.code, 0);
  EXPECT_NO_THROW((void)nlohmann::json::parse(ric.out));
}

TEST(Range, Parsing) {
  const auto r = parse_range("-3..3:1/2");
  EXPECT_EQ(r.lo, -3);
  EXPECT_EQ(r.hi, 3);
  EXPECT_EQ(r.step, Rational(1, 2));
  EXPECT_EQ(r.values().size(), 13u);
  // without a colon the step follows the last slash
  const auto s = parse_range("-3..3/1/2");
  EXPECT_EQ(s.hi, 3);
  EXPECT_EQ(s.step, 2);
  const auto c = parse_range("-1/2..1/2:1/4");
  EXPECT_EQ(c.lo, Rational(-1, 2));
  EXPECT_EQ(c.values().size(), 5u);
  EXPECT_EQ(parse_range("0..1/1").values().size(), 2u);
  EXPECT_THROW(parse_range("0..1"), Error);
  EXPECT_THROW(parse_range("1..0/1"), Error);
  EXPECT_THROW(parse_range("0..1/0"), Error);
  EXPECT_THROW(parse_range("0-1/1"), Error);
}
