#include <odereduce/odereduce.hpp>

#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

namespace fs = std::filesystem;
using namespace odereduce;

namespace {

struct CliRun {
  int status = -1;
  std::string out;
};

CliRun run(const std::string& args) {
  const std::string cmd = std::string(ODEREDUCE_CLI) + " " + args + " 2>/dev/null";
  CliRun r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  std::size_t got;
  while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
  const int st = pclose(pipe);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::string sample(const std::string& name) { return std::string(ODEREDUCE_SAMPLES) + "/" + name; }

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("odereduce_cli_" + std::to_string(::getpid()));
  fs::create_directories(d);
  return d / name;
}

void write_file(const fs::path& p, const std::string& s) { std::ofstream(p) << s; }

bool contains(const std::string& hay, const std::string& needle) { return hay.find(needle) != std::string::npos; }

}  // namespace

TEST(Cli, ReduceAbelExample) {
  const CliRun r = run("reduce --degree-a 4 " + sample("ex21.txt"));
  EXPECT_EQ(r.status, 0);
  EXPECT_TRUE(contains(r.out, "B = x^6*y^2 + 2*x^4*y^3")) << r.out;
  EXPECT_TRUE(contains(r.out, "ode: (2*x)*y' = (2*x)*y^3 + (-2*x - 2)*y^2")) << r.out;
}

TEST(Cli, ReduceDominantPrintsFamily) {
  const CliRun r = run("reduce --degree-a 4 --print-candidates " + sample("ex22.txt"));
  EXPECT_TRUE(r.status == 0 || r.status == 1);
  EXPECT_TRUE(contains(r.out, "ode:")) << r.out;
}

TEST(Cli, OversizedBound) {
  const CliRun r = run("reduce --degree-a 5 --print-candidates " + sample("ex21.txt"));
  EXPECT_EQ(r.status, 1);
  EXPECT_TRUE(contains(r.out, "no reduction found")) << r.out;
  EXPECT_TRUE(contains(r.out, "family:")) << r.out;
}

TEST(Cli, OversizedBoundNine) {
  const CliRun r = run("reduce --degree-a 9 " + sample("ex21.txt"));
  EXPECT_EQ(r.status, 1);
  EXPECT_TRUE(contains(r.out, "no reduction found for degreeA = 9"));
}

TEST(Cli, ReduceJsonRoundTripsThroughVerify) {
  const CliRun r = run("reduce --json --degree-a 4 " + sample("ex21.txt"));
  ASSERT_EQ(r.status, 0);
  const auto j = nlohmann::json::parse(r.out);
  ASSERT_EQ(j.at("reductions").size(), 1u);
  const fs::path cert = scratch("cert.json");
  write_file(cert, j["reductions"][0].dump());
  const CliRun v = run("verify " + sample("ex21.txt") + " " + cert.string());
  EXPECT_EQ(v.status, 0);
  EXPECT_EQ(v.out, "verified\n");
}

TEST(Cli, ReduceJsonInput) {
  std::ifstream in(sample("ex21.txt"));
  const OdeProblem p = read_problem(in);
  const fs::path f = scratch("ex21.json");
  write_file(f, problem_to_json(p).dump());
  EXPECT_EQ(run("reduce " + f.string()).status, 0);
}

TEST(Cli, Budget) {
  EXPECT_EQ(run("reduce --degree-a 8 --max-seconds 0.001 " + sample("ex21.txt")).status, 3);
}

TEST(Cli, BadInput) {
  EXPECT_EQ(run("reduce " + sample("missing.txt")).status, 2);
  const fs::path f = scratch("bad.txt");
  write_file(f, "M = y^x\nN = 1\ndegreeA = 2\n");
  EXPECT_EQ(run("reduce " + f.string()).status, 2);
  write_file(f, "M = y\nN = 1\n");
  EXPECT_EQ(run("reduce " + f.string()).status, 2);
  EXPECT_EQ(run("reduce --degree-a 1 " + f.string()).status, 1);
  EXPECT_EQ(run("bogus").status, 2);
  EXPECT_EQ(run("").status, 2);
  EXPECT_EQ(run("factor \"x*\"").status, 2);
  EXPECT_EQ(run("factor 0").status, 2);
}

TEST(Cli, Expand) {
  const CliRun r = run("expand " + sample("square.spec"));
  EXPECT_EQ(r.status, 0);
  EXPECT_TRUE(contains(r.out, "M = y^5\n"));
  EXPECT_TRUE(contains(r.out, "N = 2\n"));
  EXPECT_TRUE(contains(r.out, "# c = y\n"));

  const fs::path id = scratch("identity.spec");
  write_file(id, "n = 3\nA = y\nB = 1\nf3 = 1\n");
  const CliRun i = run("expand " + id.string());
  EXPECT_EQ(i.status, 0);
  EXPECT_TRUE(contains(i.out, "M = y^3\n"));
  EXPECT_TRUE(contains(i.out, "N = 1\n"));

  EXPECT_EQ(run("expand " + sample("zero_b.spec")).status, 2);

  const fs::path out = scratch("ex21_out.txt");
  EXPECT_EQ(run("expand " + sample("abel21.spec") + " -o " + out.string()).status, 0);
  std::ifstream a(out), b(sample("ex21.txt"));
  std::stringstream sa, sb;
  sa << a.rdbuf();
  sb << b.rdbuf();
  EXPECT_EQ(sa.str(), sb.str());
}

TEST(Cli, Factor) {
  const CliRun r = run("factor \"x^2-y^2\"");
  EXPECT_EQ(r.status, 0);
  EXPECT_TRUE(r.out == "(x - y)*(x + y)\n" || r.out == "(x + y)*(x - y)\n") << r.out;
  EXPECT_EQ(run("factor \"-2*(x*y-2)^2\"").out, "-2*(x*y - 2)^2\n");
}

TEST(Cli, Verify) {
  EXPECT_EQ(run("verify " + sample("ex21.txt") + " " + sample("cert21.txt")).status, 0);
  const fs::path bad = scratch("bad_cert.txt");
  std::ifstream in(sample("cert21.txt"));
  std::stringstream ss;
  ss << in.rdbuf();
  std::string s = ss.str();
  const auto at = s.find("c = ");
  s = s.substr(0, at) + "c = 1\n" + s.substr(s.find('\n', at) + 1);
  write_file(bad, s);
  const CliRun v = run("verify " + sample("ex21.txt") + " " + bad.string());
  EXPECT_EQ(v.status, 1);
  EXPECT_EQ(v.out, "not verified\n");
}

TEST(Cli, GenCorpus) {
  const fs::path dir = scratch("corpus");
  fs::remove_all(dir);
  const CliRun r = run("gen-corpus --count 50 --seed 7 --n 3 --out " + dir.string());
  EXPECT_EQ(r.status, 0);
  int files = 0;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".txt") ++files;
  EXPECT_EQ(files, 50);
  std::ifstream mf(dir / "manifest.json");
  const auto m = nlohmann::json::parse(mf);
  ASSERT_EQ(m.at("instances").size(), 50u);
  // spot-check one instance against its certificate
  const auto& e = m["instances"][3];
  const fs::path cert = scratch("corpus_cert.json");
  write_file(cert, e.at("certificate").dump());
  EXPECT_EQ(run("verify " + (dir / e.at("file").get<std::string>()).string() + " " + cert.string()).status, 0);
  EXPECT_EQ(run("gen-corpus --count 1 --n 5 --out " + dir.string()).status, 2);
}
