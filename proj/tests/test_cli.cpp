#include <gtest/gtest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <json.hpp>

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class CliTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = fs::temp_directory_path() / ("flagmf_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir_);
  }
  static void TearDownTestSuite() { fs::remove_all(dir_); }

  static std::string path(const std::string& name) { return (dir_ / name).string(); }

  /// Runs the CLI with the given arguments; stdout and stderr land in files.
  static int run(const std::string& args) {
    const std::string cmd = std::string(FLAGMF_CLI) + " " + args + " > " + path("stdout.txt") + " 2> " + path("stderr.txt");
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  static std::string slurp(const std::string& file) {
    std::ifstream in(file, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  static void write(const std::string& name, const std::string& text) { std::ofstream(path(name)) << text; }

  static json load(const std::string& name) { return json::parse(slurp(path(name))); }

  static inline fs::path dir_;
};

const char* kThreePath = R"({"kind": "multipath", "paths": [
  {"alpha": [0.5773502691896258, 0], "tau": 50, "omega": 50},
  {"alpha": [0.5773502691896258, 0], "tau": 100, "omega": 100},
  {"alpha": [0.5773502691896258, 0], "tau": 150, "omega": 150}],
  "noise": {"seed": 0, "sigma": 0}})";

TEST_F(CliTest, GenseqWritesSequenceAndManifest) {
  ASSERT_EQ(run("genseq --n 101 --kind flag --slope inf --out " + path("flag.json")), 0);
  const json j = load("flag.json");
  EXPECT_EQ(j.at("n"), 101);
  EXPECT_EQ(j.at("kind"), "flag");
  EXPECT_EQ(j.at("values").size(), 101U);
  const json manifest = load("flag.json.manifest.json");
  EXPECT_EQ(manifest.at("command"), "genseq");
  EXPECT_EQ(manifest.at("outputs").at(0), path("flag.json"));
  EXPECT_TRUE(manifest.contains("version"));
  EXPECT_TRUE(manifest.at("wall_times").contains("generate"));
}

TEST_F(CliTest, GenseqValidation) {
  EXPECT_EQ(run("genseq --n 9 --kind flag"), 2);
  EXPECT_EQ(run("genseq --n 7 --kind weil --torus-b 0 --torus-c 0 --zeta-index 3"), 2);
  EXPECT_EQ(run("genseq --n 7 --kind weil --zeta-index 6"), 2);
  EXPECT_EQ(run("genseq --n 7 --kind chirp"), 2);
  EXPECT_EQ(run("genseq --n 7 --slope up"), 2);
  EXPECT_EQ(run("genseq --kind flag"), 2);
  EXPECT_EQ(run("genseq --n 7 --kind weil --zeta-index 0"), 0);
  EXPECT_NE(slurp(path("stderr.txt")).find("warning: zeta index 0"), std::string::npos);
  EXPECT_EQ(run("genseq --n 7 --kind heisenberg --slope 3 --heis-index 2"), 0);
  EXPECT_EQ(json::parse(slurp(path("stdout.txt"))).at("params").at("slope"), 3);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run(""), 2);
  EXPECT_EQ(run("frobnicate"), 2);
  EXPECT_EQ(run("genseq --n 7 --bogus"), 2);
  EXPECT_EQ(run("--help"), 0);
}

TEST_F(CliTest, SimulateDeterminism) {
  ASSERT_EQ(run("genseq --n 101 --quiet --out " + path("f.json")), 0);
  write("noisy.json", R"({"kind": "single-shift", "paths": [{"alpha": [1, 0], "tau": 3, "omega": 4}],
                          "noise": {"seed": 1, "sigma": 0.1}})");
  const std::string base = "simulate --seq " + path("f.json") + " --config " + path("noisy.json");
  ASSERT_EQ(run(base + " --seed 5 --out " + path("a.json")), 0);
  ASSERT_EQ(run(base + " --seed 5 --out " + path("b.json")), 0);
  ASSERT_EQ(run(base + " --seed 6 --out " + path("c.json")), 0);
  EXPECT_EQ(slurp(path("a.json")), slurp(path("b.json")));
  EXPECT_NE(slurp(path("a.json")), slurp(path("c.json")));
  const json rx = load("a.json");
  EXPECT_EQ(rx.at("kind"), "received");
  EXPECT_EQ(rx.at("values").size(), 101U);
  EXPECT_EQ(rx.at("params").at("scenario").at("noise").at("seed"), 5);
}

TEST_F(CliTest, SimulateRejectsMalformedConfig) {
  ASSERT_EQ(run("genseq --n 31 --quiet --out " + path("f31.json")), 0);
  write("bad1.json", "{ not json");
  write("bad2.json", R"({"kind": "multipath", "paths": [{"alpha": [0.9, 0], "tau": 1, "omega": 1},
                                                         {"alpha": [0.9, 0], "tau": 2, "omega": 1}]})");
  write("bad3.json", R"({"kind": "single-shift", "paths": [{"alpha": 1, "tau": 1, "omega": 1}]})");
  for (const char* cfg : {"bad1.json", "bad2.json", "bad3.json", "missing.json"}) {
    EXPECT_EQ(run("simulate --seq " + path("f31.json") + " --config " + path(cfg)), 2) << cfg;
  }
  EXPECT_EQ(run("simulate --n 37 --seq " + path("f31.json") + " --config " + path("bad2.json")), 2);
}

TEST_F(CliTest, EstimateSingleAndThreePath) {
  ASSERT_EQ(run("genseq --n 101 --kind flag --slope inf --quiet --out " + path("flag101.json")), 0);
  write("single.json", R"({"kind": "single-shift", "paths": [{"alpha": [1, 0], "tau": 50, "omega": 50}]})");
  write("three.json", kThreePath);
  ASSERT_EQ(run("simulate --quiet --seq " + path("flag101.json") + " --config " + path("single.json") + " --out " + path("rx4.json")), 0);
  ASSERT_EQ(run("estimate --rx " + path("rx4.json") + " --flag " + path("flag101.json") + " --out " + path("rep4.json")), 0);
  const json rep4 = load("rep4.json");
  ASSERT_EQ(rep4.at("estimated").at("paths").size(), 1U);
  EXPECT_EQ(rep4.at("estimated").at("paths").at(0).at("tau"), 50);
  EXPECT_EQ(rep4.at("estimated").at("paths").at(0).at("omega"), 50);

  ASSERT_EQ(run("simulate --quiet --seq " + path("flag101.json") + " --config " + path("three.json") + " --out " + path("rx6.json")), 0);
  ASSERT_EQ(run("estimate --paths 3 --rx " + path("rx6.json") + " --flag " + path("flag101.json") + " --out " + path("rep6.json")), 0);
  std::map<long, long> shifts;
  const json rep6 = load("rep6.json");
  for (const auto& p : rep6.at("estimated").at("paths")) shifts[p.at("tau").get<long>()] = p.at("omega").get<long>();
  EXPECT_EQ(shifts, (std::map<long, long>{{49, 49}, {50, 50}, {100, 100}}));
}

TEST_F(CliTest, EstimateFailuresAndMismatch) {
  ASSERT_EQ(run("genseq --n 101 --quiet --out " + path("g101.json")), 0);
  ASSERT_EQ(run("genseq --n 103 --quiet --out " + path("g103.json")), 0);
  write("empty.json", R"({"kind": "single-shift", "paths": [{"alpha": [0, 0], "tau": 0, "omega": 0}],
                          "noise": {"seed": 3, "sigma": 0.05}})");
  ASSERT_EQ(run("simulate --quiet --seq " + path("g101.json") + " --config " + path("empty.json") + " --out " + path("noise.json")), 0);
  EXPECT_EQ(run("estimate --rx " + path("noise.json") + " --flag " + path("g101.json")), 3);
  EXPECT_NE(slurp(path("stderr.txt")).find("no line detected"), std::string::npos);
  EXPECT_EQ(run("estimate --rx " + path("noise.json") + " --flag " + path("g103.json")), 2);
  EXPECT_EQ(run("estimate --rx " + path("noise.json") + " --flag " + path("noise.json")), 2);
}

TEST_F(CliTest, MfFullAndLineAgree) {
  ASSERT_EQ(run("genseq --n 17 --slope 2 --quiet --out " + path("s17.json")), 0);
  write("r17cfg.json", R"({"kind": "single-shift", "paths": [{"alpha": [0.6, 0.2], "tau": 5, "omega": 11}],
                            "noise": {"seed": 4, "sigma": 0.3}})");
  ASSERT_EQ(run("simulate --quiet --seq " + path("s17.json") + " --config " + path("r17cfg.json") + " --out " + path("r17.json")), 0);
  ASSERT_EQ(run("mf --mode full --seq " + path("s17.json") + " --rx " + path("r17.json") + " --out " + path("full.csv")), 0);

  std::map<std::pair<long, long>, std::pair<double, double>> full;
  {
    std::ifstream in(path("full.csv"));
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "tau,omega,re,im,abs");
    while (std::getline(in, line)) {
      long t, w;
      double re, im, ab;
      char c;
      std::istringstream ss(line);
      ss >> t >> c >> w >> c >> re >> c >> im >> c >> ab;
      full[{t, w}] = {re, im};
    }
  }
  ASSERT_EQ(full.size(), 289U);

  for (const std::string slope : {"0", "2", "9", "inf"}) {
    ASSERT_EQ(run("mf --mode line --slope " + slope + " --offset-tau 3 --offset-omega 7 --seq " + path("s17.json") +
                  " --rx " + path("r17.json") + " --out " + path("line.csv")),
              0);
    std::ifstream in(path("line.csv"));
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "t,tau,omega,re,im,abs");
    int rows = 0;
    while (std::getline(in, line)) {
      long k, t, w;
      double re, im, ab;
      char c;
      std::istringstream ss(line);
      ss >> k >> c >> t >> c >> w >> c >> re >> c >> im >> c >> ab;
      const auto expected = full.at({t, w});
      EXPECT_LE(std::hypot(re - expected.first, im - expected.second), 1e-9);
      ++rows;
    }
    EXPECT_EQ(rows, 17);
  }
}

TEST_F(CliTest, MfFullGuard) {
  ASSERT_EQ(run("genseq --n 1009 --quiet --out " + path("s1009.json")), 0);
  EXPECT_EQ(run("mf --mode full --seq " + path("s1009.json")), 2);
  EXPECT_EQ(run("mf --mode diagonal --seq " + path("s1009.json")), 2);
  EXPECT_EQ(run("mf --mode line --seq " + path("s1009.json") + " --out " + path("l1009.csv")), 0);
}

TEST_F(CliTest, BenchCsv) {
  ASSERT_EQ(run("bench --quiet --sizes 101,211 --method flag --batches 3 --min-batch-seconds 0.005 --out " + path("bench.csv")), 0);
  std::ifstream in(path("bench.csv"));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "n,method,seconds,exponent");
  std::getline(in, line);
  EXPECT_EQ(line.rfind("101,flag,", 0), 0U);
  std::getline(in, line);
  EXPECT_EQ(line.rfind("211,flag,", 0), 0U);
  EXPECT_EQ(run("bench --sizes 1009 --method full"), 2);
  EXPECT_EQ(run("bench --sizes 1001"), 2);
  EXPECT_EQ(run("bench --sizes 101 --method fast"), 2);
}

TEST_F(CliTest, ManifestReplayReproducesOutputs) {
  ASSERT_EQ(run("genseq --n 53 --quiet --out " + path("r53.json")), 0);
  write("rcfg.json", R"({"kind": "gps-bit", "bit": -1, "paths": [{"alpha": [0.8, 0], "tau": 2, "omega": 9}],
                         "noise": {"seed": 8, "snr_db": 5}})");
  ASSERT_EQ(run("simulate --quiet --seq " + path("r53.json") + " --config " + path("rcfg.json") + " --out " + path("rx53.json")), 0);
  const std::string first = slurp(path("rx53.json"));
  fs::remove(path("rx53.json"));
  ASSERT_EQ(run("--replay " + path("rx53.json.manifest.json")), 0);
  EXPECT_EQ(slurp(path("rx53.json")), first);
}

TEST_F(CliTest, Selftest) {
  EXPECT_EQ(run("selftest"), 0);
  EXPECT_NE(slurp(path("stdout.txt")).find("all checks passed"), std::string::npos);
}

}  // namespace
