#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include "mjost_cli/config.hpp"

namespace fs = std::filesystem;
using namespace mjost;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

fs::path workdir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("mjost_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Run run(const std::string& command, const std::string& config, const std::string& extra = "") {
  static int counter = 0;
  const std::string tag = std::to_string(counter++);
  const fs::path cfg = workdir() / ("cfg" + tag + ".json");
  const fs::path out = workdir() / ("out" + tag + ".csv");
  const fs::path err = workdir() / ("err" + tag + ".txt");
  std::ofstream(cfg) << config;
  const std::string cmd = std::string(MJOST_EXE) + " " + command + " --config " + cfg.string() + " " + extra +
                          " > " + out.string() + " 2> " + err.string();
  const int status = std::system(cmd.c_str());
  return {WEXITSTATUS(status), slurp(out), slurp(err)};
}

std::vector<std::vector<std::string>> rows(const std::string& csv) {
  std::vector<std::vector<std::string>> out;
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> f;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    out.push_back(f);
  }
  return out;
}

const char* kFree = R"({"X_max": 20, "potential": {"family": "classical_l1", "tau": {"type": "constant", "value": 0}},)";
const char* kWeakComb = R"({"X_max": 60, "potential": {"family": "power_comb", "amplitude": 0.05, "alpha": 2},)";

}  // namespace

TEST(Cli, DecomposeUnitTau) {
  const auto r = run("decompose",
                     R"({"X_max": 3, "potential": {"family": "classical_l1", "tau": {"type": "constant", "value": 1}}})");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "j,sigma_l2_cell,tau_l1_cell\n0,0,1\n1,0,1\n2,0,1\n");
}

TEST(Cli, MissingFamilyIsAConfigError) {
  const auto r = run("decompose", R"({"X_max": 3, "potential": {}})");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("potential.family"), std::string::npos);
  const auto r2 = run("decompose", R"({"X_max": 3})");
  EXPECT_EQ(r2.code, 2);
  EXPECT_NE(r2.err.find("potential.family"), std::string::npos);
}

TEST(Cli, UnknownKeysAndForeignBlocksAreRejected) {
  auto r = run("decompose", R"({"X_max": 3, "potential": {"family": "plus_minus_one", "alpah": 2}})");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("potential.alpah"), std::string::npos);
  r = run("jost", R"({"X_max": 3, "potential": {"family": "plus_minus_one"}, "jost": {"E": 1, "nmax": 2}})");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("jost.nmax"), std::string::npos);
  r = run("sweep", R"({"X_max": 3, "potential": {"family": "plus_minus_one"}, "jost": {"E": 1}})");
  EXPECT_EQ(r.code, 2);
  r = run("decompose", R"({"X_max": 3, "potential": {"family": "oscillatory", "a": 0, "b": 0.5}})");
  EXPECT_EQ(r.code, 2);
  r = run("decompose", "{not json");
  EXPECT_EQ(r.code, 2);
}

TEST(Cli, JostFreeFieldResidualsVanish) {
  const auto r = run("jost", std::string(kFree) + R"("jost": {"E": 1, "output_spacing": 0.5}})");
  ASSERT_EQ(r.code, 0);
  const auto t = rows(r.out);
  ASSERT_EQ(t.size(), 42u);
  EXPECT_EQ(t[0], (std::vector<std::string>{"x", "re_u", "im_u", "re_uq", "im_uq", "resid_q", "resid_tau"}));
  for (std::size_t i = 1; i < t.size(); ++i) EXPECT_LT(std::stod(t[i][5]), 1e-10);
}

TEST(Cli, JostSeriesOrderZeroIsTheWkbFunction) {
  const auto r = run("jost", std::string(kWeakComb) + R"("jost": {"E": 1, "method": "series", "n_max": 0}})");
  ASSERT_EQ(r.code, 0);
  const auto t = rows(r.out);
  for (std::size_t i = 1; i < t.size(); ++i) EXPECT_LT(std::stod(t[i][5]), 1e-14);
}

TEST(Cli, SeriesAndDirectAgreeOnWeakComb) {
  const auto a = run("jost", std::string(kWeakComb) + R"("jost": {"E": 1, "method": "direct"}})");
  const auto b = run("jost", std::string(kWeakComb) + R"("jost": {"E": 1, "method": "series", "n_max": 8}})");
  ASSERT_EQ(a.code, 0);
  ASSERT_EQ(b.code, 0);
  const auto ta = rows(a.out), tb = rows(b.out);
  ASSERT_EQ(ta.size(), tb.size());
  double diff = 0.0;
  for (std::size_t i = 1; i < ta.size(); ++i) {
    ASSERT_EQ(ta[i][0], tb[i][0]);
    diff = std::max(diff, std::abs(std::stod(ta[i][1]) - std::stod(tb[i][1])));
  }
  EXPECT_LE(diff, 1e-4);
}

TEST(Cli, IntegratorFailureExitsWithPartialOutput) {
  const auto r = run("jost", std::string(kWeakComb) + R"("jost": {"E": 1, "rel_tol": 1e-300, "abs_tol": 1e-300}})");
  EXPECT_EQ(r.code, 3);
  const auto t = rows(r.out);
  ASSERT_GE(t.size(), 2u);
  EXPECT_EQ(t.back()[1], "nan");
}

TEST(Cli, SweepSingleEnergyAndDeterminism) {
  const std::string cfg = std::string(kWeakComb) +
                          R"("sweep": {"n_energies": 1, "M_list": [10, 30], "checkpoints": [30, 60]}})";
  const auto a = run("sweep", cfg);
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(rows(a.out).size(), 2u);
  const auto b = run("sweep", cfg, "--threads 2");
  EXPECT_EQ(a.out, b.out);
}

TEST(Cli, PlusMinusOneSweepConservesWronskian) {
  const auto r = run("sweep", R"({"X_max": 200, "potential": {"family": "plus_minus_one"},
                                  "sweep": {"n_energies": 6}})");
  ASSERT_EQ(r.code, 0);
  const auto t = rows(r.out);
  ASSERT_EQ(t.size(), 7u);
  const std::size_t col = 2 + 4 + 4 + 3;
  ASSERT_EQ(t[0][col], "wronskian_err");
  for (std::size_t i = 1; i < t.size(); ++i) EXPECT_LT(std::stod(t[i][col]), 1e-6);
}

TEST(Cli, SweepWritesSummaryFile) {
  const fs::path summary = workdir() / "summary.csv";
  const auto r = run("sweep", std::string(kWeakComb) + R"("sweep": {"n_energies": 3, "M_list": [10, 30],
      "checkpoints": [30, 60], "c_grid": [0.01, 1], "summary_path": ")" + summary.string() + R"("}})");
  ASSERT_EQ(r.code, 0);
  const auto t = rows(slurp(summary));
  ASSERT_EQ(t.size(), 3u);
  EXPECT_EQ(t[0][0], "c");
}

TEST(Cli, MartingaleAndSeriesCheckRun) {
  const std::string pot = R"({"X_max": 20, "potential": {"family": "power_comb", "alpha": 2},)";
  const auto m = run("martingale", pot + R"("martingale": {"M_max": 4, "p": 1.5}})");
  ASSERT_EQ(m.code, 0);
  const auto tm = rows(m.out);
  EXPECT_EQ(tm[0][0], "kind");
  EXPECT_EQ(tm.size(), 1u + 30u + 2u * (4u + 2u) + 3u);
  EXPECT_EQ(tm.back()[5], "0");  // no violations
  const auto s = run("series-check", pot + R"("series_check": {"n_max": 3, "oracle_x1": 3}})");
  ASSERT_EQ(s.code, 0);
  const auto ts = rows(s.out);
  ASSERT_EQ(ts.size(), 4u);
  for (std::size_t i = 1; i < ts.size(); ++i) EXPECT_LT(std::stod(ts[i][9]), 1e-8);
  EXPECT_EQ(s.out, run("series-check", pot + R"("series_check": {"n_max": 3, "oracle_x1": 3}})").out);
}

TEST(Cli, OutputFlagWritesFile) {
  const fs::path out = workdir() / "flag_out.csv";
  const auto r = run("decompose", R"({"X_max": 2, "potential": {"family": "plus_minus_one"}})",
                     "--output " + out.string());
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  EXPECT_EQ(rows(slurp(out)).size(), 3u);
}

TEST(ConfigParser, DefaultsAndOverrides) {
  const auto rc = cli::parse_config(R"({"potential": {"family": "oscillatory", "a": -1, "b": 2},
                                        "sweep": {"n_energies": 3, "s": 1}})",
                                    cli::Command::sweep);
  EXPECT_EQ(rc.X_max, 200.0);
  EXPECT_EQ(rc.sweep.n_energies, 3);
  EXPECT_EQ(rc.sweep.s, 1);
  EXPECT_EQ(rc.sweep.M_list, (std::vector<double>{25, 50, 100, 150}));
  EXPECT_TRUE(std::holds_alternative<Oscillatory>(rc.family));
  EXPECT_THROW(cli::parse_command("plot"), cli::ConfigError);
}
