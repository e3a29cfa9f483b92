#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "mjost/sweep.hpp"

using namespace mjost;

namespace {

SweepConfig small(PotentialFamily fam, int n = 8) {
  SweepConfig c;
  c.family = std::move(fam);
  c.n_energies = n;
  return c;
}

}  // namespace

TEST(EnergyGrid, LogUniformWithExactEnds) {
  SweepConfig c;
  c.n_energies = 5;
  c.E_min = 0.5;
  c.E_max = 8.0;
  const auto E = energy_grid(c);
  ASSERT_EQ(E.size(), 5u);
  EXPECT_EQ(E.front(), 0.5);
  EXPECT_EQ(E.back(), 8.0);
  for (std::size_t i = 1; i + 1 < E.size(); ++i) EXPECT_NEAR(E[i] / E[i - 1], 2.0, 1e-12);
  c.n_energies = 1;
  EXPECT_EQ(energy_grid(c), std::vector<double>{0.5});
}

TEST(SweepConfig, Validation) {
  SweepConfig c;
  c.M_list = {25.0, 250.0};
  EXPECT_THROW(c.validate(), ParameterError);
  c = {};
  c.M_list = {50.0, 25.0};
  EXPECT_THROW(c.validate(), ParameterError);
  c = {};
  c.n_energies = 0;
  EXPECT_THROW(c.validate(), ParameterError);
  c = {};
  c.E_min = 4.0;
  EXPECT_THROW(c.validate(), ParameterError);
  c = {};
  c.s = 3;
  EXPECT_THROW(c.validate(), ParameterError);
}

TEST(RunSweep, FreeFieldHasZeroTails) {
  const auto out = run_sweep(small(ClassicalL1{IntervalFunction::zero(200.0)}, 4));
  ASSERT_EQ(out.rows.size(), 4u);
  for (const auto& r : out.rows) {
    EXPECT_TRUE(r.fail_reason.empty());
    for (double t : r.b1_tail) EXPECT_EQ(t, 0.0);
    for (double t : r.b2_tail) EXPECT_EQ(t, 0.0);
    for (double v : r.residual) EXPECT_LE(v, 1e-12);
    EXPECT_FALSE(r.bad_flag);
  }
  const auto stats = bad_set_summary(out.rows, {0.1, 1.0});
  for (const auto& s : stats) EXPECT_EQ(s.proportion, 0.0);
}

TEST(RunSweep, FlagIsRecomputableAndSummaryMonotone) {
  const auto cfg = small(power_law_comb(1.0, 2.0, 200.0), 12);
  const auto out = run_sweep(cfg);
  for (const auto& r : out.rows) EXPECT_EQ(r.bad_flag, bad_flag_from_tails(r, cfg.c_threshold, 2));
  const auto stats = bad_set_summary(out.rows, {0.1, 0.5, 1.0, 2.0, 5.0});
  for (std::size_t i = 1; i < stats.size(); ++i) {
    EXPECT_LE(stats[i].proportion, stats[i - 1].proportion);
    EXPECT_LE(stats[i].count, stats[i - 1].count);
    for (std::size_t b = 0; b < 3; ++b) EXPECT_LE(stats[i].box_count[b], stats[i - 1].box_count[b]);
  }
}

TEST(RunSweep, CellLocalSummableCombIsNeverFlagged) {
  const auto out = run_sweep(small(power_law_comb(1.0, 2.0, 200.0, true), 16));
  for (const auto& r : out.rows) EXPECT_FALSE(r.bad_flag) << r.E;
}

TEST(RunSweep, MedianTailDecreasesForSlowComb) {
  const auto out = run_sweep(small(power_law_comb(1.0, 0.8, 200.0, true), 16));
  std::vector<double> med;
  for (std::size_t m = 0; m < 4; ++m) {
    std::vector<double> col;
    for (const auto& r : out.rows) col.push_back(r.b1_tail[m]);
    std::nth_element(col.begin(), col.begin() + col.size() / 2, col.end());
    med.push_back(col[col.size() / 2]);
  }
  for (std::size_t m = 1; m < med.size(); ++m) EXPECT_LT(med[m], med[m - 1]);
}

TEST(RunSweep, ThreadCountDoesNotChangeRows) {
  auto cfg = small(PlusMinusOne{}, 6);
  cfg.X_max = 60.0;
  cfg.M_list = {10.0, 30.0};
  cfg.checkpoints = {30.0, 60.0};
  std::ostringstream a, b;
  write_sweep_csv(a, cfg, run_sweep(cfg).rows);
  cfg.threads = 3;
  write_sweep_csv(b, cfg, run_sweep(cfg).rows);
  EXPECT_EQ(a.str(), b.str());
}

TEST(RunSweep, FailuresAreRecordedPerRow) {
  auto cfg = small(power_law_comb(1.0, 2.0, 40.0), 2);
  cfg.X_max = 40.0;
  cfg.M_list = {10.0};
  cfg.checkpoints = {20.0};
  cfg.jost.integrator.rel_tol = 1e-300;
  cfg.jost.integrator.abs_tol = 1e-300;
  const auto out = run_sweep(cfg);
  ASSERT_EQ(out.rows.size(), 2u);
  for (const auto& r : out.rows) {
    EXPECT_FALSE(r.fail_reason.empty());
    EXPECT_TRUE(std::isnan(r.wronskian_error));
    EXPECT_TRUE(std::isnan(r.b2_tail[0]));
    EXPECT_FALSE(r.bad_flag);
  }
}

TEST(SweepCsv, HeaderAndQuoting) {
  SweepConfig cfg;
  SweepRow r;
  r.E = 1.0;
  r.k = 1.0;
  r.b1_tail.assign(4, 0.5);
  r.b2_tail.assign(4, 0.25);
  r.residual = {0.1, 0.2, 0.0};
  r.wronskian_error = std::nan("");
  r.fail_reason = "step, \"underflow\"";
  std::ostringstream os;
  write_sweep_csv(os, cfg, {r});
  const std::string s = os.str();
  const std::string header =
      "E,k,b1_tail_M25,b1_tail_M50,b1_tail_M100,b1_tail_M150,b2_tail_M25,b2_tail_M50,b2_tail_M100,b2_tail_M150,"
      "resid_x50,resid_x100,resid_x200,wronskian_err,bad_flag,fail_reason\n";
  EXPECT_EQ(s.substr(0, header.size()), header);
  EXPECT_NE(s.find(",nan,false,\"step, \"\"underflow\"\"\"\n"), std::string::npos);
  EXPECT_EQ(checkpoint_label(12.5), "12p5");
}
