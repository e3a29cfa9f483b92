#include <gtest/gtest.h>

#include <random>

#include "mjost/multilinear.hpp"
#include "support/oracles.hpp"

using namespace mjost;

namespace {

struct RandomPc {
  std::vector<double> bp;
  std::vector<cplx> values;
  IntervalFunction f;
};

RandomPc random_pc(std::mt19937_64& rng, int pieces, double x_max) {
  std::uniform_real_distribution<double> u(0.0, 1.0), v(-1.0, 1.0);
  RandomPc r;
  std::vector<double> cuts;
  for (int i = 0; i < pieces - 1; ++i) cuts.push_back(u(rng) * x_max);
  std::sort(cuts.begin(), cuts.end());
  r.bp.push_back(0.0);
  r.bp.insert(r.bp.end(), cuts.begin(), cuts.end());
  r.bp.push_back(x_max);
  std::vector<Piece> p;
  for (int i = 0; i < pieces; ++i) {
    r.values.emplace_back(v(rng), v(rng));
    p.push_back(Constant{r.values.back()});
  }
  r.f = IntervalFunction(r.bp, p, ValueKind::complex);
  return r;
}

std::vector<bool> as_flags(const ConjugationPattern& p) {
  std::vector<bool> out;
  for (Conj c : p) out.push_back(c == Conj::conjugate);
  return out;
}

}  // namespace

TEST(Patterns, SeriesPatternEndsConjugatedAndAlternates) {
  const auto p = series_pattern(5);
  ASSERT_EQ(p.size(), 5u);
  EXPECT_EQ(p.back(), Conj::conjugate);
  for (std::size_t i = 1; i < p.size(); ++i) EXPECT_NE(p[i], p[i - 1]);
  const auto a = alternating_pattern(4);
  EXPECT_EQ(a.front(), Conj::plain);
  EXPECT_EQ(a[1], Conj::conjugate);
}

TEST(MultilinearSignature, MatchesPolynomialOracleOnRandomPiecewiseConstants) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const auto pc = random_pc(rng, 10, 6.0);
    for (int n = 1; n <= 5; ++n) {
      const auto pat = series_pattern(n);
      const cplx got = m_n(pc.f, pat, 0.7, 5.2);
      const cplx ref = oracle::iterated_pc(pc.bp, pc.values, as_flags(pat), 0.7, 5.2);
      EXPECT_NEAR(std::abs(got - ref), 0.0, 1e-12 * std::max(1.0, std::abs(ref))) << trial << " " << n;
    }
  }
}

TEST(MultilinearSignature, ChenConcatenation) {
  std::mt19937_64 rng(11);
  const auto pc = random_pc(rng, 8, 4.0);
  const auto pat = alternating_pattern(4);
  const auto s_ac = interval_signature(pc.f, pat, 0.0, 4.0);
  const auto prod = interval_signature(pc.f, pat, 0.0, 1.7) * interval_signature(pc.f, pat, 1.7, 4.0);
  for (std::size_t a = 0; a <= 4; ++a)
    for (std::size_t b = a; b <= 4; ++b) EXPECT_NEAR(std::abs(s_ac(a, b) - prod(a, b)), 0.0, 1e-13);
}

TEST(MultilinearSignature, SmoothFunctionAgainstNestedQuadrature) {
  const auto f = IntervalFunction::smooth(3.0, [](double x) { return std::polar(1.0 / (1.0 + x), 2.0 * x); }, 2.0,
                                          ValueKind::complex);
  for (int n = 1; n <= 3; ++n) {
    const auto pat = series_pattern(n);
    const cplx a = m_n(f, pat, 0.0, 3.0);
    const cplx b = m_n_nested(f, pat, 0.0, 3.0);
    EXPECT_NEAR(std::abs(a - b) / std::abs(b), 0.0, 1e-9) << n;
  }
}

TEST(IteratedTails, EachOrderIsATailIntegral) {
  std::mt19937_64 rng(3);
  const auto pc = random_pc(rng, 6, 5.0);
  const auto pat = series_pattern(4);
  std::vector<double> grid;
  for (int i = 0; i <= 20; ++i) grid.push_back(0.25 * i);
  const auto tab = iterated_tails(pc.f, pat, grid, 5.0, 4);
  ASSERT_EQ(tab.values.size(), 5u);
  for (std::size_t i = 0; i < grid.size(); i += 3) {
    EXPECT_EQ(tab.values[0][i], cplx(1.0));
    for (int n = 1; n <= 4; ++n) {
      const ConjugationPattern last(pat.end() - n, pat.end());
      const cplx ref = oracle::iterated_pc(pc.bp, pc.values, as_flags(last), grid[i], 5.0);
      EXPECT_NEAR(std::abs(tab.values[n][i] - ref), 0.0, 1e-12) << i << " " << n;
    }
  }
  const std::vector<double> bad{1.0, 0.5, 5.0};
  EXPECT_THROW(iterated_tails(pc.f, pat, bad, 5.0, 4), ParameterError);
}

TEST(MaximalOperator, BoundsTheFullIntervalValue) {
  std::mt19937_64 rng(5);
  const auto pc = random_pc(rng, 10, 8.0);
  const auto pat = series_pattern(3);
  const auto grid = oscillation_grid(pc.f, 8.0, 4.0);
  for (double b : pc.bp) EXPECT_NE(std::find(grid.begin(), grid.end(), b), grid.end());
  const auto all = maximal_m_n_all(pc.f, pat, grid);
  ASSERT_EQ(all.size(), 3u);
  EXPECT_GE(all[2], std::abs(m_n(pc.f, pat, 0.0, 8.0)) - 1e-14);
  const auto capped = oscillation_grid(pc.f, 8.0, 1000.0, 50);
  EXPECT_LE(capped.size(), 50u);
}

TEST(FactorialBound, ValidatesOrderRange) {
  const auto f = IntervalFunction::constant(4.0, cplx(0.5, 0.1), ValueKind::complex);
  const auto ms = MartingaleStructure::uniform(4.0, 4);
  EXPECT_THROW(factorial_bound_report(f, ms, 0, 4.0), ParameterError);
  EXPECT_THROW(factorial_bound_report(f, ms, 9, 4.0), ParameterError);
  const auto rep = factorial_bound_report(f, ms, 3, 4.0);
  ASSERT_EQ(rep.r.size(), 3u);
  // For a constant f the supremum of |M_n| is |c|^n L^n / n!.
  for (int n = 1; n <= 3; ++n)
    EXPECT_NEAR(rep.m_star[n - 1], std::pow(std::abs(cplx(0.5, 0.1)) * 4.0, n) / std::tgamma(n + 1.0), 1e-12);
}
