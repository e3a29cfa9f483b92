#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "mjost/antiderivative.hpp"
#include "mjost/interval_function.hpp"
#include <boost/math/quadrature/gauss.hpp>

#include "support/oracles.hpp"

using namespace mjost;

TEST(Quadrature, AdaptiveSine) {
  const cplx v = integrate_adaptive([](double x) { return cplx(std::sin(x), 0.0); }, 0.0, std::numbers::pi);
  EXPECT_NEAR(v.real(), 2.0, 1e-13);
}

TEST(Quadrature, GaussLegendreExactForDegree2NMinus1) {
  // ∫_0^1 x^19 = 1/20 with the 10-point rule.
  const cplx v = gauss_legendre<10>([](double x) { return cplx(std::pow(x, 19), 0.0); }, 0.0, 1.0);
  EXPECT_NEAR(v.real(), 1.0 / 20.0, 1e-15);
}

TEST(IntervalFunction, RejectsBadBreakpoints) {
  EXPECT_THROW(IntervalFunction({0.0}, {}), ParameterError);
  EXPECT_THROW(IntervalFunction({0.5, 1.0}, {Constant{1.0}}), ParameterError);
  EXPECT_THROW(IntervalFunction({0.0, 1.0, 1.0}, {Constant{1.0}, Constant{2.0}}), ParameterError);
  EXPECT_THROW(IntervalFunction({0.0, 1.0, 2.0}, {Constant{1.0}}), ParameterError);
}

TEST(IntervalFunction, PolynomialIntegrationIsExact) {
  // 1 + 2t + 3t^2 on [0, 2] and constant 5 on [2, 3].
  const IntervalFunction f({0.0, 2.0, 3.0}, {Polynomial{{1.0, 2.0, 3.0}}, Constant{5.0}});
  EXPECT_DOUBLE_EQ(f.integrate(0.0, 2.0).real(), 2.0 + 4.0 + 8.0);
  EXPECT_DOUBLE_EQ(f.integrate(0.5, 2.5).real(), (2.0 + 4.0 + 8.0) - (0.5 + 0.25 + 0.125) + 2.5);
  EXPECT_DOUBLE_EQ(f(1.0).real(), 6.0);
  EXPECT_DOUBLE_EQ(f(2.0).real(), 5.0);
}

TEST(IntervalFunction, IntegrationIsAdditive) {
  const auto f = IntervalFunction::smooth(10.0, [](double x) { return cplx(std::cos(x * x), std::sin(x)); }, 20.0);
  const cplx whole = f.integrate(0.0, 10.0);
  const cplx parts = f.integrate(0.0, 3.3) + f.integrate(3.3, 7.1) + f.integrate(7.1, 10.0);
  EXPECT_NEAR(std::abs(whole - parts), 0.0, 1e-11);
}

TEST(IntervalFunction, AbsPowerIntegral) {
  // |t - 1| on [0, 2]: L^1 = 1, L^2 = 2/3.
  const IntervalFunction f({0.0, 2.0}, {Polynomial{{-1.0, 1.0}}});
  EXPECT_NEAR(f.abs_power_integral(0.0, 2.0, 1.0), 1.0, 1e-15);
  EXPECT_NEAR(f.abs_power_integral(0.0, 2.0, 2.0), 2.0 / 3.0, 1e-15);
}

TEST(IntervalFunction, ArithmeticOnMergedBreakpoints) {
  const IntervalFunction f({0.0, 1.0, 3.0}, {Constant{2.0}, Polynomial{{0.0, 1.0}}});
  const IntervalFunction g({0.0, 2.0, 3.0}, {Constant{1.0}, Constant{-1.0}});
  const auto h = f * g - g;
  EXPECT_EQ(h.breakpoints().size(), 4u);
  for (double x : {0.5, 1.5, 2.5}) EXPECT_NEAR(std::abs(h(x) - (f(x) * g(x) - g(x))), 0.0, 1e-15);
  EXPECT_TRUE(h.piecewise_polynomial());
}

TEST(Antiderivative, MatchesClosedFormForSmoothPieces) {
  const auto f = IntervalFunction::smooth(30.0, [](double x) { return cplx(std::sin(x), 0.0); }, 1.0);
  const Antiderivative F(f);
  for (double x : {0.0, 1.0, 7.5, 29.99, 30.0}) EXPECT_NEAR(F(x).real(), 1.0 - std::cos(x), 1e-13);
}

TEST(Antiderivative, OscillatoryIntegrandAgainstIndependentPanels) {
  // cos(x^2) on [0, 20]; oracle: Boost 20-point Gauss-Legendre on panels of length 1/400.
  const auto f = IntervalFunction::smooth(20.0, [](double x) { return cplx(std::cos(x * x), 0.0); }, 40.0);
  const Antiderivative F(f);
  double oracle = 0.0;
  for (int i = 0; i < 8000; ++i) {
    const double a = i / 400.0, b = (i + 1) / 400.0;
    oracle += boost::math::quadrature::gauss<double, 20>::integrate([](double x) { return std::cos(x * x); }, a, b);
  }
  EXPECT_NEAR(F(20.0).real(), oracle, 1e-11);
}
