#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <utility>

namespace mjost {

using cplx = std::complex<double>;

struct QuadratureConfig {
  double rel_tol = 1e-12;
  double abs_tol = 1e-15;
  int max_depth = 40;
};

namespace detail {

// 7-point Gauss / 15-point Kronrod pair on [-1, 1], positive half only.
// Index 0 is the centre node; Gauss nodes sit at even indices.
struct Gk15 {
  static const std::array<double, 8>& nodes();
  static const std::array<double, 8>& kronrod_weights();
  static const std::array<double, 4>& gauss_weights();
};

template <std::size_t N>
struct GaussLegendre {
  static const std::array<double, (N + 1) / 2>& nodes();
  static const std::array<double, (N + 1) / 2>& weights();
};

struct PanelEstimate {
  cplx kronrod;
  double error;
  double abs_mass;
};

template <class F>
PanelEstimate gk15_panel(F& f, double a, double b) {
  const auto& x = Gk15::nodes();
  const auto& wk = Gk15::kronrod_weights();
  const auto& wg = Gk15::gauss_weights();
  const double c = 0.5 * (a + b);
  const double r = 0.5 * (b - a);

  const cplx fc = f(c);
  cplx k = fc * wk[0];
  cplx g = fc * wg[0];
  double mass = std::abs(fc) * wk[0];
  for (std::size_t i = 1; i < 8; ++i) {
    const cplx f1 = f(c - r * x[i]);
    const cplx f2 = f(c + r * x[i]);
    k += wk[i] * (f1 + f2);
    mass += wk[i] * (std::abs(f1) + std::abs(f2));
    if (i % 2 == 0) g += wg[i / 2] * (f1 + f2);
  }
  return {k * r, std::abs((k - g) * r), mass * std::abs(r)};
}

template <class F>
cplx adaptive_recurse(F& f, double a, double b, const PanelEstimate& est, double abs_budget,
                      const QuadratureConfig& cfg, int depth, double& err_acc) {
  const double tol = std::max(abs_budget, cfg.rel_tol * est.abs_mass);
  if (est.error <= tol || depth >= cfg.max_depth || !(b - a > 0 ? b - a : a - b)) {
    err_acc += est.error;
    return est.kronrod;
  }
  const double m = 0.5 * (a + b);
  if (m == a || m == b) {
    err_acc += est.error;
    return est.kronrod;
  }
  const PanelEstimate left = gk15_panel(f, a, m);
  const PanelEstimate right = gk15_panel(f, m, b);
  return adaptive_recurse(f, a, m, left, 0.5 * abs_budget, cfg, depth + 1, err_acc) +
         adaptive_recurse(f, m, b, right, 0.5 * abs_budget, cfg, depth + 1, err_acc);
}

}  // namespace detail

/// Adaptive Gauss-Kronrod (G7/K15) integration of a complex-valued integrand by
/// recursive bisection. A panel is accepted once |K15 - G7| is below
/// rel_tol times the panel's estimate of the integral of |f|, so cancelling
/// oscillatory integrands are judged against their absolute mass.
template <class F>
cplx integrate_adaptive(F&& f, double a, double b, const QuadratureConfig& cfg = {},
                        double* abs_error = nullptr) {
  if (a == b) {
    if (abs_error) *abs_error = 0.0;
    return {0.0, 0.0};
  }
  auto&& fn = f;
  double err = 0.0;
  const auto first = detail::gk15_panel(fn, a, b);
  const cplx value = detail::adaptive_recurse(fn, a, b, first, cfg.abs_tol, cfg, 0, err);
  if (abs_error) *abs_error = err;
  return value;
}

/// Fixed N-point Gauss-Legendre rule on [a, b].
template <std::size_t N, class F>
cplx gauss_legendre(F&& f, double a, double b) {
  const auto& x = detail::GaussLegendre<N>::nodes();
  const auto& w = detail::GaussLegendre<N>::weights();
  const double c = 0.5 * (a + b);
  const double r = 0.5 * (b - a);
  cplx sum{0.0, 0.0};
  std::size_t start = 0;
  if constexpr (N % 2 == 1) {
    sum += w[0] * cplx(f(c));
    start = 1;
  }
  for (std::size_t i = start; i < x.size(); ++i) {
    sum += w[i] * (cplx(f(c - r * x[i])) + cplx(f(c + r * x[i])));
  }
  return sum * r;
}

}  // namespace mjost
