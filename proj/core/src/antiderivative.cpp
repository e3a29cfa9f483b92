#include "mjost/antiderivative.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

namespace mjost {

namespace {

constexpr int kChebNodes = 24;
constexpr int kMaxSplit = 8;

// Chebyshev coefficients of ∫_{-1}^{s} g on [-1, 1] from samples of g.
std::vector<cplx> chebyshev_integral(const std::array<cplx, kChebNodes>& g) {
  constexpr int n = kChebNodes;
  static const auto table = [] {
    std::array<std::array<double, n>, n> t{};
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j) t[k][j] = std::cos(std::numbers::pi * k * (j + 0.5) / n);
    return t;
  }();
  std::vector<cplx> c(n + 1, cplx(0.0, 0.0));
  for (int k = 0; k < n; ++k) {
    cplx acc{0.0, 0.0};
    for (int j = 0; j < n; ++j) acc += g[j] * table[k][j];
    c[k] = acc * (2.0 / n);
  }
  c[0] *= 0.5;
  // Integrate term by term: ∫T_0 = T_1, ∫T_1 = T_2/4 (+const), ∫T_k = T_{k+1}/(2(k+1)) - T_{k-1}/(2(k-1)).
  std::vector<cplx> ci(n + 2, cplx(0.0, 0.0));
  for (int k = 1; k <= n; ++k) {
    const cplx prev = c[k - 1] * (k == 1 ? 2.0 : 1.0);
    const cplx next = (k + 1 <= n) ? c[k + 1] : cplx(0.0, 0.0);
    ci[k] = (prev - next) / (2.0 * k);
  }
  // Fix the constant so the value at s = -1 is zero: T_k(-1) = (-1)^k.
  cplx at_minus{0.0, 0.0};
  for (int k = 1; k <= n + 1; ++k) at_minus += (k % 2 == 0 ? 1.0 : -1.0) * ci[k];
  ci[0] = -at_minus;
  return ci;
}

cplx clenshaw(const std::vector<cplx>& c, double s) {
  cplx b1{0.0, 0.0}, b2{0.0, 0.0};
  for (std::size_t k = c.size() - 1; k >= 1; --k) {
    const cplx t = 2.0 * s * b1 - b2 + c[k];
    b2 = b1;
    b1 = t;
  }
  return s * b1 - b2 + c[0];
}

}  // namespace

Antiderivative::Antiderivative(const IntervalFunction& f, const QuadratureConfig&) : f_(f) {
  for (std::size_t i = 0; i < f.size(); ++i) {
    const Piece& p = f.piece(i);
    const double a = f.left(i), b = f.right(i);
    if (const auto* c = std::get_if<Constant>(&p)) {
      add_polynomial({c->value}, a, b);
    } else if (const auto* poly = std::get_if<Polynomial>(&p)) {
      add_polynomial(poly->coeffs, a, b);
    } else {
      const auto& s = std::get<Smooth>(p);
      const double max_len = s.phase_rate > 0.0 ? std::min(1.0, 0.5 * std::numbers::pi / s.phase_rate) : 1.0;
      const int n = std::max(1, static_cast<int>(std::ceil((b - a) / max_len)));
      const double h = (b - a) / n;
      for (int j = 0; j < n; ++j) add_smooth(s, a + j * h, (j + 1 == n) ? b : a + (j + 1) * h, 0);
    }
  }
  starts_.reserve(panels_.size());
  for (const auto& p : panels_) starts_.push_back(p.a);
}

void Antiderivative::add_polynomial(const std::vector<cplx>& c, double a, double b) {
  Panel p;
  p.a = a;
  p.b = b;
  p.base = running_;
  p.coeffs.assign(c.size() + 1, cplx(0.0, 0.0));
  for (std::size_t i = 0; i < c.size(); ++i) p.coeffs[i + 1] = c[i] / static_cast<double>(i + 1);
  cplx total{0.0, 0.0};
  const double t = b - a;
  for (auto it = p.coeffs.rbegin(); it != p.coeffs.rend(); ++it) total = total * t + *it;
  running_ += total;
  panels_.push_back(std::move(p));
}

void Antiderivative::add_smooth(const Smooth& s, double a, double b, int depth) {
  const double c = 0.5 * (a + b), r = 0.5 * (b - a);
  std::array<cplx, kChebNodes> g;
  for (int j = 0; j < kChebNodes; ++j) g[j] = s.eval(c + r * std::cos(std::numbers::pi * (j + 0.5) / kChebNodes));
  std::vector<cplx> ci = chebyshev_integral(g);
  for (auto& v : ci) v *= r;
  const cplx cheb_total = clenshaw(ci, 1.0);
  const cplx gl_total = gauss_legendre<30>(s.eval, a, b);
  double mass = 0.0;
  for (const auto& v : g) mass += std::abs(v);
  mass *= 2.0 * r / kChebNodes;
  // Evaluations of a phase of size ~ rate * |x| carry that much relative noise.
  const double noise = 16.0 * std::numeric_limits<double>::epsilon() * s.phase_rate * std::max(std::abs(a), std::abs(b));
  const double tol = (1e-13 + noise) * (mass + std::abs(gl_total)) + 1e-300;
  if (depth < kMaxSplit && std::abs(cheb_total - gl_total) > tol) {
    add_smooth(s, a, c, depth + 1);
    add_smooth(s, c, b, depth + 1);
    return;
  }
  Panel p;
  p.a = a;
  p.b = b;
  p.chebyshev = true;
  p.base = running_;
  p.coeffs = std::move(ci);
  running_ += cheb_total;
  panels_.push_back(std::move(p));
}

cplx Antiderivative::operator()(double x) const {
  if (panels_.empty() || x <= 0.0) return {0.0, 0.0};
  auto it = std::upper_bound(starts_.begin(), starts_.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - starts_.begin()) - 1;
  const Panel& p = panels_[i];
  const double xc = std::min(x, p.b);
  if (p.chebyshev) {
    const double s = std::clamp((2.0 * xc - p.a - p.b) / (p.b - p.a), -1.0, 1.0);
    return p.base + clenshaw(p.coeffs, s);
  }
  cplx v{0.0, 0.0};
  const double t = xc - p.a;
  for (auto it2 = p.coeffs.rbegin(); it2 != p.coeffs.rend(); ++it2) v = v * t + *it2;
  return p.base + v;
}

}  // namespace mjost
