#include "mjost/interval_function.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace mjost {

namespace {

constexpr double kPanelPhase = std::numbers::pi / 2.0;

bool is_polynomial_like(const Piece& p) { return !std::holds_alternative<Smooth>(p); }

std::vector<cplx> as_coeffs(const Piece& p) {
  if (const auto* c = std::get_if<Constant>(&p)) return {c->value};
  return std::get<Polynomial>(p).coeffs;
}

Piece make_poly_piece(std::vector<cplx> coeffs) {
  while (coeffs.size() > 1 && coeffs.back() == cplx(0.0, 0.0)) coeffs.pop_back();
  if (coeffs.empty()) return Constant{0.0};
  if (coeffs.size() == 1) return Constant{coeffs[0]};
  return Polynomial{std::move(coeffs)};
}

cplx poly_eval(std::span<const cplx> c, double t) {
  cplx acc{0.0, 0.0};
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * t + *it;
  return acc;
}

cplx poly_integral(std::span<const cplx> c, double ta, double tb) {
  cplx acc{0.0, 0.0};
  double pa = ta, pb = tb;
  for (std::size_t i = 0; i < c.size(); ++i) {
    acc += c[i] * ((pb - pa) / static_cast<double>(i + 1));
    pa *= ta;
    pb *= tb;
  }
  return acc;
}

std::vector<cplx> poly_mul(std::span<const cplx> a, std::span<const cplx> b) {
  std::vector<cplx> out(a.size() + b.size() - 1, cplx(0.0, 0.0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

std::vector<cplx> poly_add(std::span<const cplx> a, std::span<const cplx> b, double sign) {
  std::vector<cplx> out(std::max(a.size(), b.size()), cplx(0.0, 0.0));
  for (std::size_t i = 0; i < a.size(); ++i) out[i] += a[i];
  for (std::size_t i = 0; i < b.size(); ++i) out[i] += sign * b[i];
  return out;
}

bool real_coeffs(std::span<const cplx> c) {
  return std::all_of(c.begin(), c.end(), [](cplx v) { return v.imag() == 0.0; });
}

// Real roots of a real polynomial of degree <= 2 strictly inside (lo, hi).
std::vector<double> real_roots_in(std::span<const cplx> c, double lo, double hi) {
  std::vector<double> roots;
  const std::size_t deg = c.size() - 1;
  if (deg == 1) {
    const double a = c[1].real(), b = c[0].real();
    if (a != 0.0) roots.push_back(-b / a);
  } else if (deg == 2) {
    const double a = c[2].real(), b = c[1].real(), d = c[0].real();
    const double disc = b * b - 4.0 * a * d;
    if (disc >= 0.0) {
      const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
      if (q != 0.0) {
        roots.push_back(d / q);
        roots.push_back(q / a);
      } else {
        roots.push_back(0.0);
      }
    }
  }
  std::vector<double> inside;
  for (double r : roots)
    if (r > lo && r < hi) inside.push_back(r);
  std::sort(inside.begin(), inside.end());
  return inside;
}

int panel_count(double rate, double length) {
  if (rate <= 0.0) return 1;
  return std::max(1, static_cast<int>(std::ceil(rate * length / kPanelPhase)));
}

}  // namespace

std::vector<cplx> shift_polynomial(std::span<const cplx> coeffs, double shift) {
  // Repeated synthetic division (Taylor shift).
  std::vector<cplx> c(coeffs.begin(), coeffs.end());
  const std::size_t n = c.size();
  for (std::size_t i = 0; i + 1 < n; ++i)
    for (std::size_t j = n - 1; j > i; --j) c[j - 1] += shift * c[j];
  return c;
}

cplx eval_piece(const Piece& p, double left, double x) {
  switch (p.index()) {
    case 0:
      return std::get<Constant>(p).value;
    case 1:
      return poly_eval(std::get<Polynomial>(p).coeffs, x - left);
    default:
      return std::get<Smooth>(p).eval(x);
  }
}

cplx integrate_piece(const Piece& p, double left, double a, double b, const QuadratureConfig& cfg) {
  if (a == b) return {0.0, 0.0};
  switch (p.index()) {
    case 0:
      return std::get<Constant>(p).value * (b - a);
    case 1:
      return poly_integral(std::get<Polynomial>(p).coeffs, a - left, b - left);
    default: {
      const auto& s = std::get<Smooth>(p);
      const int n = panel_count(s.phase_rate, std::abs(b - a));
      const double h = (b - a) / n;
      cplx sum{0.0, 0.0};
      for (int i = 0; i < n; ++i) {
        const double pa = a + i * h;
        const double pb = (i + 1 == n) ? b : a + (i + 1) * h;
        sum += integrate_adaptive(s.eval, pa, pb, cfg);
      }
      return sum;
    }
  }
}

IntervalFunction::IntervalFunction() : IntervalFunction({0.0, 1.0}, {Constant{0.0}}) {}

IntervalFunction::IntervalFunction(std::vector<double> breakpoints, std::vector<Piece> pieces,
                                   ValueKind kind) {
  if (breakpoints.size() < 2) throw ParameterError("IntervalFunction: need at least two breakpoints");
  if (breakpoints.front() != 0.0) throw ParameterError("IntervalFunction: first breakpoint must be 0");
  for (std::size_t i = 1; i < breakpoints.size(); ++i)
    if (!(breakpoints[i] > breakpoints[i - 1]))
      throw ParameterError("IntervalFunction: breakpoints must be strictly increasing");
  if (pieces.size() + 1 != breakpoints.size())
    throw ParameterError("IntervalFunction: piece count must equal interval count");
  for (const auto& p : pieces)
    if (const auto* s = std::get_if<Smooth>(&p); s && !s->eval)
      throw ParameterError("IntervalFunction: smooth piece without evaluator");
  auto d = std::make_shared<Data>();
  d->breakpoints = std::move(breakpoints);
  d->pieces = std::move(pieces);
  d->kind = kind;
  data_ = std::move(d);
}

IntervalFunction IntervalFunction::constant(double x_max, cplx value, ValueKind kind) {
  if (!(x_max > 0.0)) throw ParameterError("IntervalFunction: x_max must be positive");
  return IntervalFunction({0.0, x_max}, {Constant{value}}, kind);
}

IntervalFunction IntervalFunction::smooth(double x_max, std::function<cplx(double)> eval,
                                          double phase_rate, ValueKind kind,
                                          std::vector<double> breakpoints) {
  if (breakpoints.empty()) breakpoints = {0.0, x_max};
  std::vector<Piece> pieces(breakpoints.size() - 1, Piece{Smooth{eval, phase_rate}});
  return IntervalFunction(std::move(breakpoints), std::move(pieces), kind);
}

std::size_t IntervalFunction::locate(double x) const {
  const auto& bp = data_->breakpoints;
  auto it = std::upper_bound(bp.begin(), bp.end(), x);
  if (it == bp.begin()) return 0;
  const std::size_t idx = static_cast<std::size_t>(it - bp.begin()) - 1;
  return std::min(idx, size() - 1);
}

cplx IntervalFunction::eval_in(std::size_t i, double x) const {
  return eval_piece(data_->pieces[i], data_->breakpoints[i], x);
}

cplx IntervalFunction::integrate(double a, double b, const QuadratureConfig& cfg) const {
  if (a > b) return -integrate(b, a, cfg);
  a = std::max(a, 0.0);
  b = std::min(b, x_max());
  if (!(b > a)) return {0.0, 0.0};
  cplx sum{0.0, 0.0};
  for (std::size_t i = locate(a); i < size() && left(i) < b; ++i) {
    const double lo = std::max(a, left(i));
    const double hi = std::min(b, right(i));
    if (hi > lo) sum += integrate_piece(piece(i), left(i), lo, hi, cfg);
  }
  return sum;
}

double IntervalFunction::abs_power_integral(double a, double b, double q, const QuadratureConfig& cfg) const {
  if (a > b) std::swap(a, b);
  a = std::max(a, 0.0);
  b = std::min(b, x_max());
  if (!(b > a)) return 0.0;
  double sum = 0.0;
  for (std::size_t i = locate(a); i < size() && left(i) < b; ++i) {
    const double lo = std::max(a, left(i));
    const double hi = std::min(b, right(i));
    if (!(hi > lo)) continue;
    const Piece& p = piece(i);
    const double l = left(i);
    if (const auto* c = std::get_if<Constant>(&p)) {
      sum += std::pow(std::abs(c->value), q) * (hi - lo);
      continue;
    }
    if (const auto* poly = std::get_if<Polynomial>(&p)) {
      const auto& co = poly->coeffs;
      if (q == 2.0) {
        std::vector<cplx> cc(co.size());
        std::transform(co.begin(), co.end(), cc.begin(), [](cplx v) { return std::conj(v); });
        sum += poly_integral(poly_mul(co, cc), lo - l, hi - l).real();
        continue;
      }
      if (q == 1.0 && real_coeffs(co) && co.size() <= 3) {
        std::vector<double> cuts{lo - l};
        for (double r : real_roots_in(co, lo - l, hi - l)) cuts.push_back(r);
        cuts.push_back(hi - l);
        for (std::size_t k = 0; k + 1 < cuts.size(); ++k)
          sum += std::abs(poly_integral(co, cuts[k], cuts[k + 1]).real());
        continue;
      }
    }
    const double rate = phase_rate(i);
    auto integrand = [&](double x) { return cplx(std::pow(std::abs(eval_piece(p, l, x)), q), 0.0); };
    const int n = panel_count(rate, hi - lo);
    const double h = (hi - lo) / n;
    for (int k = 0; k < n; ++k) {
      const double pa = lo + k * h;
      const double pb = (k + 1 == n) ? hi : lo + (k + 1) * h;
      sum += integrate_adaptive(integrand, pa, pb, cfg).real();
    }
  }
  return sum;
}

double IntervalFunction::phase_rate(std::size_t i) const {
  if (const auto* s = std::get_if<Smooth>(&piece(i))) return s->phase_rate;
  return 0.0;
}

double IntervalFunction::sup_abs(std::size_t i) const {
  const Piece& p = piece(i);
  if (const auto* c = std::get_if<Constant>(&p)) return std::abs(c->value);
  const double len = right(i) - left(i);
  if (const auto* poly = std::get_if<Polynomial>(&p)) {
    double bound = 0.0, pw = 1.0;
    for (const auto& c : poly->coeffs) {
      bound += std::abs(c) * pw;
      pw *= len;
    }
    return bound;
  }
  double m = 0.0;
  constexpr int kSamples = 32;
  for (int k = 0; k <= kSamples; ++k) m = std::max(m, std::abs(eval_in(i, left(i) + len * k / kSamples)));
  return m;
}

bool IntervalFunction::piecewise_polynomial() const {
  return std::all_of(data_->pieces.begin(), data_->pieces.end(), is_polynomial_like);
}

bool IntervalFunction::piece_is_constant(std::size_t i) const {
  return std::holds_alternative<Constant>(piece(i));
}

std::vector<double> merge_breakpoints(std::span<const double> a, std::span<const double> b) {
  const double top = std::min(a.back(), b.back());
  std::vector<double> out;
  out.reserve(a.size() + b.size());
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  std::vector<double> clean;
  clean.reserve(out.size());
  for (double x : out) {
    if (x > top) break;
    if (!clean.empty() && x - clean.back() <= 1e-13 * std::max(1.0, std::abs(x))) continue;
    clean.push_back(x);
  }
  if (clean.back() < top) {
    if (top - clean.back() <= 1e-13 * std::max(1.0, top))
      clean.back() = top;
    else
      clean.push_back(top);
  }
  return clean;
}

namespace {

void require_same_domain(const IntervalFunction& f, const IntervalFunction& g) {
  if (std::abs(f.x_max() - g.x_max()) > 1e-12 * std::max(1.0, f.x_max()))
    throw ParameterError("IntervalFunction: operands have different domains");
}

ValueKind joint_kind(const IntervalFunction& f, const IntervalFunction& g) {
  return (f.kind() == ValueKind::complex || g.kind() == ValueKind::complex) ? ValueKind::complex
                                                                            : ValueKind::real;
}

enum class ArithOp { add, sub, mul };

IntervalFunction arithmetic(const IntervalFunction& f, const IntervalFunction& g, ArithOp op) {
  require_same_domain(f, g);
  const auto bp = merge_breakpoints(f.breakpoints(), g.breakpoints());
  std::vector<Piece> pieces;
  pieces.reserve(bp.size() - 1);
  for (std::size_t k = 0; k + 1 < bp.size(); ++k) {
    const double lo = bp[k], mid = 0.5 * (bp[k] + bp[k + 1]);
    const std::size_t i = f.locate(mid), j = g.locate(mid);
    const Piece& pf = f.piece(i);
    const Piece& pg = g.piece(j);
    if (is_polynomial_like(pf) && is_polynomial_like(pg)) {
      const auto cf = shift_polynomial(as_coeffs(pf), lo - f.left(i));
      const auto cg = shift_polynomial(as_coeffs(pg), lo - g.left(j));
      switch (op) {
        case ArithOp::add: pieces.push_back(make_poly_piece(poly_add(cf, cg, 1.0))); break;
        case ArithOp::sub: pieces.push_back(make_poly_piece(poly_add(cf, cg, -1.0))); break;
        case ArithOp::mul: pieces.push_back(make_poly_piece(poly_mul(cf, cg))); break;
      }
      continue;
    }
    const double lf = f.left(i), lg = g.left(j);
    const double rate = (op == ArithOp::mul) ? f.phase_rate(i) + g.phase_rate(j)
                                             : std::max(f.phase_rate(i), g.phase_rate(j));
    std::function<cplx(double)> ev;
    switch (op) {
      case ArithOp::add:
        ev = [pf, pg, lf, lg](double x) { return eval_piece(pf, lf, x) + eval_piece(pg, lg, x); };
        break;
      case ArithOp::sub:
        ev = [pf, pg, lf, lg](double x) { return eval_piece(pf, lf, x) - eval_piece(pg, lg, x); };
        break;
      case ArithOp::mul:
        ev = [pf, pg, lf, lg](double x) { return eval_piece(pf, lf, x) * eval_piece(pg, lg, x); };
        break;
    }
    pieces.push_back(Smooth{std::move(ev), rate});
  }
  return IntervalFunction(bp, std::move(pieces), joint_kind(f, g));
}

}  // namespace

IntervalFunction operator+(const IntervalFunction& f, const IntervalFunction& g) {
  return arithmetic(f, g, ArithOp::add);
}

IntervalFunction operator-(const IntervalFunction& f, const IntervalFunction& g) {
  return arithmetic(f, g, ArithOp::sub);
}

IntervalFunction operator*(const IntervalFunction& f, const IntervalFunction& g) {
  return arithmetic(f, g, ArithOp::mul);
}

IntervalFunction operator*(cplx c, const IntervalFunction& f) {
  std::vector<Piece> pieces;
  pieces.reserve(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const Piece& p = f.piece(i);
    if (is_polynomial_like(p)) {
      auto co = as_coeffs(p);
      for (auto& v : co) v *= c;
      pieces.push_back(make_poly_piece(std::move(co)));
    } else {
      const auto& s = std::get<Smooth>(p);
      pieces.push_back(Smooth{[ev = s.eval, c](double x) { return c * ev(x); }, s.phase_rate});
    }
  }
  const ValueKind kind = (c.imag() != 0.0) ? ValueKind::complex : f.kind();
  return IntervalFunction({f.breakpoints().begin(), f.breakpoints().end()}, std::move(pieces), kind);
}

IntervalFunction conj(const IntervalFunction& f) {
  std::vector<Piece> pieces;
  pieces.reserve(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const Piece& p = f.piece(i);
    if (is_polynomial_like(p)) {
      auto co = as_coeffs(p);
      for (auto& v : co) v = std::conj(v);
      pieces.push_back(make_poly_piece(std::move(co)));
    } else {
      const auto& s = std::get<Smooth>(p);
      pieces.push_back(Smooth{[ev = s.eval](double x) { return std::conj(ev(x)); }, s.phase_rate});
    }
  }
  return IntervalFunction({f.breakpoints().begin(), f.breakpoints().end()}, std::move(pieces), f.kind());
}

IntervalFunction abs(const IntervalFunction& f) {
  std::vector<Piece> pieces;
  pieces.reserve(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const Piece& p = f.piece(i);
    if (const auto* c = std::get_if<Constant>(&p)) {
      pieces.push_back(Constant{std::abs(c->value)});
      continue;
    }
    const double l = f.left(i);
    pieces.push_back(Smooth{[p, l](double x) { return cplx(std::abs(eval_piece(p, l, x)), 0.0); },
                            f.phase_rate(i)});
  }
  return IntervalFunction({f.breakpoints().begin(), f.breakpoints().end()}, std::move(pieces), ValueKind::real);
}

IntervalFunction weighted(const IntervalFunction& f, std::function<double(double)> w) {
  std::vector<Piece> pieces;
  pieces.reserve(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const Piece p = f.piece(i);
    const double l = f.left(i);
    pieces.push_back(Smooth{[p, l, w](double x) { return w(x) * eval_piece(p, l, x); }, f.phase_rate(i)});
  }
  return IntervalFunction({f.breakpoints().begin(), f.breakpoints().end()}, std::move(pieces), f.kind());
}

IntervalFunction combine(const IntervalFunction& f, const IntervalFunction& g,
                         std::function<cplx(cplx, cplx)> op, ValueKind kind, double extra_rate) {
  require_same_domain(f, g);
  const auto bp = merge_breakpoints(f.breakpoints(), g.breakpoints());
  std::vector<Piece> pieces;
  pieces.reserve(bp.size() - 1);
  for (std::size_t k = 0; k + 1 < bp.size(); ++k) {
    const double mid = 0.5 * (bp[k] + bp[k + 1]);
    const std::size_t i = f.locate(mid), j = g.locate(mid);
    const Piece pf = f.piece(i), pg = g.piece(j);
    const double lf = f.left(i), lg = g.left(j);
    pieces.push_back(Smooth{[pf, pg, lf, lg, op](double x) { return op(eval_piece(pf, lf, x), eval_piece(pg, lg, x)); },
                            f.phase_rate(i) + g.phase_rate(j) + extra_rate});
  }
  return IntervalFunction(bp, std::move(pieces), kind);
}

IntervalFunction refined(const IntervalFunction& f, std::span<const double> extra) {
  std::vector<double> sorted(extra.begin(), extra.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> inner;
  for (double x : sorted)
    if (x > 0.0 && x < f.x_max()) inner.push_back(x);
  inner.insert(inner.begin(), 0.0);
  inner.push_back(f.x_max());
  const auto bp = merge_breakpoints(f.breakpoints(), inner);
  std::vector<Piece> pieces;
  pieces.reserve(bp.size() - 1);
  for (std::size_t k = 0; k + 1 < bp.size(); ++k) {
    const double lo = bp[k];
    const std::size_t i = f.locate(0.5 * (bp[k] + bp[k + 1]));
    const Piece& p = f.piece(i);
    if (is_polynomial_like(p))
      pieces.push_back(make_poly_piece(shift_polynomial(as_coeffs(p), lo - f.left(i))));
    else
      pieces.push_back(p);
  }
  return IntervalFunction(bp, std::move(pieces), f.kind());
}

}  // namespace mjost
