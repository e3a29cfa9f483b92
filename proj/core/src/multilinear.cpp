#include "mjost/multilinear.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mjost/detail/rk.hpp"

namespace mjost {

namespace {

constexpr std::size_t kNoPiece = static_cast<std::size_t>(-1);

cplx apply(Conj c, cplx v) { return c == Conj::conjugate ? std::conj(v) : v; }

double max_step_for(double rate) {
  return rate > 0.0 ? std::numbers::pi / rate : std::numeric_limits<double>::infinity();
}

detail::StepControl control_of(const MultilinearConfig& cfg) { return {cfg.rel_tol, cfg.abs_tol}; }

// Pieces of f met by [a, b], clipped, in increasing order.
struct SubPiece {
  double lo, hi;
  std::size_t piece;
};

std::vector<SubPiece> sub_pieces(const IntervalFunction& f, double a, double b) {
  std::vector<SubPiece> out;
  for (std::size_t i = f.locate(a); i < f.size() && f.left(i) < b; ++i) {
    const double lo = std::max(a, f.left(i)), hi = std::min(b, f.right(i));
    if (hi > lo) out.push_back({lo, hi, i});
  }
  return out;
}

// B-tails for every order at every grid point, processing right to left.
std::vector<std::vector<cplx>> tail_pass(const IntervalFunction& f, const ConjugationPattern& pattern,
                                         std::span<const double> grid, const MultilinearConfig& cfg) {
  const std::size_t N = pattern.size();
  const std::size_t G = grid.size();
  std::vector<std::vector<cplx>> values(N + 1, std::vector<cplx>(G, cplx(0.0, 0.0)));
  std::vector<cplx> z(N + 1, cplx(0.0, 0.0));
  z[0] = 1.0;
  auto record = [&](std::size_t gi) {
    for (std::size_t n = 0; n <= N; ++n) values[n][gi] = z[n];
  };
  record(G - 1);

  // Backward segments: each lies inside one piece of f and one grid panel.
  struct Seg {
    detail::Segment seg;
    bool constant;
    std::ptrdiff_t grid_index;  // grid point reached at the segment end, or -1
  };
  std::vector<Seg> segs;
  for (std::size_t gi = G - 1; gi > 0; --gi) {
    auto parts = sub_pieces(f, grid[gi - 1], grid[gi]);
    for (std::size_t k = parts.size(); k-- > 0;) {
      const auto& sp = parts[k];
      detail::Segment s{sp.hi, sp.lo, sp.piece, max_step_for(f.phase_rate(sp.piece))};
      segs.push_back({s, f.piece_is_constant(sp.piece), k == 0 ? static_cast<std::ptrdiff_t>(gi - 1) : -1});
    }
    if (parts.empty())
      segs.push_back({{grid[gi], grid[gi - 1], kNoPiece, 1.0}, true, static_cast<std::ptrdiff_t>(gi - 1)});
  }

  auto rhs = [&](double x, const std::vector<cplx>& y, std::vector<cplx>& dy, const detail::Segment& seg) {
    const cplx v = f.eval_in(seg.id, x);
    dy[0] = 0.0;
    for (std::size_t n = 1; n <= N; ++n) dy[n] = -apply(pattern[N - n], v) * y[n - 1];
  };
  std::size_t cursor = 0;
  auto observer = [&](double, const std::vector<cplx>& y, const detail::Segment&, bool at_end) {
    if (!at_end) return;
    z = y;
    if (segs[cursor].grid_index >= 0) record(static_cast<std::size_t>(segs[cursor].grid_index));
    ++cursor;
  };

  while (cursor < segs.size()) {
    const Seg& s = segs[cursor];
    if (s.constant) {
      const double L = s.seg.from - s.seg.to;
      const cplx v = s.seg.id == kNoPiece ? cplx(0.0, 0.0) : std::get<Constant>(f.piece(s.seg.id)).value;
      std::vector<cplx> next(N + 1, cplx(0.0, 0.0));
      for (std::size_t n = 0; n <= N; ++n) {
        cplx prod = 1.0;
        double power = 1.0;
        for (std::size_t j = 0; j <= n; ++j) {
          if (j > 0) {
            prod *= apply(pattern[N - n + j - 1], v);
            power *= L / static_cast<double>(j);
          }
          next[n] += prod * power * z[n - j];
        }
      }
      z = std::move(next);
      if (s.grid_index >= 0) record(static_cast<std::size_t>(s.grid_index));
      ++cursor;
      continue;
    }
    std::size_t end = cursor;
    std::vector<detail::Segment> run;
    while (end < segs.size() && !segs[end].constant) run.push_back(segs[end++].seg);
    std::vector<cplx> y = z;
    detail::integrate_segments(run, y, rhs, observer, control_of(cfg));
  }
  return values;
}

}  // namespace

ConjugationPattern series_pattern(int n) {
  ConjugationPattern p(static_cast<std::size_t>(std::max(n, 0)));
  for (int i = 0; i < n; ++i) p[static_cast<std::size_t>(i)] = ((n - 1 - i) % 2 == 0) ? Conj::conjugate : Conj::plain;
  return p;
}

ConjugationPattern alternating_pattern(int n) {
  ConjugationPattern p(static_cast<std::size_t>(std::max(n, 0)));
  for (int i = 0; i < n; ++i) p[static_cast<std::size_t>(i)] = (i % 2 == 1) ? Conj::conjugate : Conj::plain;
  return p;
}

Signature::Signature(std::size_t n) : n_(n), v_((n + 1) * (n + 1), cplx(0.0, 0.0)) {
  for (std::size_t a = 0; a <= n; ++a) (*this)(a, a) = 1.0;
}

Signature operator*(const Signature& lhs, const Signature& rhs) {
  const std::size_t n = lhs.order();
  Signature out(n);
  for (std::size_t a = 0; a <= n; ++a)
    for (std::size_t b = a + 1; b <= n; ++b) {
      cplx acc{0.0, 0.0};
      for (std::size_t c = a; c <= b; ++c) acc += lhs(a, c) * rhs(c, b);
      out(a, b) = acc;
    }
  return out;
}

Signature interval_signature(const IntervalFunction& f, const ConjugationPattern& pattern, double x, double y,
                             const MultilinearConfig& cfg) {
  const std::size_t n = pattern.size();
  Signature sig(n);
  for (const auto& sp : sub_pieces(f, x, y)) {
    if (f.piece_is_constant(sp.piece)) {
      const cplx v = std::get<Constant>(f.piece(sp.piece)).value;
      const double L = sp.hi - sp.lo;
      Signature step(n);
      for (std::size_t a = 0; a <= n; ++a) {
        cplx prod = 1.0;
        double power = 1.0;
        for (std::size_t b = a + 1; b <= n; ++b) {
          prod *= apply(pattern[b - 1], v);
          power *= L / static_cast<double>(b - a);
          step(a, b) = prod * power;
        }
      }
      sig = sig * step;
      continue;
    }
    // dS/dt = S N(t), N superdiagonal with entries g_b(t).
    std::vector<cplx> state((n + 1) * (n + 1));
    for (std::size_t a = 0; a <= n; ++a)
      for (std::size_t b = 0; b <= n; ++b) state[a * (n + 1) + b] = sig(a, b);
    auto rhs = [&](double t, const std::vector<cplx>& s, std::vector<cplx>& ds, const detail::Segment& seg) {
      const cplx v = f.eval_in(seg.id, t);
      std::fill(ds.begin(), ds.end(), cplx(0.0, 0.0));
      for (std::size_t b = 1; b <= n; ++b) {
        const cplx g = apply(pattern[b - 1], v);
        for (std::size_t a = 0; a < b; ++a) ds[a * (n + 1) + b] = s[a * (n + 1) + b - 1] * g;
      }
    };
    std::vector<detail::Segment> seg{{sp.lo, sp.hi, sp.piece, max_step_for(f.phase_rate(sp.piece))}};
    detail::integrate_segments(seg, state, rhs, [](double, const auto&, const auto&, bool) {}, control_of(cfg));
    for (std::size_t a = 0; a <= n; ++a)
      for (std::size_t b = 0; b <= n; ++b) sig(a, b) = state[a * (n + 1) + b];
  }
  return sig;
}

IteratedIntegralTable iterated_tails(const IntervalFunction& f, const ConjugationPattern& pattern,
                                     std::span<const double> x_grid, double x_max, int n_max,
                                     const MultilinearConfig& cfg) {
  if (n_max < 0 || pattern.size() != static_cast<std::size_t>(n_max))
    throw ParameterError("iterated_tails: pattern length must equal n_max");
  if (x_grid.empty() || x_grid.back() != x_max) throw ParameterError("iterated_tails: grid must end at x_max");
  for (std::size_t i = 1; i < x_grid.size(); ++i)
    if (!(x_grid[i] > x_grid[i - 1])) throw ParameterError("iterated_tails: grid must be strictly increasing");
  if (x_grid.front() < 0.0 || x_max > f.x_max() * (1.0 + 1e-15))
    throw ParameterError("iterated_tails: grid outside the domain of f");
  IteratedIntegralTable t;
  t.x_grid.assign(x_grid.begin(), x_grid.end());
  t.pattern = pattern;
  t.x_max = x_max;
  t.values = tail_pass(f, pattern, x_grid, cfg);
  return t;
}

cplx m_n(const IntervalFunction& f, const ConjugationPattern& pattern, double x, double x1,
         const MultilinearConfig& cfg) {
  if (x > x1) throw ParameterError("m_n: requires x <= x1");
  if (x == x1) return pattern.empty() ? 1.0 : 0.0;
  const double grid[2] = {x, x1};
  return tail_pass(f, pattern, grid, cfg)[pattern.size()][0];
}

namespace {

cplx nested(const IntervalFunction& f, const ConjugationPattern& p, std::size_t level, double a, double x1,
            const QuadratureConfig& cfg) {
  if (level == p.size()) return 1.0;
  cplx sum{0.0, 0.0};
  for (const auto& sp : sub_pieces(f, a, x1)) {
    auto integrand = [&](double t) { return apply(p[level], f.eval_in(sp.piece, t)) * nested(f, p, level + 1, t, x1, cfg); };
    const double rate = f.phase_rate(sp.piece);
    const int panels = std::max(1, static_cast<int>(std::ceil(rate * (sp.hi - sp.lo) / (std::numbers::pi / 2.0))));
    const double h = (sp.hi - sp.lo) / panels;
    for (int k = 0; k < panels; ++k)
      sum += integrate_adaptive(integrand, sp.lo + k * h, k + 1 == panels ? sp.hi : sp.lo + (k + 1) * h, cfg);
  }
  return sum;
}

}  // namespace

cplx m_n_nested(const IntervalFunction& f, const ConjugationPattern& pattern, double x, double x1,
                const QuadratureConfig& cfg) {
  if (x > x1) throw ParameterError("m_n_nested: requires x <= x1");
  return nested(f, pattern, 0, x, x1, cfg);
}

std::vector<double> oscillation_grid(const IntervalFunction& f, double x_max, double density, std::size_t max_points) {
  if (!(density > 0.0)) throw ParameterError("oscillation_grid: density must be positive");
  std::vector<double> grid{0.0};
  for (const auto& sp : sub_pieces(f, 0.0, x_max)) {
    const double rate = f.phase_rate(sp.piece);
    const int n = rate > 0.0
                      ? std::max(1, static_cast<int>(std::ceil((sp.hi - sp.lo) * rate * density / (2.0 * std::numbers::pi))))
                      : 1;
    for (int k = 1; k <= n; ++k) grid.push_back(k == n ? sp.hi : sp.lo + (sp.hi - sp.lo) * k / n);
  }
  if (max_points >= 2 && grid.size() > max_points) {
    std::vector<double> thin;
    const double stride = static_cast<double>(grid.size() - 1) / static_cast<double>(max_points - 1);
    for (std::size_t k = 0; k < max_points; ++k)
      thin.push_back(grid[std::min(grid.size() - 1, static_cast<std::size_t>(std::llround(k * stride)))]);
    thin.erase(std::unique(thin.begin(), thin.end()), thin.end());
    grid = std::move(thin);
  }
  return grid;
}

std::vector<double> maximal_m_n_all(const IntervalFunction& f, const ConjugationPattern& pattern,
                                    std::span<const double> grid, const MultilinearConfig& cfg) {
  const std::size_t n = pattern.size();
  std::vector<double> best(n, 0.0);
  if (grid.size() < 2) return best;
  std::vector<Signature> panels;
  panels.reserve(grid.size() - 1);
  for (std::size_t t = 0; t + 1 < grid.size(); ++t) panels.push_back(interval_signature(f, pattern, grid[t], grid[t + 1], cfg));
  std::vector<cplx> row(n + 1), next(n + 1);
  for (std::size_t s = 0; s < panels.size(); ++s) {
    std::fill(row.begin(), row.end(), cplx(0.0, 0.0));
    row[0] = 1.0;
    for (std::size_t t = s; t < panels.size(); ++t) {
      const Signature& S = panels[t];
      for (std::size_t b = 0; b <= n; ++b) {
        cplx acc{0.0, 0.0};
        for (std::size_t c = 0; c <= b; ++c) acc += row[c] * S(c, b);
        next[b] = acc;
      }
      row.swap(next);
      for (std::size_t b = 1; b <= n; ++b) best[b - 1] = std::max(best[b - 1], std::abs(row[b]));
    }
  }
  return best;
}

double maximal_m_n(const IntervalFunction& f, const ConjugationPattern& pattern, int n, double x_max,
                   double grid_density, const MultilinearConfig& cfg) {
  if (n < 1 || static_cast<std::size_t>(n) > pattern.size()) throw ParameterError("maximal_m_n: n out of range");
  const ConjugationPattern prefix(pattern.begin(), pattern.begin() + n);
  const auto grid = oscillation_grid(f, x_max, grid_density);
  return maximal_m_n_all(f, prefix, grid, cfg).back();
}

FactorialBoundReport factorial_bound_report(const IntervalFunction& f, const MartingaleStructure& ms, int n_max,
                                            double x_max, double grid_density, const MultilinearConfig& cfg) {
  if (n_max < 1 || n_max > 8) throw ParameterError("factorial_bound_report: n_max must lie in [1, 8]");
  FactorialBoundReport r;
  r.b1_norm = bs_seminorm(f, ms, 1.0).total;
  const auto grid = oscillation_grid(f, x_max, grid_density);
  r.m_star = maximal_m_n_all(f, alternating_pattern(n_max), grid, cfg);
  const bool nonzero = std::any_of(r.m_star.begin(), r.m_star.end(), [](double v) { return v > 0.0; });
  r.degenerate = r.b1_norm == 0.0 && nonzero;
  double fact = 1.0;
  for (int n = 1; n <= n_max; ++n) {
    fact *= n;
    const double m = r.m_star[static_cast<std::size_t>(n - 1)];
    double ratio;
    if (m == 0.0)
      ratio = 0.0;
    else if (r.b1_norm == 0.0)
      ratio = std::numeric_limits<double>::quiet_NaN();
    else
      ratio = m * std::sqrt(fact) / std::pow(r.b1_norm, n);
    r.r.push_back(ratio);
    r.r_root.push_back(std::pow(ratio, 1.0 / n));
  }
  return r;
}

}  // namespace mjost
