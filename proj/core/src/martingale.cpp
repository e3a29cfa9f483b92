#include "mjost/martingale.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace mjost {

namespace {

void check_levels(int m_max) {
  if (m_max < 1 || m_max > MartingaleStructure::kMaxLevels)
    throw ParameterError("martingale structure: m_max must lie in [1, 16]");
}

}  // namespace

LpL1Mass::LpL1Mass(const IntervalFunction& f, double p) : abs_int_(abs(f)), p_(p), x_max_(f.x_max()) {
  if (!(p >= 1.0)) throw ParameterError("l^p(L^1) mass: p must be at least 1");
  cell_prefix_.push_back(0.0);
  for (double n = 0.0; n < x_max_; n += 1.0) {
    const double mass = std::max(0.0, (abs_int_(std::min(n + 1.0, x_max_)) - abs_int_(n)).real());
    cell_prefix_.push_back(cell_prefix_.back() + std::pow(mass, p_));
  }
}

double LpL1Mass::between(double a, double b) const {
  a = std::max(a, 0.0);
  b = std::min(b, x_max_);
  if (!(b > a)) return 0.0;
  auto partial = [&](double lo, double hi) {
    return std::pow(std::max(0.0, (abs_int_(hi) - abs_int_(lo)).real()), p_);
  };
  const double ca = std::floor(a), cb = std::floor(b);
  if (ca == cb) return partial(a, b);
  double sum = partial(a, ca + 1.0);
  const auto first_full = static_cast<std::size_t>(ca) + 1, last_full = static_cast<std::size_t>(cb);
  if (last_full > first_full) sum += cell_prefix_[last_full] - cell_prefix_[first_full];
  if (b > cb) sum += partial(cb, b);
  return sum;
}

MartingaleStructure MartingaleStructure::uniform(double x_max, int m_max) {
  check_levels(m_max);
  if (!(x_max > 0.0)) throw ParameterError("martingale structure: x_max must be positive");
  MartingaleStructure ms;
  ms.m_max_ = m_max;
  const std::size_t n = std::size_t{1} << m_max;
  ms.finest_.resize(n + 1);
  for (std::size_t j = 0; j <= n; ++j) ms.finest_[j] = x_max * static_cast<double>(j) / static_cast<double>(n);
  ms.finest_.back() = x_max;
  return ms;
}

MartingaleStructure MartingaleStructure::adapted(const IntervalFunction& f, double p, int m_max, std::string tag) {
  check_levels(m_max);
  const LpL1Mass mass(f, p);
  const double total = mass.total();
  if (!(total > 0.0) || !std::isfinite(total))
    throw ParameterError("martingale structure: degenerate (zero or infinite) total mass");
  const double x_max = f.x_max();

  MartingaleStructure ms;
  ms.m_max_ = m_max;
  ms.p_ = p;
  const std::size_t n = std::size_t{1} << m_max;
  ms.finest_.assign(n + 1, 0.0);
  ms.finest_.back() = x_max;
  double prev = 0.0;
  for (std::size_t j = 1; j < n; ++j) {
    const double target = total * static_cast<double>(j) / static_cast<double>(n);
    // Smallest x with G(x) >= target.
    double lo = prev, hi = x_max;
    if (mass.cumulative(lo) >= target) {
      ms.finest_[j] = lo;
      continue;
    }
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mass.cumulative(mid) >= target)
        hi = mid;
      else
        lo = mid;
    }
    if (hi < prev) throw std::runtime_error("martingale structure: cumulative mass is not monotone");
    ms.finest_[j] = hi;
    prev = hi;
  }
  ms.adapted_to_ = tag.empty() ? std::optional<std::string>{} : std::optional<std::string>{std::move(tag)};
  ms.report_ = check_adaptedness(ms, f, p);
  return ms;
}

std::vector<double> MartingaleStructure::level(int m) const {
  if (m < 0 || m > m_max_) throw ParameterError("martingale structure: level out of range");
  const std::size_t stride = std::size_t{1} << (m_max_ - m);
  std::vector<double> out;
  out.reserve(cells(m) + 1);
  for (std::size_t j = 0; j < finest_.size(); j += stride) out.push_back(finest_[j]);
  return out;
}

std::pair<double, double> MartingaleStructure::cell(int m, std::size_t j) const {
  const std::size_t stride = std::size_t{1} << (m_max_ - m);
  return {finest_[j * stride], finest_[(j + 1) * stride]};
}

AdaptednessReport check_adaptedness(const MartingaleStructure& ms, const IntervalFunction& f, double p,
                                    double tolerance) {
  const LpL1Mass mass(f, p);
  AdaptednessReport r;
  r.total_mass = mass.total();
  r.min_slack = std::numeric_limits<double>::infinity();
  for (int m = 1; m <= ms.m_max(); ++m) {
    const double cap = r.total_mass / static_cast<double>(ms.cells(m));
    for (std::size_t j = 0; j < ms.cells(m); ++j) {
      const auto [a, b] = ms.cell(m, j);
      const double slack = cap - mass.between(a, b);
      r.min_slack = std::min(r.min_slack, slack);
      ++r.cells_checked;
      if (slack < -tolerance) ++r.violations;
    }
  }
  return r;
}

std::vector<cplx> finest_cell_integrals(const MartingaleStructure& ms,
                                        const std::function<cplx(double, double)>& integrate) {
  const auto bp = ms.finest();
  std::vector<cplx> out(bp.size() - 1);
  for (std::size_t j = 0; j + 1 < bp.size(); ++j) out[j] = bp[j + 1] > bp[j] ? integrate(bp[j], bp[j + 1]) : 0.0;
  return out;
}

BsReport bs_from_cell_integrals(const MartingaleStructure& ms, std::span<const cplx> finest, double s) {
  BsReport r;
  r.s = s;
  r.terms.assign(static_cast<std::size_t>(ms.m_max()), 0.0);
  std::vector<cplx> level(finest.begin(), finest.end());
  for (int m = ms.m_max(); m >= 1; --m) {
    double sq = 0.0;
    for (const cplx& v : level) sq += std::norm(v);
    r.terms[static_cast<std::size_t>(m - 1)] = std::pow(static_cast<double>(m), s) * std::sqrt(sq);
    std::vector<cplx> coarser(level.size() / 2);
    for (std::size_t j = 0; j < coarser.size(); ++j) coarser[j] = level[2 * j] + level[2 * j + 1];
    level = std::move(coarser);
  }
  for (double t : r.terms) r.total += t;
  const std::size_t n = r.terms.size();
  if (n >= 2 && r.terms[n - 1] > 0.0) {
    const double ratio = r.terms[n - 1] / r.terms[n - 2];
    r.tail_estimate = ratio < 1.0 ? r.terms[n - 1] * ratio / (1.0 - ratio) : std::numeric_limits<double>::infinity();
  }
  return r;
}

BsReport bs_seminorm(const IntervalFunction& f, const MartingaleStructure& ms, double s, const QuadratureConfig& cfg) {
  const auto cells = finest_cell_integrals(ms, [&](double a, double b) { return f.integrate(a, b, cfg); });
  return bs_from_cell_integrals(ms, cells, s);
}

BsReport bs_seminorm(const std::function<cplx(double)>& f, const MartingaleStructure& ms, double s,
                     const QuadratureConfig& cfg) {
  const auto cells = finest_cell_integrals(ms, [&](double a, double b) { return integrate_adaptive(f, a, b, cfg); });
  return bs_from_cell_integrals(ms, cells, s);
}

BsReport bs_seminorm(const WkbKernel& kernel, const MartingaleStructure& ms, double s, const QuadratureConfig& cfg) {
  const auto cells =
      finest_cell_integrals(ms, [&](double a, double b) { return kernel.integrate_kernel(a, b, cfg); });
  return bs_from_cell_integrals(ms, cells, s);
}

std::vector<double> bs_tails(const MartingaleStructure& ms, std::span<const cplx> finest, double s,
                             std::span<const double> cutoffs,
                             const std::function<cplx(double, double)>& integrate) {
  const auto bp = ms.finest();
  std::vector<double> out;
  out.reserve(cutoffs.size());
  std::vector<cplx> cut(finest.size());
  for (double M : cutoffs) {
    for (std::size_t j = 0; j < finest.size(); ++j) {
      if (bp[j + 1] <= M)
        cut[j] = 0.0;
      else if (bp[j] >= M)
        cut[j] = finest[j];
      else
        cut[j] = integrate(M, bp[j + 1]);
    }
    out.push_back(bs_from_cell_integrals(ms, cut, s).total);
  }
  return out;
}

namespace {

cplx s_zeta_between(const ZetaFn& zeta, const IntervalFunction& f, const WkbKernel& kernel, double a, double b,
                    const QuadratureConfig& cfg) {
  a = std::max(a, 0.0);
  b = std::min({b, kernel.x_max(), f.x_max()});
  if (!(b > a)) return {0.0, 0.0};
  const auto& q = kernel.profile().q;
  cplx sum{0.0, 0.0};
  std::size_t i = q.locate(a), j = f.locate(a);
  double lo = a;
  while (lo < b) {
    while (i + 1 < q.size() && q.right(i) <= lo) ++i;
    while (j + 1 < f.size() && f.right(j) <= lo) ++j;
    const double hi = std::min({b, q.right(i), f.right(j)});
    if (!(hi > lo)) break;
    const double rate = 2.0 * kernel.k() + kernel.profile().q_sup[i] / kernel.k() + q.phase_rate(i) + f.phase_rate(j);
    const int panels = std::max(1, static_cast<int>(std::ceil(rate * (hi - lo) / (std::numbers::pi / 2.0))));
    const double h = (hi - lo) / panels;
    auto integrand = [&](double x) { return zeta(x) * std::polar(1.0, -kernel.phase(x)) * f.eval_in(j, x); };
    for (int p = 0; p < panels; ++p)
      sum += integrate_adaptive(integrand, lo + p * h, p + 1 == panels ? hi : lo + (p + 1) * h, cfg);
    lo = hi;
  }
  return sum;
}

cplx term_between(const ZetaTerm& t, const WkbKernel& kernel, double a, double b, const QuadratureConfig& cfg) {
  if (const auto* c = std::get_if<cplx>(&t.zeta)) return kernel.oscillatory_integral(t.f, *c, a, b, cfg);
  return s_zeta_between(std::get<ZetaFn>(t.zeta), t.f, kernel, a, b, cfg);
}

}  // namespace

cplx s_zeta(cplx zeta, const IntervalFunction& f, const WkbKernel& kernel, double y, const QuadratureConfig& cfg) {
  return kernel.oscillatory_integral(f, zeta, y, kernel.x_max(), cfg);
}

cplx s_zeta(const ZetaFn& zeta, const IntervalFunction& f, const WkbKernel& kernel, double y,
            const QuadratureConfig& cfg) {
  return s_zeta_between(zeta, f, kernel, y, kernel.x_max(), cfg);
}

BsReport g_functional(const std::vector<ZetaTerm>& terms, const MartingaleStructure& ms, double s,
                      const WkbKernel& kernel, const QuadratureConfig& cfg) {
  const auto cells = finest_cell_integrals(ms, [&](double a, double b) {
    cplx sum{0.0, 0.0};
    for (const auto& t : terms) sum += term_between(t, kernel, a, b, cfg);
    return sum;
  });
  return bs_from_cell_integrals(ms, cells, s);
}

}  // namespace mjost
