#include "mjost/potential.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace mjost {

namespace {

constexpr double kQuarterTurn = std::numbers::pi / 2.0;

void require_domain(const IntervalFunction& f, double x_max, const char* what) {
  if (std::abs(f.x_max() - x_max) > 1e-12 * std::max(1.0, x_max))
    throw ParameterError(std::string(what) + ": domain does not end at x_max");
}

std::vector<double> unit_breakpoints(double x_max) {
  std::vector<double> bp{0.0};
  for (double n = 1.0; n < x_max; n += 1.0) bp.push_back(n);
  bp.push_back(x_max);
  return bp;
}

// sum_{n >= N} n^-alpha for alpha > 1.
double power_tail(double alpha, double N) {
  constexpr int kDirect = 100;
  double sum = 0.0;
  for (int j = 0; j < kDirect; ++j) sum += std::pow(N + j, -alpha);
  const double M = N + kDirect;
  sum += std::pow(M, 1.0 - alpha) / (alpha - 1.0) + 0.5 * std::pow(M, -alpha) +
         alpha * std::pow(M, -alpha - 1.0) / 12.0 -
         alpha * (alpha + 1.0) * (alpha + 2.0) * std::pow(M, -alpha - 3.0) / 720.0;
  return sum;
}

void validate_comb(const DeltaComb& c) {
  if (c.positions.size() != c.weights.size())
    throw ParameterError("DeltaComb: positions and weights differ in length");
  for (std::size_t i = 0; i < c.positions.size(); ++i) {
    if (!(c.positions[i] > 0.0) || !std::isfinite(c.positions[i]))
      throw ParameterError("DeltaComb: positions must be positive");
    if (i > 0 && !(c.positions[i] > c.positions[i - 1]))
      throw ParameterError("DeltaComb: positions must be strictly increasing");
    if (!std::isfinite(c.weights[i])) throw ParameterError("DeltaComb: weights must be finite");
  }
}

Decomposition build_step_comb(const DeltaComb& c, double x_max) {
  std::vector<double> bp{0.0};
  double beyond = c.tail_mass;
  double inside = 0.0;
  std::vector<double> inner_weights;
  for (std::size_t i = 0; i < c.positions.size(); ++i) {
    if (c.positions[i] < x_max) {
      bp.push_back(c.positions[i]);
      inner_weights.push_back(c.weights[i]);
      inside += c.weights[i];
    } else {
      beyond += c.weights[i];
    }
  }
  bp.push_back(x_max);
  std::vector<Piece> pieces;
  pieces.reserve(bp.size() - 1);
  // On [x_j, x_{j+1}) the masses to the right are those with index > j.
  double right_mass = inside + beyond;
  pieces.push_back(Constant{-right_mass});
  for (double a : inner_weights) {
    right_mass -= a;
    pieces.push_back(Constant{-right_mass});
  }
  pieces.back() = Constant{-beyond};
  return {IntervalFunction(std::move(bp), std::move(pieces)), IntervalFunction::zero(x_max), 0.0, "delta_comb"};
}

Decomposition build_cell_local_comb(const DeltaComb& c, double x_max) {
  std::vector<double> bp = unit_breakpoints(x_max);
  for (double x : c.positions)
    if (x < x_max) bp.push_back(x);
  std::sort(bp.begin(), bp.end());
  bp.erase(std::unique(bp.begin(), bp.end()), bp.end());

  std::vector<Piece> sigma, tau;
  sigma.reserve(bp.size() - 1);
  tau.reserve(bp.size() - 1);
  for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
    const double l = bp[i];
    const double cell = std::floor(l);
    const double width = std::min(cell + 1.0, x_max) - cell;
    double cell_mass = 0.0, jumped = 0.0;
    for (std::size_t n = 0; n < c.positions.size(); ++n) {
      const double x = c.positions[n];
      if (x < cell || x >= cell + 1.0 || x >= x_max) continue;
      cell_mass += c.weights[n];
      if (x <= l) jumped += c.weights[n];
    }
    const double slope = -cell_mass / width;
    const double value = jumped + slope * (l - cell);
    if (slope == 0.0)
      sigma.push_back(Constant{value});
    else
      sigma.push_back(Polynomial{{value, slope}});
    tau.push_back(Constant{cell_mass / width});
  }
  return {IntervalFunction(bp, std::move(sigma)), IntervalFunction(bp, std::move(tau)), 0.0,
          "delta_comb_cell_local"};
}

Decomposition build_oscillatory(const Oscillatory& o, double x_max) {
  const double a = o.a, b = o.b;
  if (!(b > 1.0)) throw ParameterError("Oscillatory: b must exceed 1");
  if (!(a + b > -1.0)) throw ParameterError("Oscillatory: a + b must exceed -1");
  const auto bp = unit_breakpoints(x_max);
  const double ct = (a + 1.0 - b) / b;
  auto sigma_eval = [a, b](double x) { return cplx(-std::pow(x, a + 1.0 - b) * std::cos(std::pow(x, b)) / b, 0.0); };
  auto tau_eval = [a, b, ct](double x) { return cplx(ct * std::pow(x, a - b) * std::cos(std::pow(x, b)), 0.0); };
  auto near_zero = [a, b](double x) { return cplx(x > 0.0 ? std::pow(x, a) * std::sin(std::pow(x, b)) : 0.0, 0.0); };

  std::vector<Piece> sigma, tau;
  for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
    const double rate = b * std::pow(bp[i + 1], b - 1.0);
    if (i == 0) {
      sigma.push_back(Constant{-std::cos(1.0) / b});
      tau.push_back(Smooth{near_zero, rate});
    } else {
      sigma.push_back(Smooth{sigma_eval, rate});
      if (ct == 0.0)
        tau.push_back(Constant{0.0});
      else
        tau.push_back(Smooth{tau_eval, rate});
    }
  }
  return {IntervalFunction(bp, std::move(sigma)), IntervalFunction(bp, std::move(tau)), 0.0, "oscillatory"};
}

Decomposition build_plus_minus_one(double x_max) {
  std::vector<double> bp{0.0};
  std::vector<Piece> sigma;
  for (long n = 1; static_cast<double>(n - 1) < x_max; ++n) {
    const double delta = 1.0 / (2.0 * n);
    for (long j = 0; j < 2 * n; ++j) {
      const double left = static_cast<double>(n - 1) + static_cast<double>(j) / (2.0 * n);
      if (left >= x_max) break;
      if (j % 2 == 0)
        sigma.push_back(Polynomial{{0.0, 1.0}});
      else
        sigma.push_back(Polynomial{{delta, -1.0}});
      const double right = static_cast<double>(n - 1) + static_cast<double>(j + 1) / (2.0 * n);
      bp.push_back(std::min(right, x_max));
    }
  }
  return {IntervalFunction(std::move(bp), std::move(sigma)), IntervalFunction::zero(x_max), 0.0, "plus_minus_one"};
}

}  // namespace

DeltaComb power_law_comb(double amplitude, double alpha, double x_max, bool cell_local) {
  DeltaComb c;
  for (double n = 1.0; n < x_max; n += 1.0) {
    c.positions.push_back(n);
    c.weights.push_back(amplitude * std::pow(n, -alpha));
  }
  if (alpha > 1.0 && !cell_local) c.tail_mass = amplitude * power_tail(alpha, std::ceil(x_max));
  c.cell_local = cell_local;
  return c;
}

Decomposition build_decomposition(const PotentialFamily& family, double x_max) {
  if (!(x_max > 0.0) || !std::isfinite(x_max)) throw ParameterError("x_max must be positive and finite");
  return std::visit(
      [x_max](const auto& fam) -> Decomposition {
        using T = std::decay_t<decltype(fam)>;
        if constexpr (std::is_same_v<T, DeltaComb>) {
          validate_comb(fam);
          return fam.cell_local ? build_cell_local_comb(fam, x_max) : build_step_comb(fam, x_max);
        } else if constexpr (std::is_same_v<T, Oscillatory>) {
          return build_oscillatory(fam, x_max);
        } else if constexpr (std::is_same_v<T, PlusMinusOne>) {
          return build_plus_minus_one(x_max);
        } else if constexpr (std::is_same_v<T, ClassicalL1>) {
          require_domain(fam.tau, x_max, "ClassicalL1");
          return {IntervalFunction::zero(fam.tau.x_max()), fam.tau, 0.0, "classical_l1"};
        } else {
          require_domain(fam.sigma, x_max, "Custom");
          require_domain(fam.tau, x_max, "Custom");
          return {fam.sigma, fam.tau, 0.0, "custom"};
        }
      },
      family);
}

Decomposition decompose_weighted(const IntervalFunction& a, const IntervalFunction& b, double gamma) {
  if (!(gamma >= 0.0)) throw ParameterError("decompose_weighted: gamma must be nonnegative");
  if (gamma == 0.0) {
    require_domain(b, a.x_max(), "decompose_weighted");
    return {a, b, 0.0, "weighted"};
  }
  auto sigma = weighted(a, [gamma](double x) { return std::pow(1.0 + x, -gamma); });
  auto tau = weighted(a, [gamma](double x) { return gamma * std::pow(1.0 + x, -gamma - 1.0); }) +
             weighted(b, [gamma](double x) { return std::pow(1.0 + x, -gamma); });
  return {sigma, tau, gamma, "weighted"};
}

std::vector<double> cell_norms(const IntervalFunction& f, double q, double x0, double x1) {
  if (q != 1.0 && q != 2.0) throw ParameterError("cell norms: only q = 1 and q = 2 are supported");
  x0 = std::max(x0, 0.0);
  x1 = std::min(x1, f.x_max());
  std::vector<double> out;
  for (double n = std::floor(x0); n < x1; n += 1.0) {
    const double lo = std::max(n, x0), hi = std::min(n + 1.0, x1);
    if (!(hi > lo)) continue;
    out.push_back(std::pow(f.abs_power_integral(lo, hi, q), 1.0 / q));
  }
  return out;
}

double lplq_norm(const IntervalFunction& f, double p, double q, double x0, double x1) {
  if (!(p >= 1.0)) throw ParameterError("lplq_norm: p must be at least 1");
  double sum = 0.0;
  for (double c : cell_norms(f, q, x0, x1)) sum += std::pow(c, p);
  return std::pow(sum, 1.0 / p);
}

cplx gauge_shift(const Decomposition& d1, const Decomposition& d2, double x) {
  return d1.tau.integrate(0.0, x) - d2.tau.integrate(0.0, x);
}

std::vector<cplx> gauge_shift_curve(const Decomposition& d1, const Decomposition& d2, std::span<const double> xs) {
  const Antiderivative t1(d1.tau), t2(d2.tau);
  std::vector<cplx> out;
  out.reserve(xs.size());
  for (double x : xs) out.push_back(t1(x) - t2(x));
  return out;
}

std::shared_ptr<const QProfile> QProfile::build(const Decomposition& d) {
  auto p = std::make_shared<QProfile>();
  p->decomposition = d;
  p->q = d.tau - d.sigma * d.sigma;
  p->q_int = Antiderivative(p->q);
  p->tau_int = Antiderivative(d.tau);
  const std::size_t n = p->q.size();
  p->sigma_piece.resize(n);
  p->tau_piece.resize(n);
  p->q_sup.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double mid = 0.5 * (p->q.left(i) + p->q.right(i));
    p->sigma_piece[i] = d.sigma.locate(mid);
    p->tau_piece[i] = d.tau.locate(mid);
    p->q_sup[i] = p->q.sup_abs(i);
  }
  return p;
}

WkbKernel::WkbKernel(const Decomposition& d, double E) : WkbKernel(QProfile::build(d), E) {}

WkbKernel::WkbKernel(std::shared_ptr<const QProfile> profile, double E)
    : profile_(std::move(profile)), E_(E), k_(std::sqrt(E)) {
  if (!(E > 0.0) || !std::isfinite(E)) throw ParameterError("energy must be positive");
}

double WkbKernel::sigma_in(std::size_t i, double x) const {
  return profile_->decomposition.sigma.eval_in(profile_->sigma_piece[i], x).real();
}

cplx WkbKernel::effective_potential_in(std::size_t i, double x) const {
  return profile_->q.eval_in(i, x).real() + cplx(0.0, 2.0 * k_ * sigma_in(i, x));
}

cplx WkbKernel::kernel_in(std::size_t i, double x) const {
  const double h = phase(x);
  return w() * std::polar(1.0, -h) * effective_potential_in(i, x);
}

cplx WkbKernel::effective_potential(double x) const { return effective_potential_in(profile_->q.locate(x), x); }

cplx WkbKernel::kernel(double x) const { return kernel_in(profile_->q.locate(x), x); }

double WkbKernel::phase_rate(std::size_t i) const {
  return 2.0 * k_ + profile_->q_sup[i] / k_ + profile_->q.phase_rate(i) +
         profile_->decomposition.sigma.phase_rate(profile_->sigma_piece[i]);
}

IntervalFunction WkbKernel::kernel_function() const {
  const auto& q = profile_->q;
  std::vector<Piece> pieces;
  pieces.reserve(q.size());
  auto self = std::make_shared<const WkbKernel>(*this);
  for (std::size_t i = 0; i < q.size(); ++i)
    pieces.push_back(Smooth{[self, i](double x) { return self->kernel_in(i, x); }, phase_rate(i)});
  return IntervalFunction({q.breakpoints().begin(), q.breakpoints().end()}, std::move(pieces), ValueKind::complex);
}

cplx linear_phase_integral(double h0, double alpha, double length) {
  const double theta = alpha * length;
  cplx factor;
  if (std::abs(theta) < 1e-3) {
    const double t2 = theta * theta;
    factor = cplx(1.0 - t2 / 6.0 + t2 * t2 / 120.0, -theta / 2.0 + theta * t2 / 24.0);
  } else {
    factor = (1.0 - std::polar(1.0, -theta)) / cplx(0.0, theta);
  }
  return std::polar(1.0, -h0) * factor * length;
}

namespace {

template <class Fn>
void walk_pieces(const IntervalFunction& f, const IntervalFunction& g, double a, double b, Fn&& fn) {
  std::size_t i = f.locate(a), j = g.locate(a);
  double lo = a;
  while (lo < b) {
    while (i + 1 < f.size() && f.right(i) <= lo) ++i;
    while (j + 1 < g.size() && g.right(j) <= lo) ++j;
    const double hi = std::min({b, f.right(i), g.right(j)});
    if (!(hi > lo)) break;
    fn(lo, hi, i, j);
    lo = hi;
  }
}

template <class F>
cplx panel_integrate(F&& f, double lo, double hi, double rate, const QuadratureConfig& cfg) {
  const int n = std::max(1, static_cast<int>(std::ceil(rate * (hi - lo) / kQuarterTurn)));
  const double h = (hi - lo) / n;
  cplx sum{0.0, 0.0};
  for (int p = 0; p < n; ++p) {
    const double pa = lo + p * h;
    const double pb = (p + 1 == n) ? hi : lo + (p + 1) * h;
    sum += integrate_adaptive(f, pa, pb, cfg);
  }
  return sum;
}

}  // namespace

cplx WkbKernel::integrate_kernel(double a, double b, const QuadratureConfig& cfg) const {
  if (a > b) return -integrate_kernel(b, a, cfg);
  a = std::max(a, 0.0);
  b = std::min(b, x_max());
  cplx sum{0.0, 0.0};
  const auto& q = profile_->q;
  const auto& sigma = profile_->decomposition.sigma;
  for (std::size_t i = q.locate(a); i < q.size() && q.left(i) < b; ++i) {
    const double lo = std::max(a, q.left(i)), hi = std::min(b, q.right(i));
    if (!(hi > lo)) continue;
    const std::size_t si = profile_->sigma_piece[i];
    if (q.piece_is_constant(i) && sigma.piece_is_constant(si)) {
      const double qc = std::get<Constant>(q.piece(i)).value.real();
      const double sc = std::get<Constant>(sigma.piece(si)).value.real();
      sum += (w() * qc + sc) * linear_phase_integral(phase(lo), 2.0 * k_ - qc / k_, hi - lo);
    } else {
      sum += panel_integrate([this, i](double x) { return kernel_in(i, x); }, lo, hi, phase_rate(i), cfg);
    }
  }
  return sum;
}

cplx WkbKernel::oscillatory_integral(const IntervalFunction& g, cplx zeta, double a, double b,
                                     const QuadratureConfig& cfg) const {
  if (a > b) return -oscillatory_integral(g, zeta, b, a, cfg);
  a = std::max(a, 0.0);
  b = std::min({b, x_max(), g.x_max()});
  cplx sum{0.0, 0.0};
  const auto& q = profile_->q;
  walk_pieces(q, g, a, b, [&](double lo, double hi, std::size_t i, std::size_t j) {
    if (q.piece_is_constant(i) && g.piece_is_constant(j)) {
      const double qc = std::get<Constant>(q.piece(i)).value.real();
      const cplx gc = std::get<Constant>(g.piece(j)).value;
      sum += zeta * gc * linear_phase_integral(phase(lo), 2.0 * k_ - qc / k_, hi - lo);
      return;
    }
    const double rate = 2.0 * k_ + profile_->q_sup[i] / k_ + q.phase_rate(i) + g.phase_rate(j);
    sum += panel_integrate([&](double x) { return zeta * std::polar(1.0, -phase(x)) * g.eval_in(j, x); }, lo, hi,
                           rate, cfg);
  });
  return sum;
}

}  // namespace mjost
