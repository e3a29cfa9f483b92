#include "mjost/ode.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace mjost {

void IntegratorConfig::validate() const {
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw ParameterError("integrator tolerances must be positive");
  if (!(max_step > 0.0)) throw ParameterError("integrator max_step must be positive");
}

std::array<std::array<cplx, 2>, 2> constant_propagator(double s, double c, double E, double t) {
  // A^2 = (c - E) I, so exp(At) = cosh(mu t) I + sinh(mu t)/mu A.
  const cplx mu = std::sqrt(cplx(c - E, 0.0));
  const cplx z = mu * t;
  cplx ch, sh_over_mu;
  if (std::abs(z) < 1e-4) {
    const cplx z2 = z * z;
    ch = 1.0 + z2 / 2.0 + z2 * z2 / 24.0;
    sh_over_mu = t * (1.0 + z2 / 6.0 + z2 * z2 / 120.0);
  } else {
    ch = std::cosh(z);
    sh_over_mu = std::sinh(z) / mu;
  }
  return {{{ch - sh_over_mu * s, sh_over_mu * (c - s * s - E)}, {sh_over_mu, ch + sh_over_mu * s}}};
}

Trajectory integrate_eigen(const Decomposition& d, double E, State2 init, double x0, double x1,
                           const IntegratorConfig& cfg, std::span<const double> sample_at) {
  cfg.validate();
  const double xm = d.x_max();
  if (x0 < 0.0 || x0 > xm || x1 < 0.0 || x1 > xm) throw ParameterError("integration range outside the domain");
  const double lo = std::min(x0, x1), hi = std::max(x0, x1);

  std::vector<double> cuts{lo};
  for (double b : merge_breakpoints(d.sigma.breakpoints(), d.tau.breakpoints()))
    if (b > lo && b < hi) cuts.push_back(b);
  for (double s : sample_at)
    if (s > lo && s < hi) cuts.push_back(s);
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  if (x1 < x0) std::reverse(cuts.begin(), cuts.end());

  struct PieceRef {
    std::size_t si, ti;
    bool constant;
  };
  std::vector<PieceRef> refs;
  std::vector<detail::Segment> segments;
  refs.reserve(cuts.size());
  segments.reserve(cuts.size());
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
    const std::size_t si = d.sigma.locate(mid), ti = d.tau.locate(mid);
    const bool constant = d.sigma.piece_is_constant(si) && d.tau.piece_is_constant(ti);
    const double ss = d.sigma.sup_abs(si);
    const double rate = std::sqrt(E) + std::sqrt(d.tau.sup_abs(ti) + ss * ss) + d.sigma.phase_rate(si) +
                        d.tau.phase_rate(ti);
    refs.push_back({si, ti, constant});
    segments.push_back({cuts[i], cuts[i + 1], i, std::min(cfg.max_step, std::numbers::pi / rate)});
  }

  Trajectory out;
  out.x.push_back(x0);
  out.y.push_back(init);
  using State = std::array<cplx, 2>;
  State y{init.a, init.b};
  auto rhs = [&](double x, const State& s, State& ds, const detail::Segment& seg) {
    const double sg = d.sigma.eval_in(refs[seg.id].si, x).real();
    const double ta = d.tau.eval_in(refs[seg.id].ti, x).real();
    ds[0] = -sg * s[0] + (ta - sg * sg - E) * s[1];
    ds[1] = s[0] + sg * s[1];
  };
  auto observer = [&](double x, const State& s, const detail::Segment&, bool) {
    out.x.push_back(x);
    out.y.push_back({s[0], s[1]});
  };
  const detail::StepControl control{cfg.rel_tol, cfg.abs_tol};

  std::size_t i = 0;
  while (i < segments.size()) {
    if (cfg.method == StepMethod::exact_constant && refs[i].constant) {
      const auto& seg = segments[i];
      const double s = std::get<Constant>(d.sigma.piece(refs[i].si)).value.real();
      const double c = std::get<Constant>(d.tau.piece(refs[i].ti)).value.real();
      const auto m = constant_propagator(s, c, E, seg.to - seg.from);
      y = {m[0][0] * y[0] + m[0][1] * y[1], m[1][0] * y[0] + m[1][1] * y[1]};
      observer(seg.to, y, seg, true);
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < segments.size() && !(cfg.method == StepMethod::exact_constant && refs[j].constant)) ++j;
    std::vector<detail::Segment> run(segments.begin() + static_cast<std::ptrdiff_t>(i),
                                     segments.begin() + static_cast<std::ptrdiff_t>(j));
    detail::integrate_segments(run, y, rhs, observer, control);
    i = j;
  }
  return out;
}

TransferMatrix transfer_matrix(const Decomposition& d, double E, double x, const IntegratorConfig& cfg) {
  TransferMatrix t;
  t.x0 = 0.0;
  t.x1 = x;
  t.E = E;
  const auto c1 = integrate_eigen(d, E, {1.0, 0.0}, 0.0, x, cfg).y.back();
  const auto c2 = integrate_eigen(d, E, {0.0, 1.0}, 0.0, x, cfg).y.back();
  t.m = {{{c1.a, c2.a}, {c1.b, c2.b}}};
  return t;
}

cplx wronskian(const State2& uL, const State2& uR) { return uL.b * uR.a - uL.a * uR.b; }

}  // namespace mjost
