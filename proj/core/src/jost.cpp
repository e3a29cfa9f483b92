#include "mjost/jost.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace mjost {

namespace {

void check_range(const WkbKernel& kernel, double X_max) {
  if (!(X_max > 0.0) || X_max > kernel.x_max() * (1.0 + 1e-15))
    throw ParameterError("X_max must lie in (0, domain end]");
}

// Fill u, residuals and the Wronskian from x and Y.
void finish(JostResult& r, const WkbKernel& kernel, const JostOptions& opts) {
  const double k = kernel.k();
  const double X = r.X_max;
  r.gauge_L = kernel.q_integral(X) - kernel.tau_integral(X);
  const double sigma2_tail = (kernel.q_integral(0.5 * X) - kernel.tau_integral(0.5 * X) - r.gauge_L) / (2.0 * k);
  r.tau_phase_applicable = sigma2_tail <= opts.tau_phase_sigma_tail;
  if (!r.tau_phase_applicable) r.warnings.push_back("tau_phase_not_applicable");
  r.diagnostics["gauge_L"] = r.gauge_L;
  r.diagnostics["sigma2_tail"] = sigma2_tail;

  const std::size_t n = r.x.size();
  r.u.resize(n);
  r.u_quasi.resize(n);
  r.q_phase.resize(n);
  r.tau_phase.resize(n);
  r.wkb_residual.resize(n);
  r.wkb_residual_quasi.resize(n);
  r.wkb_residual_tau.resize(n);
  const cplx ik(0.0, k);
  const cplx gauge = std::polar(1.0, r.gauge_L / (2.0 * k));
  double werr = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = r.x[i];
    r.q_phase[i] = k * x - kernel.q_integral(x) / (2.0 * k);
    r.tau_phase[i] = k * x - kernel.tau_integral(x) / (2.0 * k);
    const cplx e = std::polar(1.0, r.q_phase[i]);
    const cplx eb = std::conj(e);
    const cplx u = e * r.Y[i].a + eb * r.Y[i].b;
    const cplx uq = ik * (e * r.Y[i].a - eb * r.Y[i].b);
    r.u[i] = u;
    r.u_quasi[i] = uq;
    r.wkb_residual[i] = std::abs(u * eb - 1.0);
    r.wkb_residual_quasi[i] = std::abs(uq * eb / ik - 1.0);
    r.wkb_residual_tau[i] = std::abs(u * gauge * std::polar(1.0, -r.tau_phase[i]) - 1.0);
    const cplx w = wronskian({std::conj(uq), std::conj(u)}, {uq, u});
    werr = std::max(werr, std::abs(w - 2.0 * ik) / (2.0 * k));
  }
  r.wronskian_error = werr;
}

std::vector<double> cut_points(const WkbKernel& kernel, double X, std::span<const double> extra) {
  std::vector<double> cuts{0.0};
  for (double b : kernel.profile().q.breakpoints())
    if (b > 0.0 && b < X) cuts.push_back(b);
  for (double s : extra)
    if (s > 0.0 && s < X) cuts.push_back(s);
  cuts.push_back(X);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  return cuts;
}

}  // namespace

JostResult jost_direct(const WkbKernel& kernel, double X_max, const JostOptions& opts) {
  check_range(kernel, X_max);
  opts.integrator.validate();
  const auto& q = kernel.profile().q;
  const auto& sigma = kernel.decomposition().sigma;
  const auto cuts = cut_points(kernel, X_max, opts.sample_at);

  std::vector<detail::Segment> segments;
  std::vector<char> free_piece;
  segments.reserve(cuts.size());
  for (std::size_t i = cuts.size() - 1; i > 0; --i) {
    const std::size_t qi = q.locate(0.5 * (cuts[i - 1] + cuts[i]));
    const std::size_t si = kernel.profile().sigma_piece[qi];
    const bool zero = q.piece_is_constant(qi) && sigma.piece_is_constant(si) &&
                      std::get<Constant>(q.piece(qi)).value == cplx(0.0, 0.0) &&
                      std::get<Constant>(sigma.piece(si)).value == cplx(0.0, 0.0);
    segments.push_back({cuts[i], cuts[i - 1], qi,
                        std::min(opts.integrator.max_step, std::numbers::pi / kernel.phase_rate(qi))});
    free_piece.push_back(zero ? 1 : 0);
  }

  JostResult r;
  r.E = kernel.E();
  r.k = kernel.k();
  r.X_max = X_max;
  r.method = JostMethod::direct;
  std::vector<double> xs{X_max};
  std::vector<State2> ys{{1.0, 0.0}};
  std::vector<double> l1{0.0};

  using State = std::array<cplx, 3>;  // Y1, Y2, ∫_x^X |F|
  State y{1.0, 0.0, 0.0};
  auto rhs = [&](double x, const State& s, State& ds, const detail::Segment& seg) {
    const cplx F = kernel.kernel_in(seg.id, x);
    ds[0] = F * s[1];
    ds[1] = std::conj(F) * s[0];
    ds[2] = -std::abs(F);
  };
  auto observer = [&](double x, const State& s, const detail::Segment&, bool) {
    xs.push_back(x);
    ys.push_back({s[0], s[1]});
    l1.push_back(s[2].real());
  };
  const detail::StepControl control{opts.integrator.rel_tol, opts.integrator.abs_tol};
  std::size_t i = 0;
  try {
    while (i < segments.size()) {
      if (free_piece[i]) {
        observer(segments[i].to, y, segments[i], true);
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j < segments.size() && !free_piece[j]) ++j;
      std::vector<detail::Segment> run(segments.begin() + static_cast<std::ptrdiff_t>(i),
                                       segments.begin() + static_cast<std::ptrdiff_t>(j));
      detail::integrate_segments(run, y, rhs, observer, control);
      i = j;
    }
  } catch (const IntegrationError& e) {
    std::reverse(xs.begin(), xs.end());
    std::reverse(ys.begin(), ys.end());
    r.x = std::move(xs);
    r.Y = std::move(ys);
    finish(r, kernel, opts);
    throw JostFailure(e, std::move(r));
  }

  std::reverse(xs.begin(), xs.end());
  std::reverse(ys.begin(), ys.end());
  std::reverse(l1.begin(), l1.end());
  double gronwall = 0.0;
  for (std::size_t n = 0; n < xs.size(); ++n) {
    const double norm = std::sqrt(std::norm(ys[n].a) + std::norm(ys[n].b));
    gronwall = std::max(gronwall, norm / std::exp(l1[n]));
  }
  r.x = std::move(xs);
  r.Y = std::move(ys);
  r.diagnostics["kernel_l1"] = l1.front();
  r.diagnostics["gronwall_max_ratio"] = gronwall;
  r.diagnostics["samples"] = static_cast<double>(r.x.size());
  if (gronwall > 1.0 + 1e-8) r.warnings.push_back("gronwall_bound_exceeded");
  finish(r, kernel, opts);
  return r;
}

JostResult jost_direct(const Decomposition& d, double E, double X_max, const JostOptions& opts) {
  return jost_direct(WkbKernel(d, E), X_max, opts);
}

JostResult jost_series(const WkbKernel& kernel, double X_max, int n_max, const MartingaleStructure* ms,
                       const JostOptions& opts) {
  check_range(kernel, X_max);
  if (n_max < 0) throw ParameterError("n_max must be nonnegative");
  JostResult r;
  r.E = kernel.E();
  r.k = kernel.k();
  r.X_max = X_max;
  r.method = JostMethod::series;

  int order = n_max;
  double b1 = std::numeric_limits<double>::quiet_NaN();
  if (ms != nullptr && n_max > 0) {
    b1 = bs_seminorm(kernel, *ms, 1.0).total;
    r.diagnostics["b1_norm"] = b1;
    // Smallest n whose bound tail sum_{m>n} b1^m / sqrt(m!) is below target.
    for (int n = 1; n <= n_max; ++n) {
      double tail = 0.0, term = 1.0;
      for (int m = 1; m <= n + 200; ++m) {
        term *= b1 / std::sqrt(static_cast<double>(m));
        if (m > n) tail += term;
      }
      if (tail < opts.series_tail_target) {
        order = n;
        break;
      }
    }
  }
  r.series_order = order;

  std::vector<double> extra(opts.sample_at);
  if (opts.series_grid_spacing > 0.0)
    for (double x = opts.series_grid_spacing; x < X_max; x += opts.series_grid_spacing) extra.push_back(x);
  r.x = cut_points(kernel, X_max, extra);

  const std::size_t G = r.x.size();
  r.Y.assign(G, State2{1.0, 0.0});
  r.order_norms.assign(static_cast<std::size_t>(order) + 1, 0.0);
  r.order_norms[0] = 1.0;
  if (order > 0) {
    const auto f = kernel.kernel_function();
    const auto table = iterated_tails(f, series_pattern(order), r.x, X_max, order, opts.multilinear);
    for (int n = 1; n <= order; ++n) {
      const auto& bn = table.values[static_cast<std::size_t>(n)];
      double mx = 0.0;
      for (std::size_t i = 0; i < G; ++i) {
        mx = std::max(mx, std::abs(bn[i]));
        if (n % 2 == 0)
          r.Y[i].a += bn[i];
        else
          r.Y[i].b -= bn[i];
      }
      r.order_norms[static_cast<std::size_t>(n)] = mx;
    }
    if (order >= 2 && r.order_norms[static_cast<std::size_t>(order)] >= r.order_norms[static_cast<std::size_t>(order) - 1]) {
      r.diagnostics["series_diverging"] = 1.0;
      r.warnings.push_back("series_terms_not_decreasing");
    }
    if (std::isfinite(b1) && b1 > 0.0) {
      double fact = 1.0;
      for (int n = 1; n <= order; ++n) {
        fact *= n;
        r.diagnostics["factorial_ratio_" + std::to_string(n)] =
            r.order_norms[static_cast<std::size_t>(n)] * std::sqrt(fact) / std::pow(b1, n);
      }
    }
  }
  r.diagnostics["series_order"] = order;
  finish(r, kernel, opts);
  return r;
}

JostResult jost_series(const Decomposition& d, double E, double X_max, int n_max, const MartingaleStructure* ms,
                       const JostOptions& opts) {
  return jost_series(WkbKernel(d, E), X_max, n_max, ms, opts);
}

ResidualCurve wkb_residual_curve(const JostResult& r, PhaseConvention phase) {
  ResidualCurve c;
  c.x = r.x;
  if (phase == PhaseConvention::q_phase) {
    c.residual = r.wkb_residual;
  } else {
    c.residual = r.wkb_residual_tau;
    c.warning = !r.tau_phase_applicable;
  }
  return c;
}

double residual_at(const JostResult& r, double x, PhaseConvention phase) {
  if (r.x.empty()) throw ParameterError("residual_at: result has no samples");
  auto it = std::lower_bound(r.x.begin(), r.x.end(), x);
  std::size_t i = static_cast<std::size_t>(it - r.x.begin());
  if (i == r.x.size() || (i > 0 && std::abs(r.x[i - 1] - x) < std::abs(r.x[i] - x))) --i;
  return phase == PhaseConvention::q_phase ? r.wkb_residual[i] : r.wkb_residual_tau[i];
}

double forward_consistency(const Decomposition& d, const JostResult& r, double anchor, const IntegratorConfig& cfg) {
  auto it = std::lower_bound(r.x.begin(), r.x.end(), anchor);
  if (it == r.x.end()) throw ParameterError("forward_consistency: anchor beyond the samples");
  const std::size_t i0 = static_cast<std::size_t>(it - r.x.begin());
  const std::vector<double> targets(r.x.begin() + static_cast<std::ptrdiff_t>(i0), r.x.end());
  const auto traj = integrate_eigen(d, r.E, {r.u_quasi[i0], r.u[i0]}, r.x[i0], r.X_max, cfg, targets);
  double worst = 0.0;
  std::size_t j = 0;
  for (std::size_t i = i0; i < r.x.size(); ++i) {
    while (j < traj.x.size() && traj.x[j] < r.x[i]) ++j;
    if (j == traj.x.size()) break;
    if (traj.x[j] != r.x[i]) continue;
    const double scale = std::max(std::abs(r.u[i]), 1e-300);
    worst = std::max(worst, std::abs(traj.y[j].b - r.u[i]) / scale);
  }
  return worst;
}

}  // namespace mjost
