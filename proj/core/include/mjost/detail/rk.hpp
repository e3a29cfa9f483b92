#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/numeric/odeint/stepper/runge_kutta_cash_karp54.hpp>

namespace mjost {

/// Step size underflow in an adaptive integration; carries the last accepted x.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double last_good_x)
      : std::runtime_error(what), last_good_x_(last_good_x) {}
  double last_good_x() const { return last_good_x_; }

 private:
  double last_good_x_;
};

namespace detail {

/// A stretch of the integration path that never crosses a coefficient
/// discontinuity. `id` lets the right-hand side evaluate the correct piece.
struct Segment {
  double from = 0.0;
  double to = 0.0;
  std::size_t id = 0;
  double max_step = std::numeric_limits<double>::infinity();
};

struct StepControl {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
};

template <class State>
double error_norm(const State& y0, const State& y1, const State& err, const StepControl& c) {
  double e = 0.0;
  for (std::size_t i = 0; i < y1.size(); ++i) {
    const double scale = c.abs_tol + c.rel_tol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    e = std::max(e, std::abs(err[i]) / scale);
  }
  return e;
}

/// Embedded Cash-Karp 5(4) with a step-size controller that ends exactly on every
/// segment boundary. rhs(x, y, dy, segment); observer(x, y, segment, at_end)
/// sees every accepted step. RKF7(8) is avoided: its error estimate vanishes
/// identically on pure quadratures.
template <class State, class Rhs, class Observer>
void integrate_segments(const std::vector<Segment>& segments, State& y, Rhs&& rhs, Observer&& observer,
                        const StepControl& control) {
  using Stepper = boost::numeric::odeint::runge_kutta_cash_karp54<State, double, State, double>;
  Stepper stepper;
  double h_prev = 0.0;
  for (const Segment& seg : segments) {
    const double span = seg.to - seg.from;
    if (span == 0.0) {
      observer(seg.to, y, seg, true);
      continue;
    }
    const double dir = span > 0 ? 1.0 : -1.0;
    auto system = [&](const State& s, State& ds, double x) { rhs(x, s, ds, seg); };
    double x = seg.from;
    double h = std::min({std::abs(span), seg.max_step, h_prev > 0.0 ? h_prev : std::abs(span)});
    State trial = y;
    State err = y;
    while (true) {
      const double remaining = std::abs(seg.to - x);
      const bool last = h >= remaining * (1.0 - 1e-12);
      const double step = last ? remaining : h;
      trial = y;
      stepper.do_step(system, trial, x, dir * step, err);
      const double e = error_norm(y, trial, err, control);
      if (e <= 1.0 && std::isfinite(e)) {
        y = trial;
        x = last ? seg.to : x + dir * step;
        observer(x, y, seg, last);
        const double grow = e == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(e, -1.0 / 5.0), 0.2, 5.0);
        h = std::min(step * grow, seg.max_step);
        if (!last || step * grow > h_prev) h_prev = step * grow;
        if (last) break;
      } else {
        const double shrink = std::isfinite(e) ? std::clamp(0.9 * std::pow(e, -1.0 / 5.0), 0.2, 1.0) : 0.2;
        h = step * shrink;
        if (h < 1e-14 * std::max(1.0, std::abs(x)))
          throw IntegrationError("step size underflow at x = " + std::to_string(x), x);
      }
    }
  }
}

}  // namespace detail
}  // namespace mjost
