#pragma once

#include <array>
#include <limits>
#include <span>
#include <vector>

#include "mjost/detail/rk.hpp"
#include "mjost/potential.hpp"

namespace mjost {

/// Two complex components. In eigen form a = u^[1], b = u; in the Y system
/// they are Y1, Y2.
struct State2 {
  cplx a{0.0, 0.0};
  cplx b{0.0, 0.0};
};

struct TransferMatrix {
  std::array<std::array<cplx, 2>, 2> m{};
  double x0 = 0.0;
  double x1 = 0.0;
  double E = 0.0;

  cplx det() const { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }
};

enum class StepMethod {
  adaptive,        // embedded RK everywhere
  exact_constant,  // matrix exponential on pieces where sigma and tau are constant, RK elsewhere
};

struct IntegratorConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double max_step = std::numeric_limits<double>::infinity();
  StepMethod method = StepMethod::exact_constant;

  void validate() const;
};

struct Trajectory {
  std::vector<double> x;
  std::vector<State2> y;
};

/// Solve (u^[1], u)' = [[-sigma, tau - sigma^2 - E], [1, sigma]] (u^[1], u) from
/// x0 to x1 (either direction). Samples land on every coefficient breakpoint,
/// every point of `sample_at` inside the range, and every accepted RK step.
Trajectory integrate_eigen(const Decomposition& d, double E, State2 init, double x0, double x1,
                           const IntegratorConfig& cfg = {}, std::span<const double> sample_at = {});

/// Propagator of one constant piece: exp(A t) for A = [[-s, c - s^2 - E], [1, s]].
std::array<std::array<cplx, 2>, 2> constant_propagator(double s, double c, double E, double t);

TransferMatrix transfer_matrix(const Decomposition& d, double E, double x, const IntegratorConfig& cfg = {});

/// W(u, v) = u v^[1] - u^[1] v with u = uL.b, u^[1] = uL.a.
cplx wronskian(const State2& uL, const State2& uR);

}  // namespace mjost
