#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "mjost/antiderivative.hpp"
#include "mjost/interval_function.hpp"

namespace mjost {

/// V = sigma' + tau on [0, x_max], both real.
struct Decomposition {
  IntervalFunction sigma;
  IntervalFunction tau;
  double gamma = 0.0;
  std::string family_tag;

  double x_max() const { return sigma.x_max(); }
};

/// Point masses a_n at x_n. By default sigma is the step function
/// -(sum_{x_n > x} a_n + tail_mass), so it vanishes at infinity when tail_mass
/// accounts for masses beyond the listed positions. With cell_local each mass is
/// compensated inside its unit cell: sigma = a_n (H(x - x_n) - (x - c)/w),
/// tau = a_n / w, which keeps sigma supported in the cell.
struct DeltaComb {
  std::vector<double> positions;
  std::vector<double> weights;
  double tail_mass = 0.0;
  bool cell_local = false;
};

/// V(x) = x^a sin(x^b), b > 1, a + b > -1.
struct Oscillatory {
  double a = 0.0;
  double b = 2.0;
};

/// V = (-1)^floor(2n (x - (n-1))) on [n-1, n): sign flips on a mesh of width 1/(2n).
struct PlusMinusOne {};

struct ClassicalL1 {
  IntervalFunction tau;
};

struct Custom {
  IntervalFunction sigma;
  IntervalFunction tau;
};

using PotentialFamily = std::variant<DeltaComb, Oscillatory, PlusMinusOne, ClassicalL1, Custom>;

/// Comb with weights amplitude * n^-alpha at the integers 1 <= n < x_max. For
/// alpha > 1 the masses at n >= x_max are summed into tail_mass
/// (Euler-Maclaurin); otherwise tail_mass is 0.
DeltaComb power_law_comb(double amplitude, double alpha, double x_max, bool cell_local = false);

Decomposition build_decomposition(const PotentialFamily& family, double x_max);

/// sigma = (1+x)^-gamma a, tau = (1+x)^-gamma (gamma a / (1+x) + b).
Decomposition decompose_weighted(const IntervalFunction& a, const IntervalFunction& b, double gamma);

/// Unit-cell L^q norms over (n, n+1) ∩ [x0, x1]; q must be 1 or 2.
std::vector<double> cell_norms(const IntervalFunction& f, double q, double x0, double x1);
/// (sum over unit cells of ||f||_{L^q(cell)}^p)^(1/p).
double lplq_norm(const IntervalFunction& f, double p, double q, double x0, double x1);

/// ∫_0^x (tau1 - tau2).
cplx gauge_shift(const Decomposition& d1, const Decomposition& d2, double x);
std::vector<cplx> gauge_shift_curve(const Decomposition& d1, const Decomposition& d2,
                                    std::span<const double> xs);

/// Energy-independent data shared by every kernel built on one decomposition.
struct QProfile {
  Decomposition decomposition;
  IntervalFunction q;  // tau - sigma^2
  Antiderivative q_int;
  Antiderivative tau_int;
  std::vector<std::size_t> sigma_piece;  // per piece of q
  std::vector<std::size_t> tau_piece;
  std::vector<double> q_sup;

  static std::shared_ptr<const QProfile> build(const Decomposition& d);
};

/// The WKB quantities at one energy: h = 2kx - Qint/k, w = -i/(2k),
/// Q~ = Q + 2ik sigma, F = w e^{-ih} Q~.
class WkbKernel {
 public:
  WkbKernel(const Decomposition& d, double E);
  WkbKernel(std::shared_ptr<const QProfile> profile, double E);

  double E() const { return E_; }
  double k() const { return k_; }
  cplx w() const { return {0.0, -0.5 / k_}; }
  double x_max() const { return profile_->q.x_max(); }
  const QProfile& profile() const { return *profile_; }
  std::shared_ptr<const QProfile> profile_ptr() const { return profile_; }
  const Decomposition& decomposition() const { return profile_->decomposition; }

  double q_integral(double x) const { return profile_->q_int(x).real(); }
  double tau_integral(double x) const { return profile_->tau_int(x).real(); }
  double phase(double x) const { return 2.0 * k_ * x - q_integral(x) / k_; }

  /// Evaluations inside piece i of the Q function (one-sided at its ends).
  cplx effective_potential_in(std::size_t i, double x) const;
  cplx kernel_in(std::size_t i, double x) const;
  double sigma_in(std::size_t i, double x) const;

  cplx effective_potential(double x) const;
  cplx kernel(double x) const;
  /// Bound on |h'| plus the coefficient oscillation on piece i.
  double phase_rate(std::size_t i) const;

  IntervalFunction kernel_function() const;
  /// ∫_a^b F; closed form where Q and sigma are constant.
  cplx integrate_kernel(double a, double b, const QuadratureConfig& cfg = {}) const;
  /// ∫_a^b zeta e^{-ih} g, closed form where g and Q are constant.
  cplx oscillatory_integral(const IntervalFunction& g, cplx zeta, double a, double b,
                            const QuadratureConfig& cfg = {}) const;

 private:
  std::shared_ptr<const QProfile> profile_;
  double E_;
  double k_;
};

/// ∫_a^b e^{-i(h0 + alpha (x - a))} dx.
cplx linear_phase_integral(double h0, double alpha, double length);

}  // namespace mjost
