#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mjost/martingale.hpp"
#include "mjost/multilinear.hpp"
#include "mjost/ode.hpp"
#include "mjost/potential.hpp"

namespace mjost {

enum class JostMethod { direct, series };
enum class PhaseConvention { q_phase, tau_phase };

struct JostOptions {
  IntegratorConfig integrator{};
  /// Points that must appear among the samples (e.g. residual checkpoints).
  std::vector<double> sample_at;
  /// The tau-phase comparison is flagged unless (1/2k) ∫_{X/2}^{X} sigma^2 is at most this.
  double tau_phase_sigma_tail = 0.05;
  // Series path.
  MultilinearConfig multilinear{};
  double series_tail_target = 1e-8;
  double series_grid_spacing = 0.25;
};

struct JostResult {
  double E = 0.0;
  double k = 0.0;
  double X_max = 0.0;
  JostMethod method = JostMethod::direct;
  std::vector<double> x;
  std::vector<cplx> u;
  std::vector<cplx> u_quasi;
  std::vector<State2> Y;  // a = Y1, b = Y2
  /// kx - Qint(x)/(2k) and kx - ∫_0^x tau/(2k) at each sample.
  std::vector<double> q_phase;
  std::vector<double> tau_phase;
  std::vector<double> wkb_residual;        // |u e^{-i q_phase} - 1|
  std::vector<double> wkb_residual_quasi;  // |u^[1] e^{-i q_phase}/(ik) - 1|
  std::vector<double> wkb_residual_tau;    // |u e^{iL/2k} e^{-i tau_phase} - 1|
  double gauge_L = 0.0;                    // ∫_0^X (Q - tau)
  bool tau_phase_applicable = true;
  double wronskian_error = 0.0;            // max |W(conj u, u) - 2ik| / 2k
  std::optional<int> series_order;
  std::vector<double> order_norms;         // series: max_x |B_n|, index n
  std::map<std::string, double> diagnostics;
  std::vector<std::string> warnings;
};

/// Integrator failure carrying the samples computed before it (from X_max
/// down to last_good_x).
class JostFailure : public IntegrationError {
 public:
  JostFailure(const IntegrationError& e, JostResult partial)
      : IntegrationError(e.what(), e.last_good_x()), partial_(std::make_shared<JostResult>(std::move(partial))) {}
  const JostResult& partial() const { return *partial_; }

 private:
  std::shared_ptr<const JostResult> partial_;
};

/// Integrates Y' = [[0, F], [conj F, 0]] Y backward from Y(X_max) = (1, 0) and
/// maps Y to (u^[1], u) through u = e^{ih/2} Y1 + e^{-ih/2} Y2,
/// u^[1] = ik (e^{ih/2} Y1 - e^{-ih/2} Y2).
JostResult jost_direct(const WkbKernel& kernel, double X_max, const JostOptions& opts = {});
JostResult jost_direct(const Decomposition& d, double E, double X_max, const JostOptions& opts = {});

/// Truncated series Y = (1 + sum B_2m, -sum B_2m+1). With a structure the
/// order is cut where sum_{m>n} ||F||_{B_1}^m / sqrt(m!) drops below the
/// tail target; otherwise n_max is used as given.
JostResult jost_series(const WkbKernel& kernel, double X_max, int n_max, const MartingaleStructure* ms = nullptr,
                       const JostOptions& opts = {});
JostResult jost_series(const Decomposition& d, double E, double X_max, int n_max,
                       const MartingaleStructure* ms = nullptr, const JostOptions& opts = {});

struct ResidualCurve {
  std::vector<double> x;
  std::vector<double> residual;
  bool warning = false;  // tau-phase requested where it is not applicable
};

ResidualCurve wkb_residual_curve(const JostResult& r, PhaseConvention phase);
/// Residual at the sample closest to x.
double residual_at(const JostResult& r, double x, PhaseConvention phase = PhaseConvention::q_phase);

/// Re-integrates (u^[1], u) forward from the sample nearest `anchor` and
/// returns max |u_forward - u| / max(|u|, tiny) over samples at or after it.
double forward_consistency(const Decomposition& d, const JostResult& r, double anchor,
                           const IntegratorConfig& cfg = {});

}  // namespace mjost
