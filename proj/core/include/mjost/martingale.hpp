#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mjost/potential.hpp"

namespace mjost {

struct AdaptednessReport {
  double total_mass = 0.0;  // ||f||^p in l^p(L^1)
  double min_slack = 0.0;   // min over cells of 2^-m total - ||f chi||^p
  std::size_t cells_checked = 0;
  std::size_t violations = 0;  // cells with slack < -tolerance
};

/// Nested dyadic partitions of [0, x_max): level m (1..m_max) has 2^m
/// left-closed cells. All levels are subsamples of the finest one, so
/// refinement holds exactly.
class MartingaleStructure {
 public:
  static constexpr int kMaxLevels = 16;

  static MartingaleStructure uniform(double x_max, int m_max);
  /// Cells chosen as quantiles of G(x) = ||f chi_[0,x)||^p_{l^p(L^1)}, then
  /// checked for adaptedness.
  static MartingaleStructure adapted(const IntervalFunction& f, double p, int m_max,
                                     std::string tag = {});

  int m_max() const { return m_max_; }
  double x_max() const { return finest_.back(); }
  double p() const { return p_; }
  const std::optional<std::string>& adapted_to() const { return adapted_to_; }
  const std::optional<AdaptednessReport>& adaptedness() const { return report_; }

  std::span<const double> finest() const { return finest_; }
  std::size_t cells(int m) const { return std::size_t{1} << m; }
  /// Breakpoints of level m (2^m + 1 values).
  std::vector<double> level(int m) const;
  std::pair<double, double> cell(int m, std::size_t j) const;

 private:
  MartingaleStructure() = default;
  std::vector<double> finest_;
  int m_max_ = 0;
  double p_ = 1.0;
  std::optional<std::string> adapted_to_;
  std::optional<AdaptednessReport> report_;
};

/// Checks ||f chi^m_j||^p <= 2^-m ||f||^p + tolerance for every cell.
AdaptednessReport check_adaptedness(const MartingaleStructure& ms, const IntervalFunction& f, double p,
                                    double tolerance = 1e-10);

/// ||f chi_[a,b)||^p_{l^p(L^1)} and its cumulative version G.
class LpL1Mass {
 public:
  LpL1Mass(const IntervalFunction& f, double p);
  double between(double a, double b) const;
  double cumulative(double x) const { return between(0.0, x); }
  double total() const { return cumulative(x_max_); }

 private:
  Antiderivative abs_int_;
  std::vector<double> cell_prefix_;  // sum of full-cell masses^p before cell n
  double p_;
  double x_max_;
};

struct BsReport {
  double s = 1.0;
  std::vector<double> terms;  // terms[m-1] = m^s (sum_j |∫_{E^m_j} f|^2)^(1/2)
  double total = 0.0;
  /// last term times r/(1-r) with r the ratio of the last two terms;
  /// +inf when the terms do not decay. Not included in total.
  double tail_estimate = 0.0;
};

/// Integrals over the finest cells.
std::vector<cplx> finest_cell_integrals(const MartingaleStructure& ms,
                                        const std::function<cplx(double, double)>& integrate);
BsReport bs_from_cell_integrals(const MartingaleStructure& ms, std::span<const cplx> finest, double s);

BsReport bs_seminorm(const IntervalFunction& f, const MartingaleStructure& ms, double s,
                     const QuadratureConfig& cfg = {});
BsReport bs_seminorm(const std::function<cplx(double)>& f, const MartingaleStructure& ms, double s,
                     const QuadratureConfig& cfg = {});
/// Seminorm of the kernel F(., E) of `kernel`.
BsReport bs_seminorm(const WkbKernel& kernel, const MartingaleStructure& ms, double s,
                     const QuadratureConfig& cfg = {});

/// ||F chi_[M, x_max)||_{B_s} for every cutoff M. `finest` holds the
/// integrals of F over the finest cells; only cells straddling M are
/// re-integrated.
std::vector<double> bs_tails(const MartingaleStructure& ms, std::span<const cplx> finest, double s,
                             std::span<const double> cutoffs,
                             const std::function<cplx(double, double)>& integrate);

using ZetaFn = std::function<cplx(double)>;

/// ∫_y^{x_max} zeta e^{-ih} f for constant zeta (closed form where f and Q are constant).
cplx s_zeta(cplx zeta, const IntervalFunction& f, const WkbKernel& kernel, double y = 0.0,
            const QuadratureConfig& cfg = {});
cplx s_zeta(const ZetaFn& zeta, const IntervalFunction& f, const WkbKernel& kernel, double y = 0.0,
            const QuadratureConfig& cfg = {});

struct ZetaTerm {
  std::variant<cplx, ZetaFn> zeta;
  IntervalFunction f;
};

/// B_s norm of the cell sequence sum_terms S_zeta(f chi^m_j).
BsReport g_functional(const std::vector<ZetaTerm>& terms, const MartingaleStructure& ms, double s,
                      const WkbKernel& kernel, const QuadratureConfig& cfg = {});

}  // namespace mjost
