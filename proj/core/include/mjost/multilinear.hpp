#pragma once

#include <span>
#include <vector>

#include "mjost/interval_function.hpp"
#include "mjost/martingale.hpp"

namespace mjost {

enum class Conj { plain, conjugate };
using ConjugationPattern = std::vector<Conj>;

/// Alternating pattern of length n ending with a conjugate factor. The last m
/// entries are the pattern of the order-m series term, so one pattern serves
/// every order up to n.
ConjugationPattern series_pattern(int n);
/// Alternating pattern of length n starting with a plain factor.
ConjugationPattern alternating_pattern(int n);

struct MultilinearConfig {
  double rel_tol = 1e-12;
  double abs_tol = 1e-16;
};

/// Iterated integrals of the pattern entries over an interval:
/// s(a, b) = ∫_{x <= t_{a+1} <= ... <= t_b <= y} g_{a+1} ... g_b, s(a, a) = 1.
/// Concatenating intervals multiplies signatures (Chen).
class Signature {
 public:
  explicit Signature(std::size_t n);  // identity
  std::size_t order() const { return n_; }
  cplx& operator()(std::size_t a, std::size_t b) { return v_[a * (n_ + 1) + b]; }
  cplx operator()(std::size_t a, std::size_t b) const { return v_[a * (n_ + 1) + b]; }
  friend Signature operator*(const Signature& lhs, const Signature& rhs);

 private:
  std::size_t n_;
  std::vector<cplx> v_;
};

Signature interval_signature(const IntervalFunction& f, const ConjugationPattern& pattern, double x, double y,
                             const MultilinearConfig& cfg = {});

struct IteratedIntegralTable {
  std::vector<double> x_grid;
  /// values[n][i] = B_n(x_i): tail integral over [x_i, x_max] of the last n
  /// pattern entries. values[0] is identically 1.
  std::vector<std::vector<cplx>> values;
  ConjugationPattern pattern;
  double x_max = 0.0;
};

/// B_n for n = 0..n_max by right-to-left accumulation over the grid; the grid
/// must be increasing and end at x_max. pattern.size() must equal n_max.
IteratedIntegralTable iterated_tails(const IntervalFunction& f, const ConjugationPattern& pattern,
                                     std::span<const double> x_grid, double x_max, int n_max,
                                     const MultilinearConfig& cfg = {});

/// M_n(f)(x, x1) over the simplex x <= t_1 <= ... <= t_n <= x1, n = pattern.size().
cplx m_n(const IntervalFunction& f, const ConjugationPattern& pattern, double x, double x1,
         const MultilinearConfig& cfg = {});

/// Same quantity by nested adaptive quadrature (slow; used as an oracle).
cplx m_n_nested(const IntervalFunction& f, const ConjugationPattern& pattern, double x, double x1,
                const QuadratureConfig& cfg = {});

/// Grid with at least `density` points per 2π of local phase (and every
/// breakpoint of f), capped at max_points by uniform thinning.
std::vector<double> oscillation_grid(const IntervalFunction& f, double x_max, double density,
                                     std::size_t max_points = 1500);

/// max over grid pairs x <= x' of |M_b(f)(x, x')| for every prefix length
/// b = 1..pattern.size(). A lower bound for the true supremum.
std::vector<double> maximal_m_n_all(const IntervalFunction& f, const ConjugationPattern& pattern,
                                    std::span<const double> grid, const MultilinearConfig& cfg = {});
double maximal_m_n(const IntervalFunction& f, const ConjugationPattern& pattern, int n, double x_max,
                   double grid_density, const MultilinearConfig& cfg = {});

struct FactorialBoundReport {
  double b1_norm = 0.0;
  std::vector<double> m_star;  // index n-1
  std::vector<double> r;       // M_n* sqrt(n!) / ||f||_{B_1}^n
  std::vector<double> r_root;  // r_n^(1/n)
  bool degenerate = false;     // ||f||_{B_1} = 0 while f is not
};

FactorialBoundReport factorial_bound_report(const IntervalFunction& f, const MartingaleStructure& ms, int n_max,
                                            double x_max, double grid_density = 4.0,
                                            const MultilinearConfig& cfg = {});

}  // namespace mjost
