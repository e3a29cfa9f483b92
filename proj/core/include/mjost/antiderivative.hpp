#pragma once

#include <span>
#include <vector>

#include "mjost/interval_function.hpp"

namespace mjost {

/// Cached x -> ∫_0^x f. Polynomial pieces use the closed-form antiderivative;
/// smooth pieces are cut into panels (at most a quarter turn of phase each) and
/// the integral is stored as a Chebyshev expansion per panel. Each panel's
/// expansion is checked against Gauss-Legendre and split until they agree.
class Antiderivative {
 public:
  Antiderivative() = default;
  explicit Antiderivative(const IntervalFunction& f, const QuadratureConfig& cfg = {});

  cplx operator()(double x) const;
  cplx between(double a, double b) const { return (*this)(b) - (*this)(a); }

  double x_max() const { return panels_.empty() ? 0.0 : panels_.back().b; }
  std::size_t panel_count() const { return panels_.size(); }
  const IntervalFunction& function() const { return f_; }

 private:
  struct Panel {
    double a = 0.0;
    double b = 0.0;
    bool chebyshev = false;
    cplx base{0.0, 0.0};         // ∫_0^a f
    std::vector<cplx> coeffs;   // antiderivative in t = x - a, or Chebyshev coefficients on [a, b]
  };

  void add_polynomial(const std::vector<cplx>& c, double a, double b);
  void add_smooth(const Smooth& s, double a, double b, int depth);

  IntervalFunction f_;
  std::vector<Panel> panels_;
  std::vector<double> starts_;
  cplx running_{0.0, 0.0};
};

}  // namespace mjost
