#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "mjost/quadrature.hpp"

namespace mjost {

/// Thrown when a construction parameter violates its documented precondition.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Constant {
  cplx value;
};

/// Polynomial in the piece-local coordinate t = x - left, coeffs[i] * t^i.
struct Polynomial {
  std::vector<cplx> coeffs;
};

/// Arbitrary evaluator on a piece, called with the absolute coordinate x.
/// phase_rate bounds the oscillation rate (radians per unit length) and drives
/// panel subdivision in quadrature; 0 means non-oscillatory.
struct Smooth {
  std::function<cplx(double)> eval;
  double phase_rate = 0.0;
};

using Piece = std::variant<Constant, Polynomial, Smooth>;

enum class ValueKind { real, complex };

/// A function on [0, x_max] described piece by piece between strictly
/// increasing breakpoints. Immutable; copies share storage.
class IntervalFunction {
 public:
  IntervalFunction();
  IntervalFunction(std::vector<double> breakpoints, std::vector<Piece> pieces,
                   ValueKind kind = ValueKind::real);

  static IntervalFunction constant(double x_max, cplx value, ValueKind kind = ValueKind::real);
  static IntervalFunction zero(double x_max) { return constant(x_max, 0.0); }
  /// One Smooth piece per interval of `breakpoints` (defaults to [0, x_max]).
  static IntervalFunction smooth(double x_max, std::function<cplx(double)> eval,
                                 double phase_rate = 0.0, ValueKind kind = ValueKind::real,
                                 std::vector<double> breakpoints = {});

  double x_max() const { return data_->breakpoints.back(); }
  std::size_t size() const { return data_->pieces.size(); }
  std::span<const double> breakpoints() const { return data_->breakpoints; }
  const Piece& piece(std::size_t i) const { return data_->pieces[i]; }
  double left(std::size_t i) const { return data_->breakpoints[i]; }
  double right(std::size_t i) const { return data_->breakpoints[i + 1]; }
  ValueKind kind() const { return data_->kind; }

  /// Index of the piece containing x; x == x_max maps to the last piece.
  std::size_t locate(double x) const;

  cplx operator()(double x) const { return eval_in(locate(x), x); }
  /// Evaluate using piece i regardless of where x falls (one-sided limits at
  /// breakpoints).
  cplx eval_in(std::size_t i, double x) const;

  cplx integrate(double a, double b, const QuadratureConfig& cfg = {}) const;
  /// Integral of |f|^q over [a, b]; exact for q = 2 on polynomial pieces and for
  /// q = 1 on real polynomial pieces of degree <= 2.
  double abs_power_integral(double a, double b, double q, const QuadratureConfig& cfg = {}) const;

  double phase_rate(std::size_t i) const;
  /// Bound on sup |f| over piece i (exact for constants, a coefficient bound for
  /// polynomials, a sampled estimate for smooth pieces).
  double sup_abs(std::size_t i) const;
  bool piecewise_polynomial() const;
  bool piece_is_constant(std::size_t i) const;

 private:
  struct Data {
    std::vector<double> breakpoints;
    std::vector<Piece> pieces;
    ValueKind kind = ValueKind::real;
  };
  std::shared_ptr<const Data> data_;
};

/// Evaluate a detached piece whose local origin is `left`.
cplx eval_piece(const Piece& p, double left, double x);
/// Integral of a detached piece over [a, b] within its support.
cplx integrate_piece(const Piece& p, double left, double a, double b, const QuadratureConfig& cfg);

/// Re-expand p(t) as a polynomial in s = t - shift.
std::vector<cplx> shift_polynomial(std::span<const cplx> coeffs, double shift);

IntervalFunction operator+(const IntervalFunction& f, const IntervalFunction& g);
IntervalFunction operator-(const IntervalFunction& f, const IntervalFunction& g);
IntervalFunction operator*(const IntervalFunction& f, const IntervalFunction& g);
IntervalFunction operator*(cplx c, const IntervalFunction& f);
IntervalFunction conj(const IntervalFunction& f);
IntervalFunction abs(const IntervalFunction& f);
/// Pointwise product with a smooth real weight w(x) (e.g. (1+x)^gamma).
IntervalFunction weighted(const IntervalFunction& f, std::function<double(double)> w);
/// Generic pointwise combination; always yields Smooth pieces.
IntervalFunction combine(const IntervalFunction& f, const IntervalFunction& g,
                         std::function<cplx(cplx, cplx)> op, ValueKind kind, double extra_rate = 0.0);
/// Same function with additional breakpoints inserted.
IntervalFunction refined(const IntervalFunction& f, std::span<const double> extra);
/// Union of two breakpoint sets restricted to the common domain.
std::vector<double> merge_breakpoints(std::span<const double> a, std::span<const double> b);

}  // namespace mjost
