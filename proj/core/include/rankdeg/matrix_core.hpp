#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <type_traits>

#include "rankdeg/types.hpp"

namespace rankdeg {

/// Singular values below tol * sigma_max are treated as zero.
inline constexpr double kDefaultRankTol = 1e-10;

bool all_finite(const Mat& m);

/// Number of singular values strictly above tol * sigma_max (0 for the zero matrix).
int numerical_rank(const Mat& m, double tol = kDefaultRankTol);

/// 2-norm condition number; +inf when the matrix is singular to working precision.
double condition_number(const Mat& m);

struct SemiInverseResult {
  Mat a_minus;    // Moore-Penrose pseudoinverse, a semi-inverse: A A^- A = A
  int rank = 0;
  Mat projector;  // V = E - A A^-
  double tol_used = kDefaultRankTol;
};

SemiInverseResult semi_inverse(const Mat& m, double tol = kDefaultRankTol);

/// Time-dependent square matrix on a closed domain, optionally with an analytic d/dt.
class MatrixFunction {
 public:
  using Eval = std::function<Mat(double)>;

  MatrixFunction() = default;
  MatrixFunction(Eval eval, Interval domain, Eval derivative = nullptr, int smoothness = 1);

  static MatrixFunction constant(const Mat& m, Interval domain);

  /// Throws DomainError outside the domain and EvaluationError on non-finite output.
  Mat operator()(double t) const;

  bool has_derivative() const { return static_cast<bool>(derivative_); }
  Mat analytic_derivative(double t) const;
  const Interval& domain() const { return domain_; }
  int smoothness() const { return smoothness_; }
  bool valid() const { return static_cast<bool>(eval_); }

 private:
  Eval eval_;
  Eval derivative_;
  Interval domain_;
  int smoothness_ = 1;
};

inline double default_fd_step(double t) { return 1e-4 * std::max(1.0, std::abs(t)); }

/// Fourth-order finite difference of f at t. Central when the five-point stencil fits in
/// the domain, otherwise the one-sided fourth-order stencil facing into the domain.
template <class Fn>
auto fd_derivative(const Fn& f, double t, double step, const Interval& domain) {
  using R = std::decay_t<decltype(f(t))>;
  if (!(step > 0.0)) throw InvalidInput("fd_derivative: step must be positive");
  if (!domain.contains(t, domain_slack(t))) throw DomainError("fd_derivative: t outside domain");
  const double len = domain.length();
  if (len > 0.0) step = std::min(step, len / 4.0);
  if (len <= 0.0) {
    // Degenerate domain: the value is constant as far as the domain is concerned.
    R zero = f(t);
    zero *= 0.0;
    return zero;
  }
  const double h = step;
  if (t - 2 * h >= domain.lo && t + 2 * h <= domain.hi) {
    R d = f(t - 2 * h);
    d -= 8.0 * f(t - h);
    d += 8.0 * f(t + h);
    d -= f(t + 2 * h);
    d /= 12.0 * h;
    return d;
  }
  const double sgn = (t - 2 * h < domain.lo) ? 1.0 : -1.0;
  const double hs = sgn * h;
  R d = -25.0 * f(t);
  d += 48.0 * f(t + hs);
  d -= 36.0 * f(t + 2 * hs);
  d += 16.0 * f(t + 3 * hs);
  d -= 3.0 * f(t + 4 * hs);
  d /= 12.0 * hs;
  return d;
}

/// d/dt of a matrix function: analytic when available, else fd_derivative.
Mat matfn_derivative(const MatrixFunction& f, double t, std::optional<double> step = std::nullopt);

}  // namespace rankdeg
