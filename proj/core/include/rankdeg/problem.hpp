#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rankdeg/matrix_core.hpp"
#include "rankdeg/types.hpp"

namespace rankdeg {

/// A(t) y(t) + int_{t_start}^t k(t,s) y(s) ds = f(t)
struct LinearIAE {
  MatrixFunction A;
  KernelFn k;
  VectorFn f;
  int r = 0;
  double t_start = 0.0;
  double T = 1.0;
  std::optional<VectorFn> exact;

  Interval domain() const { return {t_start, T}; }
};

/// A(t) y'(t) + B(t) y(t) = f(t), y(t_start) = y0
struct LinearDAE {
  MatrixFunction A;
  MatrixFunction B;
  VectorFn f;
  Vec y0;
  int r = 0;
  double t_start = 0.0;
  double T = 1.0;
  std::optional<VectorFn> exact;

  Interval domain() const { return {t_start, T}; }
};

/// A(t) y(t) + int_{t_start}^t kappa(t, s, y(s)) ds = f(t)
struct SemiNonlinearIAE {
  MatrixFunction A;
  KappaFn kappa;
  std::optional<KappaJacobianFn> kappa_y;
  VectorFn f;
  std::optional<VectorFn> exact;
  std::vector<CriticalCondition> critical_conditions;
  int r = 0;
  double t_start = 0.0;
  double T = 1.0;

  Interval domain() const { return {t_start, T}; }
};

/// A(t) y'(t) + F(t, y(t)) = f(t), y(t_start) = y0
struct SemiNonlinearDAE {
  MatrixFunction A;
  StateFn F;
  std::optional<StateJacobianFn> F_y;
  VectorFn f;
  Vec y0;
  std::optional<VectorFn> exact;
  std::vector<CriticalCondition> critical_conditions;
  int r = 0;
  double t_start = 0.0;
  double T = 1.0;

  Interval domain() const { return {t_start, T}; }
};

using Problem = std::variant<LinearIAE, LinearDAE, SemiNonlinearIAE, SemiNonlinearDAE>;

/// Dense time/state samples of a trajectory, linearly interpolated in between.
class TrajectorySample {
 public:
  TrajectorySample() = default;
  TrajectorySample(std::vector<double> times, std::vector<Vec> values);

  /// Samples fn at n uniform points of span (n >= 2).
  static TrajectorySample from_function(const VectorFn& fn, Interval span, int n);
  /// A trajectory frozen at one state over span.
  static TrajectorySample constant(const Vec& state, Interval span);

  /// Linear interpolation; DomainError outside [times.front(), times.back()].
  Vec operator()(double t) const;

  const std::vector<double>& times() const { return times_; }
  const std::vector<Vec>& values() const { return values_; }
  Interval span() const { return {times_.front(), times_.back()}; }
  int dimension() const { return static_cast<int>(values_.front().size()); }

 private:
  std::vector<double> times_;
  std::vector<Vec> values_;
};

/// Central-difference Jacobian; column j perturbs y_j by +-step * max(1, |y_j|).
Mat fd_jacobian(const StateFn& g, double t, const Vec& y, double step = 1e-6);

/// Jacobians with finite-difference fallback.
Mat state_jacobian(const SemiNonlinearDAE& p, double t, const Vec& y);
Mat kappa_jacobian(const SemiNonlinearIAE& p, double t, double s, const Vec& y);

/// The algebraic defect |V(t0) (F(t0, y0) - f(t0))| of an initial value.
double initial_defect(const SemiNonlinearDAE& p, double t0, const Vec& y0);

struct ExactCheck {
  double max_residual = 0.0;
  double worst_time = 0.0;
  bool passed = false;
};

/// Substitutes the registered exact solution into the defining equation on grid.
/// NotFound (as InvalidInput) when the problem carries no exact solution.
ExactCheck verify_exact(const Problem& p, const std::vector<double>& grid, double tol);

/// Max abs deviation between an analytic Jacobian and fd_jacobian over random samples.
double jacobian_mismatch(const SemiNonlinearDAE& p, int samples, unsigned seed, double radius = 2.0);
double jacobian_mismatch(const SemiNonlinearIAE& p, int samples, unsigned seed, double radius = 2.0);

std::vector<double> uniform_grid(Interval span, int n);

}  // namespace rankdeg
