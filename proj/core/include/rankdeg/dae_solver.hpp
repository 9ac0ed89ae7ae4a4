#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rankdeg/problem.hpp"

namespace rankdeg {

struct DaeSolveConfig {
  double h = 1e-3;
  int order = 1;  // 1 or 2; BDF2 starts with one BDF1 step
  double newton_tol = 1e-10;
  int newton_max_iter = 25;
  std::vector<CriticalCondition> monitor;
  double warn_threshold = 1e-2;
  int max_halvings = 3;
  double consistency_tol = 1e-8;
};

struct MonitorWarning {
  double t = 0.0;
  std::string condition_id;
  double value = 0.0;
  bool sign_change = false;
};

struct DaeStep {
  double t = 0.0;  // time reached
  double h = 0.0;
  int newton_iterations = 0;
  double residual_norm = 0.0;
  int halvings = 0;
};

struct DaeFailure {
  double t = 0.0;  // last accepted time
  std::string reason;
  int attempts = 0;
};

struct DaeSolveResult {
  std::vector<double> times;
  std::vector<Vec> values;
  std::vector<DaeStep> steps;
  std::vector<MonitorWarning> warnings;
  std::optional<DaeFailure> failure;

  bool completed() const { return !failure.has_value(); }
  /// Local cubic Lagrange interpolant through the four nearest accepted points.
  Vec operator()(double t) const;
  Vec derivative(double t) const;
};

/// Fixed-step BDF1/BDF2 with a full Newton iteration per step:
///   A(t_{n+1}) (alpha_0 y_{n+1} + ...) / h + F(t_{n+1}, y_{n+1}) = f(t_{n+1}).
/// A failed Newton iteration retries the step as 2, 4, 8 substeps before the solve stops
/// with a failure record. The start value is the exact solution at interval.lo when
/// known, else y0 (which must then start at t_start and be consistent).
DaeSolveResult solve_dae(const SemiNonlinearDAE& p, const DaeSolveConfig& cfg, Interval interval);

/// |A u' + F(t, u) - f|_inf at probe points, u' from the local interpolant.
std::vector<double> dae_residual(const SemiNonlinearDAE& p, const DaeSolveResult& sol,
                                 const std::vector<double>& probe);

/// Wraps sampled values (e.g. an exact solution on a mesh) as a solve result.
DaeSolveResult sampled_solution(const VectorFn& fn, Interval interval, double h);

}  // namespace rankdeg
