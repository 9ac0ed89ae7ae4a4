#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rankdeg/problem.hpp"

namespace rankdeg {

/// Newton start on a new interval: the previous end value at every node, or the
/// previous interval's polynomial extrapolated.
enum class Predictor { previous_value, extrapolate };

struct CollocationConfig {
  std::vector<double> c{0.0, 0.7, 0.9};
  double h = 0.025;
  int quad_order = 8;
  double newton_tol = 1e-12;
  int newton_max_iter = 25;
  Predictor predictor = Predictor::previous_value;
};

void validate(const CollocationConfig& cfg);

/// Piecewise polynomial of degree m - 1 on the uniform mesh t_n = t0 + n h, stored as its
/// values at the m nodes t_n + c_i h of every interval.
class PiecewiseSolution {
 public:
  PiecewiseSolution() = default;
  PiecewiseSolution(double t0, double h, std::vector<double> c, int r);

  /// Lagrange interpolant of the interval containing t. Intervals are left-closed; the
  /// right end of the last interval belongs to it.
  Vec operator()(double t) const;
  /// Interpolant of interval n at local coordinate tau (extrapolates outside [0, 1]).
  Vec local(int n, double tau) const;

  void push_back(Mat nodal);  // r x m

  int intervals() const { return static_cast<int>(nodal_.size()); }
  double start() const { return t0_; }
  double end() const { return t0_ + h_ * intervals(); }
  double step() const { return h_; }
  int dimension() const { return r_; }
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  const std::vector<double>& c() const { return c_; }
  const Mat& nodal(int n) const { return nodal_.at(static_cast<size_t>(n)); }
  double mesh(int n) const { return t0_ + h_ * n; }

  /// Lagrange basis values L_j(tau) for the nodes c.
  Vec basis(double tau) const;

 private:
  double t0_ = 0.0;
  double h_ = 0.0;
  std::vector<double> c_;
  int r_ = 0;
  std::vector<Mat> nodal_;
};

struct CollocationStep {
  int n = 0;
  double t = 0.0;
  int newton_iterations = 0;
  double residual_norm = 0.0;
  double condition_number = 0.0;
};

struct CollocationFailure {
  int step = 0;
  double t = 0.0;
  std::string reason;
};

struct IaeSolveResult {
  PiecewiseSolution solution;
  std::vector<CollocationStep> steps;
  std::optional<CollocationFailure> failure;
  /// True when c_1 = 0: the node at each mesh point carries the previous interval's end
  /// value (continuous piecewise polynomials) and the equation is collocated at the other nodes.
  bool continuous = false;
  /// "exact" when the integral over [t_start, a) was taken from the exact solution.
  std::string history_source = "none";
  /// Collocation times actually enforced, with their equation residuals.
  std::vector<double> collocation_times;
  std::vector<double> collocation_residuals;
};

IaeSolveResult solve_iae(const SemiNonlinearIAE& p, const CollocationConfig& cfg, Interval interval);
IaeSolveResult solve_iae(const LinearIAE& p, const CollocationConfig& cfg, Interval interval);

/// |A(t) u(t) + int_{t_start}^t kappa(t, s, u(s)) ds - f(t)|_inf at probe points, using the
/// same quadrature as the solver (and the exact solution on [t_start, sol.start()) if needed).
std::vector<double> residual(const SemiNonlinearIAE& p, const PiecewiseSolution& sol,
                             const std::vector<double>& probe, int quad_order = 8);
std::vector<double> residual(const LinearIAE& p, const PiecewiseSolution& sol, const std::vector<double>& probe,
                             int quad_order = 8);

/// Nodal interpolant of a known function on the mesh of a given configuration.
PiecewiseSolution interpolate(const VectorFn& fn, const CollocationConfig& cfg, Interval interval, int r);

}  // namespace rankdeg
