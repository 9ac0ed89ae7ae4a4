#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rankdeg/matrix_core.hpp"
#include "rankdeg/problem.hpp"

namespace rankdeg {

/// Returns a semi-inverse of a (any X with a X a = a). Defaults to the pseudoinverse.
using SemiInverseFn = std::function<Mat(const Mat& a, double tol)>;

struct ChainOptions {
  double tol = kDefaultRankTol;
  double fd_step = 0.0;  // 0 selects default_fd_step(t)
  int nu_max = 4;
  SemiInverseFn semi_inverse;  // empty selects the pseudoinverse
};

inline constexpr int kDefaultGridPoints = 33;

/// A time-dependent leading matrix together with its kernel k(t, s).
struct LinearPair {
  MatrixFunction A;
  KernelFn k;
};

struct ChainStep {
  LinearPair next;                       // (A_{i+1}, k_{i+1})
  std::function<Mat(double)> projector;  // V_i = E - A_i A_i^-
};

/// One reduction step
///   A_{i+1}(t)   = A_i(t) + V_i(t) k_i(t, t)
///   k_{i+1}(t,s) = d/dt [V_i(t) k_i(t, s)] + k_i(t, s)   (s held fixed)
/// Evaluation is lazy and memoized per level. When expected_rank is set, any evaluation
/// of V_i at a point where A_i has a different numerical rank throws ChainError.
ChainStep chain_step(const LinearPair& level, const ChainOptions& opt = {},
                     std::optional<int> expected_rank = std::nullopt, int level_index = 0);

struct ChainLevel {
  int level = 0;
  LinearPair pair;
  std::function<Mat(double)> projector;
  int rank = 0;
  std::vector<std::pair<double, double>> det_sample;  // (t, det A_i(t))
};

enum class ChainStatus { ok, non_constant_rank, exceeded_max_level };

std::string to_string(ChainStatus s);

struct IndexReport {
  std::optional<int> nu;
  std::vector<ChainLevel> levels;
  std::vector<double> grid;
  ChainStatus status = ChainStatus::ok;
  int failed_level = -1;
  double failed_at = std::numeric_limits<double>::quiet_NaN();
  double tol = kDefaultRankTol;
  std::string diagnosis;
};

/// Rank-degree index of (A, k) on a grid: the first level whose leading matrix is
/// nonsingular at every grid point, all earlier levels being rank deficient with constant
/// rank. A determinant sign change between neighbouring grid points of an otherwise
/// nonsingular level counts as a rank change (the determinant must vanish in between).
IndexReport rank_degree_index(const MatrixFunction& A, const KernelFn& k, const std::vector<double>& grid,
                              const ChainOptions& opt = {});

IndexReport rank_degree_index(const LinearIAE& p, const std::vector<double>& grid, const ChainOptions& opt = {});

/// F_0 = f, F_{i+1} = d/dt (V_i F_i) + F_i for i < nu.
std::vector<VectorFn> rhs_chain(const VectorFn& f, const IndexReport& report, const ChainOptions& opt = {});

struct ConsistencyCondition {
  int level = 0;
  double residual = 0.0;
  bool passed = false;
};

struct ConsistencyReport {
  std::vector<ConsistencyCondition> conditions;
  bool passed = false;
  double t0 = 0.0;
  double condition_number = 0.0;  // of A_nu(t0)
  bool ill_conditioned = false;   // condition_number above 1e8
};

/// Checks A_i(t0) A_nu(t0)^{-1} F_nu(t0) = F_i(t0) for i < nu. t0 defaults to the lower
/// end of the chain's domain. Throws InvalidInput unless the report is ok with nu >= 1 and
/// Error when A_nu(t0) is numerically singular.
ConsistencyReport consistency_check(const IndexReport& report, const std::vector<VectorFn>& F, double tol,
                                    std::optional<double> t0 = std::nullopt);

/// Integrated form of a linear DAE: A x + int (B(s) - A'(s)) x ds = int q + A(t0) y0.
LinearIAE dae_to_iae(const LinearDAE& p, double quad_tol = 1e-12);

struct HessenbergCheck {
  bool confirmed = false;
  int nu = 0;
  std::optional<double> violated_at;
  double worst_condition = 0.0;
};

/// Invertibility of the product of the nu corner Jacobian blocks at every grid point
/// (condition number below 1 / tol).
HessenbergCheck hessenberg_index(int nu, const std::vector<std::function<Mat(double)>>& diag_jacobians,
                                 const std::vector<double>& grid, double tol = kDefaultRankTol);

}  // namespace rankdeg
