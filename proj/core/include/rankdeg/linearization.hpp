#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rankdeg/index_chain.hpp"
#include "rankdeg/problem.hpp"

namespace rankdeg {

using NonlinearProblem = std::variant<SemiNonlinearDAE, SemiNonlinearIAE>;

/// A(t) and B(t) = F_y(t, eta(t)) of the residual equation R1 = A e' + F_y e.
struct LinearizedDae {
  MatrixFunction A;
  MatrixFunction B;
};

/// eta(t) is the trajectory, linearly interpolated; the pair lives on the trajectory span
/// intersected with the problem domain.
LinearizedDae linearize_dae(const SemiNonlinearDAE& p, const TrajectorySample& traj);

/// Kernel (t, s) -> kappa_y(t, s, eta(s)); f is zero (the homogeneous residual equation).
LinearIAE linearize_iae(const SemiNonlinearIAE& p, const TrajectorySample& traj);

/// The IAE-form linear pair whose rank-degree index is the index of the linearization
/// (DAEs pass through dae_to_iae).
LinearPair linearized_pair(const NonlinearProblem& p, const TrajectorySample& traj);

struct PointwiseOptions {
  double window = 0.05;
  int window_points = 11;
  ChainOptions chain;
};

struct PointwiseIndex {
  std::optional<int> nu;
  ChainStatus status = ChainStatus::ok;
  std::string diagnosis;
};

/// Index of the linearization with the state frozen at eta, explicit time dependence
/// retained over the window [t - window, t + window] clipped to the domain.
PointwiseIndex index_at_state(const NonlinearProblem& p, double t, const Vec& eta, const PointwiseOptions& opt = {});

/// index_at_state at eta = traj(t).
PointwiseIndex pointwise_index(const NonlinearProblem& p, const TrajectorySample& traj, double t,
                               const PointwiseOptions& opt = {});

/// Index of the linearization along the trajectory itself over a whole interval.
IndexReport interval_index(const NonlinearProblem& p, const TrajectorySample& traj, Interval span,
                           int grid_points = kDefaultGridPoints, const ChainOptions& opt = {});

enum class Structure { well, free_independent, free_dependent };

std::string to_string(Structure s);

/// A state at which the index differs from the one along the trajectory.
struct StructureEvidence {
  double t = 0.0;
  Vec eta;
  std::optional<int> nu;
  std::string source;  // "perturbation" or the id of a critical condition
};

struct IndexProfile {
  std::vector<double> times;
  std::vector<std::optional<int>> nu_at;  // pointwise index along the trajectory
  Structure classification = Structure::well;
  std::optional<int> index;  // the common index when it is constant along the trajectory
  std::vector<double> critical_points;
  double neighborhood_eps = 0.0;
  int samples_per_point = 0;
  std::uint64_t seed = 0;
  std::vector<StructureEvidence> structure_evidence;
  int undefined_samples = 0;
  int total_samples = 0;
};

struct ClassifyOptions {
  double eps = 0.1;
  int n_perturb = 8;
  int grid_points = kDefaultGridPoints;
  double resolution = 1e-3;
  std::uint64_t seed = 0;
  PointwiseOptions pointwise;
};

/// Structure: random states in the eps-ball around each grid point of the trajectory, plus
/// the projection of the trajectory onto each registered critical condition's zero set.
/// Any index different from the nominal one means free structure. Form: a free-structure
/// problem is dependent when the index along the trajectory changes on the interval; the
/// change points are bisected to opt.resolution. Throws ClassificationError when more than
/// 20% of the sampled pointwise indices are undefined.
IndexProfile classify(const NonlinearProblem& p, const TrajectorySample& traj, Interval span,
                      const ClassifyOptions& opt = {});

struct CriticalCrossing {
  double t = 0.0;
  std::string condition_id;
  double value = 0.0;
};

/// Sign changes or near-zeros (|c| < 1e-8) of each condition along the trajectory samples;
/// refine bisects on the interpolant to 1e-6 in time.
std::vector<CriticalCrossing> detect_critical_points(const TrajectorySample& traj,
                                                     const std::vector<CriticalCondition>& conditions,
                                                     bool refine = true);

}  // namespace rankdeg
