#include "rankdeg/linearization.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace rankdeg {

namespace {

Interval intersect(Interval a, Interval b) {
  Interval out{std::max(a.lo, b.lo), std::min(a.hi, b.hi)};
  if (out.hi < out.lo) throw DomainError("linearization: trajectory does not overlap the problem domain");
  return out;
}

MatrixFunction restrict_to(const MatrixFunction& a, Interval span) {
  MatrixFunction::Eval deriv;
  if (a.has_derivative()) deriv = [a](double t) { return a.analytic_derivative(t); };
  return MatrixFunction([a](double t) { return a(t); }, span, deriv, a.smoothness());
}

Interval problem_domain(const NonlinearProblem& p) {
  return std::visit([](const auto& q) { return q.domain(); }, p);
}

const std::vector<CriticalCondition>& conditions_of(const NonlinearProblem& p) {
  return std::visit([](const auto& q) -> const std::vector<CriticalCondition>& { return q.critical_conditions; }, p);
}

int dimension_of(const NonlinearProblem& p) {
  return std::visit([](const auto& q) { return q.r; }, p);
}

std::vector<double> window_grid(double t, Interval span, int n) {
  std::vector<double> g = uniform_grid(span, std::max(1, n));
  if (std::find(g.begin(), g.end(), t) == g.end()) {
    g.insert(std::upper_bound(g.begin(), g.end(), t), t);
  }
  return g;
}

PointwiseIndex from_report(const IndexReport& rep) {
  PointwiseIndex out;
  out.nu = rep.nu;
  out.status = rep.status;
  out.diagnosis = rep.diagnosis;
  return out;
}

// Newton projection of eta onto {c(t, .) = 0} along the gradient direction.
std::optional<Vec> project_onto(const CriticalCondition& c, double t, Vec eta) {
  for (int it = 0; it < 50; ++it) {
    const double value = c.fn(t, eta);
    if (!std::isfinite(value)) return std::nullopt;
    if (std::abs(value) <= 1e-12) return eta;
    Vec grad(eta.size());
    for (Eigen::Index j = 0; j < eta.size(); ++j) {
      const double h = 1e-7 * std::max(1.0, std::abs(eta(j)));
      Vec plus = eta;
      Vec minus = eta;
      plus(j) += h;
      minus(j) -= h;
      grad(j) = (c.fn(t, plus) - c.fn(t, minus)) / (2 * h);
    }
    const double g2 = grad.squaredNorm();
    if (!(g2 > 0.0)) return std::nullopt;
    eta -= (value / g2) * grad;
  }
  return std::nullopt;
}

Vec random_in_ball(std::mt19937_64& rng, int r, double radius) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Vec dir(r);
  do {
    for (int j = 0; j < r; ++j) dir(j) = normal(rng);
  } while (dir.norm() == 0.0);
  dir.normalize();
  return radius * std::pow(unit(rng), 1.0 / r) * dir;
}

}  // namespace

LinearizedDae linearize_dae(const SemiNonlinearDAE& p, const TrajectorySample& traj) {
  const Interval span = intersect(traj.span(), p.domain());
  LinearizedDae out;
  out.A = restrict_to(p.A, span);
  out.B = MatrixFunction([p, traj](double t) { return state_jacobian(p, t, traj(t)); }, span);
  return out;
}

LinearIAE linearize_iae(const SemiNonlinearIAE& p, const TrajectorySample& traj) {
  const Interval span = intersect(traj.span(), p.domain());
  LinearIAE out;
  out.r = p.r;
  out.t_start = span.lo;
  out.T = span.hi;
  out.A = restrict_to(p.A, span);
  out.k = [p, traj](double t, double s) { return kappa_jacobian(p, t, s, traj(s)); };
  const int r = p.r;
  out.f = [r](double) { return Vec(Vec::Zero(r)); };
  return out;
}

LinearPair linearized_pair(const NonlinearProblem& p, const TrajectorySample& traj) {
  if (const auto* dae = std::get_if<SemiNonlinearDAE>(&p)) {
    const LinearizedDae lin = linearize_dae(*dae, traj);
    LinearDAE ldae;
    ldae.A = lin.A;
    ldae.B = lin.B;
    ldae.r = dae->r;
    ldae.t_start = lin.A.domain().lo;
    ldae.T = lin.A.domain().hi;
    const int r = dae->r;
    ldae.f = [r](double) { return Vec(Vec::Zero(r)); };
    const LinearIAE iae = dae_to_iae(ldae);
    return {iae.A, iae.k};
  }
  const LinearIAE iae = linearize_iae(std::get<SemiNonlinearIAE>(p), traj);
  return {iae.A, iae.k};
}

PointwiseIndex index_at_state(const NonlinearProblem& p, double t, const Vec& eta, const PointwiseOptions& opt) {
  const Interval dom = problem_domain(p);
  if (!dom.contains(t, domain_slack(t))) throw DomainError("pointwise_index: t outside the problem domain");
  const Interval span{std::max(dom.lo, t - opt.window), std::min(dom.hi, t + opt.window)};
  const TrajectorySample frozen = TrajectorySample::constant(eta, span);
  const LinearPair pair = linearized_pair(p, frozen);
  try {
    return from_report(rank_degree_index(pair.A, pair.k, window_grid(t, span, opt.window_points), opt.chain));
  } catch (const EvaluationError& e) {
    PointwiseIndex out;
    out.status = ChainStatus::non_constant_rank;
    out.diagnosis = e.what();
    return out;
  }
}

PointwiseIndex pointwise_index(const NonlinearProblem& p, const TrajectorySample& traj, double t,
                               const PointwiseOptions& opt) {
  return index_at_state(p, t, traj(t), opt);
}

IndexReport interval_index(const NonlinearProblem& p, const TrajectorySample& traj, Interval span, int grid_points,
                           const ChainOptions& opt) {
  const LinearPair pair = linearized_pair(p, traj);
  return rank_degree_index(pair.A, pair.k, uniform_grid(span, grid_points), opt);
}

std::string to_string(Structure s) {
  switch (s) {
    case Structure::well:
      return "well-structure";
    case Structure::free_independent:
      return "free-structure-independent";
    case Structure::free_dependent:
      return "free-structure-dependent";
  }
  return "unknown";
}

IndexProfile classify(const NonlinearProblem& p, const TrajectorySample& traj, Interval span,
                      const ClassifyOptions& opt) {
  if (!(opt.eps > 0.0)) throw InvalidInput("classify: eps must be positive");
  if (opt.n_perturb < 0) throw InvalidInput("classify: n_perturb must be >= 0");
  if (!(span.hi > span.lo)) throw InvalidInput("classify: empty interval");
  if (!traj.span().contains(span.lo, domain_slack(span.lo)) || !traj.span().contains(span.hi, domain_slack(span.hi))) {
    throw DomainError("classify: trajectory does not cover the interval");
  }
  const int r = dimension_of(p);

  IndexProfile prof;
  prof.times = uniform_grid(span, opt.grid_points);
  prof.neighborhood_eps = opt.eps;
  prof.samples_per_point = opt.n_perturb;
  prof.seed = opt.seed;

  for (double t : prof.times) {
    const PointwiseIndex pi = pointwise_index(p, traj, t, opt.pointwise);
    prof.nu_at.push_back(pi.nu);
    ++prof.total_samples;
    if (!pi.nu) ++prof.undefined_samples;
  }

  // Structure: does the index depend on the state?
  for (size_t j = 0; j < prof.times.size(); ++j) {
    const double t = prof.times[j];
    const Vec center = traj(t);
    std::seed_seq seq{static_cast<std::uint32_t>(opt.seed & 0xffffffffu), static_cast<std::uint32_t>(opt.seed >> 32),
                      static_cast<std::uint32_t>(j)};
    std::mt19937_64 rng(seq);
    for (int k = 0; k < opt.n_perturb; ++k) {
      const Vec eta = center + random_in_ball(rng, r, opt.eps);
      const PointwiseIndex pi = index_at_state(p, t, eta, opt.pointwise);
      ++prof.total_samples;
      if (!pi.nu) ++prof.undefined_samples;
      if (pi.nu != prof.nu_at[j]) prof.structure_evidence.push_back({t, eta, pi.nu, "perturbation"});
    }
    for (const CriticalCondition& c : conditions_of(p)) {
      const std::optional<Vec> eta = project_onto(c, t, center);
      if (!eta) continue;
      const PointwiseIndex pi = index_at_state(p, t, *eta, opt.pointwise);
      if (pi.nu != prof.nu_at[j]) prof.structure_evidence.push_back({t, *eta, pi.nu, c.id});
    }
  }
  if (prof.undefined_samples * 5 > prof.total_samples) {
    throw ClassificationError("classify: pointwise index undefined at " + std::to_string(prof.undefined_samples) +
                              " of " + std::to_string(prof.total_samples) + " samples");
  }

  const bool nominal_constant =
      prof.nu_at.front().has_value() &&
      std::all_of(prof.nu_at.begin(), prof.nu_at.end(), [&](const auto& v) { return v == prof.nu_at.front(); });
  if (nominal_constant) prof.index = prof.nu_at.front();

  if (prof.structure_evidence.empty()) {
    prof.classification = Structure::well;
    return prof;
  }

  // Form: is the index constant along the trajectory on the whole interval?
  const auto along = [&](double a, double b) -> std::optional<int> {
    const int n = b > a ? opt.grid_points : 1;
    const IndexReport rep = interval_index(p, traj, {a, b}, n, opt.pointwise.chain);
    return rep.nu;
  };
  const auto holds = [&](double a, double b, std::optional<int> base) {
    const std::optional<int> nu = along(a, b);
    return nu.has_value() && nu == base;
  };

  double start = span.lo;
  while (start < span.hi && prof.critical_points.size() < 100) {
    const std::optional<int> base = along(start, start);
    if (!base) {
      prof.critical_points.push_back(start);
      start += opt.resolution;
      continue;
    }
    if (holds(start, span.hi, base)) break;
    double lo = start;
    double hi = span.hi;
    while (hi - lo > opt.resolution) {
      const double mid = 0.5 * (lo + hi);
      if (holds(start, mid, base)) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    prof.critical_points.push_back(0.5 * (lo + hi));
    start = hi + opt.resolution;
  }
  prof.classification =
      (prof.critical_points.empty() && nominal_constant) ? Structure::free_independent : Structure::free_dependent;
  if (prof.classification == Structure::free_dependent) prof.index.reset();
  return prof;
}

std::vector<CriticalCrossing> detect_critical_points(const TrajectorySample& traj,
                                                     const std::vector<CriticalCondition>& conditions, bool refine) {
  if (conditions.empty()) throw InvalidInput("detect_critical_points: no conditions");
  constexpr double kNearZero = 1e-8;
  std::vector<CriticalCrossing> out;
  const auto& ts = traj.times();
  const auto& ys = traj.values();
  for (const CriticalCondition& c : conditions) {
    const auto along = [&](double t) { return c.fn(t, traj(t)); };
    double prev = c.fn(ts[0], ys[0]);
    bool prev_near = std::abs(prev) < kNearZero;
    if (prev_near) out.push_back({ts[0], c.id, prev});
    for (size_t j = 1; j < ts.size(); ++j) {
      const double cur = c.fn(ts[j], ys[j]);
      const bool near = std::abs(cur) < kNearZero;
      if (near) {
        if (!prev_near) out.push_back({ts[j], c.id, cur});
      } else if (!prev_near && ((prev < 0) != (cur < 0))) {
        double lo = ts[j - 1];
        double hi = ts[j];
        double t_cross = hi;
        if (refine) {
          double flo = prev;
          while (hi - lo > 1e-6) {
            const double mid = 0.5 * (lo + hi);
            const double fm = along(mid);
            if ((fm < 0) == (flo < 0)) {
              lo = mid;
              flo = fm;
            } else {
              hi = mid;
            }
          }
          t_cross = 0.5 * (lo + hi);
        }
        out.push_back({t_cross, c.id, along(t_cross)});
      }
      prev = cur;
      prev_near = near;
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.t < b.t; });
  return out;
}

}  // namespace rankdeg
