#include "rankdeg/problem.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "rankdeg/quadrature.hpp"

namespace rankdeg {

TrajectorySample::TrajectorySample(std::vector<double> times, std::vector<Vec> values)
    : times_(std::move(times)), values_(std::move(values)) {
  if (times_.empty() || times_.size() != values_.size()) throw InvalidInput("TrajectorySample: size mismatch");
  for (size_t i = 1; i < times_.size(); ++i) {
    if (!(times_[i] > times_[i - 1])) throw InvalidInput("TrajectorySample: times must be strictly increasing");
  }
  for (const Vec& v : values_) {
    if (v.size() != values_.front().size()) throw InvalidInput("TrajectorySample: ragged values");
    if (!v.allFinite()) throw InvalidInput("TrajectorySample: non-finite value");
  }
}

TrajectorySample TrajectorySample::from_function(const VectorFn& fn, Interval span, int n) {
  if (n < 2) throw InvalidInput("TrajectorySample::from_function: need at least two samples");
  std::vector<double> ts = uniform_grid(span, n);
  std::vector<Vec> vs;
  vs.reserve(ts.size());
  for (double t : ts) vs.push_back(fn(t));
  return TrajectorySample(std::move(ts), std::move(vs));
}

TrajectorySample TrajectorySample::constant(const Vec& state, Interval span) {
  if (span.hi > span.lo) return TrajectorySample({span.lo, span.hi}, {state, state});
  return TrajectorySample({span.lo}, {state});
}

Vec TrajectorySample::operator()(double t) const {
  const double lo = times_.front();
  const double hi = times_.back();
  if (!Interval{lo, hi}.contains(t, domain_slack(t))) {
    throw DomainError("TrajectorySample: t = " + std::to_string(t) + " outside sampled span");
  }
  if (times_.size() == 1 || t <= lo) return values_.front();
  if (t >= hi) return values_.back();
  const auto it = std::upper_bound(times_.begin(), times_.end(), t);
  const size_t j = static_cast<size_t>(it - times_.begin());
  const double t0 = times_[j - 1];
  const double t1 = times_[j];
  const double w = (t - t0) / (t1 - t0);
  return (1.0 - w) * values_[j - 1] + w * values_[j];
}

Mat fd_jacobian(const StateFn& g, double t, const Vec& y, double step) {
  if (!(step > 0.0)) throw InvalidInput("fd_jacobian: step must be positive");
  const Vec g0 = g(t, y);
  if (!g0.allFinite()) throw EvaluationError("fd_jacobian: non-finite evaluation");
  Mat jac(g0.size(), y.size());
  Vec yp = y;
  for (Eigen::Index j = 0; j < y.size(); ++j) {
    const double dj = step * std::max(1.0, std::abs(y(j)));
    yp(j) = y(j) + dj;
    const Vec gp = g(t, yp);
    yp(j) = y(j) - dj;
    const Vec gm = g(t, yp);
    yp(j) = y(j);
    if (!gp.allFinite() || !gm.allFinite()) throw EvaluationError("fd_jacobian: non-finite evaluation");
    jac.col(j) = (gp - gm) / (2.0 * dj);
  }
  return jac;
}

Mat state_jacobian(const SemiNonlinearDAE& p, double t, const Vec& y) {
  if (p.F_y) return (*p.F_y)(t, y);
  return fd_jacobian(p.F, t, y);
}

Mat kappa_jacobian(const SemiNonlinearIAE& p, double t, double s, const Vec& y) {
  if (p.kappa_y) return (*p.kappa_y)(t, s, y);
  return fd_jacobian([&](double, const Vec& x) { return p.kappa(t, s, x); }, t, y);
}

double initial_defect(const SemiNonlinearDAE& p, double t0, const Vec& y0) {
  const SemiInverseResult si = semi_inverse(p.A(t0));
  return (si.projector * (p.F(t0, y0) - p.f(t0))).norm();
}

std::vector<double> uniform_grid(Interval span, int n) {
  if (n < 1) throw InvalidInput("uniform_grid: n must be >= 1");
  if (n == 1) return {span.lo};
  std::vector<double> g(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) g[static_cast<size_t>(i)] = span.lo + (span.hi - span.lo) * i / (n - 1);
  g.back() = span.hi;
  return g;
}

namespace {

template <class P>
const VectorFn& require_exact(const P& p) {
  if (!p.exact) throw InvalidInput("verify_exact: problem has no exact solution");
  return *p.exact;
}

Vec exact_derivative(const VectorFn& y, double t, Interval domain) {
  return fd_derivative(y, t, default_fd_step(t), domain);
}

struct ResidualFn {
  Vec operator()(const LinearIAE& q, double t) const {
    const VectorFn& y = require_exact(q);
    const Vec integral =
        adaptive_integrate([&](double s) -> Vec { return q.k(t, s) * y(s); }, q.t_start, t, 1e-13);
    return q.A(t) * y(t) + integral - q.f(t);
  }
  Vec operator()(const LinearDAE& q, double t) const {
    const VectorFn& y = require_exact(q);
    return q.A(t) * exact_derivative(y, t, q.domain()) + q.B(t) * y(t) - q.f(t);
  }
  Vec operator()(const SemiNonlinearIAE& q, double t) const {
    const VectorFn& y = require_exact(q);
    const Vec integral =
        adaptive_integrate([&](double s) -> Vec { return q.kappa(t, s, y(s)); }, q.t_start, t, 1e-13);
    return q.A(t) * y(t) + integral - q.f(t);
  }
  Vec operator()(const SemiNonlinearDAE& q, double t) const {
    const VectorFn& y = require_exact(q);
    return q.A(t) * exact_derivative(y, t, q.domain()) + q.F(t, y(t)) - q.f(t);
  }
};

}  // namespace

ExactCheck verify_exact(const Problem& p, const std::vector<double>& grid, double tol) {
  ExactCheck out;
  const ResidualFn residual;
  for (double t : grid) {
    const double r = std::visit([&](const auto& q) { return residual(q, t).template lpNorm<Eigen::Infinity>(); }, p);
    if (!(r <= out.max_residual)) {
      out.max_residual = r;
      out.worst_time = t;
    }
  }
  out.passed = out.max_residual <= tol;
  return out;
}

namespace {

template <class Analytic, class Fd>
double mismatch(int r, Interval dom, int samples, unsigned seed, double radius, const Analytic& analytic,
                const Fd& fd) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> time(dom.lo, dom.hi);
  std::uniform_real_distribution<double> coord(-radius, radius);
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double t = time(rng);
    const double s = dom.lo + (t - dom.lo) * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    Vec y(r);
    for (int j = 0; j < r; ++j) y(j) = coord(rng);
    const Mat a = analytic(t, s, y);
    const Mat b = fd(t, s, y);
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    worst = std::max(worst, (a - b).cwiseAbs().maxCoeff() / scale);
  }
  return worst;
}

}  // namespace

double jacobian_mismatch(const SemiNonlinearDAE& p, int samples, unsigned seed, double radius) {
  if (!p.F_y) return 0.0;
  return mismatch(
      p.r, p.domain(), samples, seed, radius, [&](double t, double, const Vec& y) { return (*p.F_y)(t, y); },
      [&](double t, double, const Vec& y) { return fd_jacobian(p.F, t, y); });
}

double jacobian_mismatch(const SemiNonlinearIAE& p, int samples, unsigned seed, double radius) {
  if (!p.kappa_y) return 0.0;
  return mismatch(
      p.r, p.domain(), samples, seed, radius,
      [&](double t, double s, const Vec& y) { return (*p.kappa_y)(t, s, y); },
      [&](double t, double s, const Vec& y) {
        return fd_jacobian([&](double, const Vec& x) { return p.kappa(t, s, x); }, t, y);
      });
}

}  // namespace rankdeg
