#include "rankdeg/dae_solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace rankdeg {

namespace {

struct StepOutcome {
  bool ok = false;
  Vec y;
  int iterations = 0;
  double residual = 0.0;
  std::string why;
};

// One BDF step from the last entry of (ts, ys) to t_new.
StepOutcome bdf_step(const SemiNonlinearDAE& p, const DaeSolveConfig& cfg, const std::vector<double>& ts,
                     const std::vector<Vec>& ys, double t_new) {
  const double tn = ts.back();
  const Vec& yn = ys.back();
  const double h = t_new - tn;
  double alpha = 1.0 / h;
  Vec beta = -yn / h;
  if (cfg.order == 2 && ts.size() >= 2) {
    const double omega = h / (tn - ts[ts.size() - 2]);
    const Vec& ynm1 = ys[ys.size() - 2];
    alpha = (1.0 + 2.0 * omega) / ((1.0 + omega) * h);
    beta = (-(1.0 + omega) * yn + omega * omega / (1.0 + omega) * ynm1) / h;
  }
  const Mat a = p.A(t_new);
  const Vec f = p.f(t_new);

  StepOutcome out;
  Vec y = yn;
  for (int it = 1; it <= cfg.newton_max_iter; ++it) {
    const Vec g = a * (alpha * y + beta) + p.F(t_new, y) - f;
    const Mat jac = alpha * a + state_jacobian(p, t_new, y);
    const Vec delta = jac.fullPivLu().solve(g);
    out.iterations = it;
    if (!delta.allFinite()) {
      out.why = "singular Newton matrix";
      return out;
    }
    y -= delta;
    if (!y.allFinite()) {
      out.why = "non-finite iterate";
      return out;
    }
    if (delta.lpNorm<Eigen::Infinity>() <= cfg.newton_tol * (1.0 + y.lpNorm<Eigen::Infinity>())) {
      const Vec g_final = a * (alpha * y + beta) + p.F(t_new, y) - f;
      if (!g_final.allFinite()) {
        out.why = "non-finite residual";
        return out;
      }
      out.ok = true;
      out.y = y;
      out.residual = g_final.lpNorm<Eigen::Infinity>();
      return out;
    }
  }
  out.why = "Newton iteration limit reached";
  return out;
}

void monitor(const DaeSolveConfig& cfg, double t, const Vec& y, std::vector<double>& last, DaeSolveResult& out) {
  for (size_t i = 0; i < cfg.monitor.size(); ++i) {
    const double v = cfg.monitor[i].fn(t, y);
    const bool sign_change = std::isfinite(last[i]) && ((last[i] < 0) != (v < 0)) && last[i] != 0.0;
    if (std::abs(v) < cfg.warn_threshold || sign_change) {
      out.warnings.push_back({t, cfg.monitor[i].id, v, sign_change});
    }
    last[i] = v;
  }
}

// Indices of the (up to) four accepted points nearest to t.
std::pair<size_t, size_t> stencil(const std::vector<double>& ts, double t) {
  const size_t n = ts.size();
  const size_t width = std::min<size_t>(4, n);
  size_t j = static_cast<size_t>(std::lower_bound(ts.begin(), ts.end(), t) - ts.begin());
  size_t lo = j >= 2 ? j - 2 : 0;
  if (lo + width > n) lo = n - width;
  return {lo, lo + width};
}

}  // namespace

Vec DaeSolveResult::operator()(double t) const {
  if (times.empty()) throw DomainError("DaeSolveResult: empty solution");
  if (!Interval{times.front(), times.back()}.contains(t, domain_slack(t))) {
    throw DomainError("DaeSolveResult: t outside solved span");
  }
  const auto [lo, hi] = stencil(times, t);
  Vec out = Vec::Zero(values.front().size());
  for (size_t j = lo; j < hi; ++j) {
    double l = 1.0;
    for (size_t k = lo; k < hi; ++k) {
      if (k != j) l *= (t - times[k]) / (times[j] - times[k]);
    }
    out += l * values[j];
  }
  return out;
}

Vec DaeSolveResult::derivative(double t) const {
  if (times.size() < 2) throw DomainError("DaeSolveResult: need two points to differentiate");
  if (!Interval{times.front(), times.back()}.contains(t, domain_slack(t))) {
    throw DomainError("DaeSolveResult: t outside solved span");
  }
  const auto [lo, hi] = stencil(times, t);
  Vec out = Vec::Zero(values.front().size());
  for (size_t j = lo; j < hi; ++j) {
    // d/dt of the Lagrange basis polynomial l_j.
    double dl = 0.0;
    for (size_t m = lo; m < hi; ++m) {
      if (m == j) continue;
      double term = 1.0 / (times[j] - times[m]);
      for (size_t k = lo; k < hi; ++k) {
        if (k != j && k != m) term *= (t - times[k]) / (times[j] - times[k]);
      }
      dl += term;
    }
    out += dl * values[j];
  }
  return out;
}

DaeSolveResult solve_dae(const SemiNonlinearDAE& p, const DaeSolveConfig& cfg, Interval interval) {
  if (!(cfg.h > 0.0)) throw InvalidInput("solve_dae: h must be positive");
  if (cfg.order != 1 && cfg.order != 2) throw InvalidInput("solve_dae: order must be 1 or 2");
  if (cfg.newton_max_iter < 1 || cfg.max_halvings < 0) throw InvalidInput("solve_dae: invalid Newton settings");
  if (!(interval.hi > interval.lo)) throw InvalidInput("solve_dae: empty interval");
  const Interval dom = p.domain();
  if (!dom.contains(interval.lo, domain_slack(interval.lo)) || !dom.contains(interval.hi, domain_slack(interval.hi))) {
    throw DomainError("solve_dae: interval outside the problem domain");
  }

  Vec y0;
  if (p.exact) {
    y0 = (*p.exact)(interval.lo);
  } else if (std::abs(interval.lo - p.t_start) <= domain_slack(interval.lo) && p.y0.size() == p.r) {
    y0 = p.y0;
  } else {
    throw InvalidInput("solve_dae: no initial value at the interval start");
  }
  if (initial_defect(p, interval.lo, y0) > cfg.consistency_tol) {
    throw InvalidInput("solve_dae: inconsistent initial value");
  }

  DaeSolveResult out;
  out.times.push_back(interval.lo);
  out.values.push_back(y0);
  std::vector<double> last(cfg.monitor.size(), std::nan(""));
  monitor(cfg, interval.lo, y0, last, out);

  const long n_steps = std::max(1L, static_cast<long>(std::ceil(interval.length() / cfg.h - 1e-9)));
  for (long n = 1; n <= n_steps; ++n) {
    const double t_prev = out.times.back();
    const double t_next = n == n_steps ? interval.hi : interval.lo + static_cast<double>(n) * cfg.h;
    StepOutcome step = bdf_step(p, cfg, out.times, out.values, t_next);
    if (step.ok) {
      out.times.push_back(t_next);
      out.values.push_back(step.y);
      out.steps.push_back({t_next, t_next - t_prev, step.iterations, step.residual, 0});
      monitor(cfg, t_next, step.y, last, out);
      continue;
    }
    // Retry as 2^k substeps.
    bool recovered = false;
    std::string why = step.why;
    int attempts = 1;
    for (int k = 1; k <= cfg.max_halvings && !recovered; ++k) {
      ++attempts;
      const int pieces = 1 << k;
      std::vector<double> ts = out.times;
      std::vector<Vec> ys = out.values;
      std::vector<DaeStep> recs;
      bool ok = true;
      for (int j = 1; j <= pieces; ++j) {
        const double tj = j == pieces ? t_next : t_prev + (t_next - t_prev) * j / pieces;
        StepOutcome sub = bdf_step(p, cfg, ts, ys, tj);
        if (!sub.ok) {
          ok = false;
          why = sub.why;
          break;
        }
        recs.push_back({tj, tj - ts.back(), sub.iterations, sub.residual, k});
        ts.push_back(tj);
        ys.push_back(sub.y);
      }
      if (!ok) continue;
      recovered = true;
      for (size_t j = 0; j < recs.size(); ++j) {
        const size_t idx = out.times.size();
        out.times.push_back(ts[idx]);
        out.values.push_back(ys[idx]);
        out.steps.push_back(recs[j]);
        monitor(cfg, ts[idx], ys[idx], last, out);
      }
    }
    if (!recovered) {
      std::ostringstream msg;
      msg << "Newton failed on step to t = " << t_next << " after " << attempts << " attempts: " << why;
      out.failure = DaeFailure{t_prev, msg.str(), attempts};
      break;
    }
  }
  return out;
}

std::vector<double> dae_residual(const SemiNonlinearDAE& p, const DaeSolveResult& sol,
                                 const std::vector<double>& probe) {
  std::vector<double> out;
  out.reserve(probe.size());
  for (double t : probe) {
    const Vec u = sol(t);
    out.push_back((p.A(t) * sol.derivative(t) + p.F(t, u) - p.f(t)).lpNorm<Eigen::Infinity>());
  }
  return out;
}

DaeSolveResult sampled_solution(const VectorFn& fn, Interval interval, double h) {
  if (!(h > 0.0) || !(interval.hi > interval.lo)) throw InvalidInput("sampled_solution: bad mesh");
  DaeSolveResult out;
  const long n = std::max(1L, static_cast<long>(std::ceil(interval.length() / h - 1e-9)));
  for (long i = 0; i <= n; ++i) {
    const double t = i == n ? interval.hi : interval.lo + static_cast<double>(i) * h;
    out.times.push_back(t);
    out.values.push_back(fn(t));
  }
  return out;
}

}  // namespace rankdeg
