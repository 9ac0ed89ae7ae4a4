#include "rankdeg/collocation.hpp"

#include <cmath>
#include <sstream>

#include "rankdeg/quadrature.hpp"

namespace rankdeg {

namespace {

// Both equation classes reduce to A(t) y + int kappa(t, s, y(s)) ds = f(t).
struct KernelModel {
  MatrixFunction A;
  KappaFn kappa;
  KappaJacobianFn kappa_y;
  VectorFn f;
  std::optional<VectorFn> exact;
  int r = 0;
  double t_start = 0.0;
  Interval domain;
};

KernelModel model_of(const SemiNonlinearIAE& p) {
  KernelModel m;
  m.A = p.A;
  m.kappa = p.kappa;
  if (p.kappa_y) {
    m.kappa_y = *p.kappa_y;
  } else {
    const KappaFn kappa = p.kappa;
    m.kappa_y = [kappa](double t, double s, const Vec& y) {
      return fd_jacobian([&](double, const Vec& x) { return kappa(t, s, x); }, t, y);
    };
  }
  m.f = p.f;
  m.exact = p.exact;
  m.r = p.r;
  m.t_start = p.t_start;
  m.domain = p.domain();
  return m;
}

KernelModel model_of(const LinearIAE& p) {
  KernelModel m;
  m.A = p.A;
  const KernelFn k = p.k;
  m.kappa = [k](double t, double s, const Vec& y) { return Vec(k(t, s) * y); };
  m.kappa_y = [k](double t, double s, const Vec&) { return k(t, s); };
  m.f = p.f;
  m.exact = p.exact;
  m.r = p.r;
  m.t_start = p.t_start;
  m.domain = p.domain();
  return m;
}

int interval_count(Interval interval, double h) {
  const double len = interval.length();
  if (!(len > 0.0)) throw InvalidInput("solve_iae: empty interval");
  const double n = std::round(len / h);
  if (n < 1 || std::abs(n * h - len) > 1e-9 * std::max(1.0, len)) {
    throw InvalidInput("solve_iae: interval length is not a multiple of h");
  }
  return static_cast<int>(n);
}

// int_{t_start}^{a} kappa(t, s, y(s)) ds along the exact solution, for a solve that begins
// after the lower integration limit.
class PreHistory {
 public:
  PreHistory(const KernelModel& m, double a) : m_(m), a_(a) {
    active_ = a_ > m_.t_start + domain_slack(a_);
    if (active_ && !m_.exact) {
      throw InvalidInput("solve_iae: interval starts after t_start and no exact solution supplies the history");
    }
  }
  bool active() const { return active_; }
  Vec operator()(double t) const {
    if (!active_) return Vec::Zero(m_.r);
    const VectorFn& y = *m_.exact;
    return adaptive_integrate([&](double s) { return Vec(m_.kappa(t, s, y(s))); }, m_.t_start, a_, 1e-13);
  }

 private:
  const KernelModel& m_;
  double a_;
  bool active_ = false;
};

// Sum over completed intervals of the Gauss rule applied to kappa(t, ., u).
class History {
 public:
  History(const KernelModel& m, const PiecewiseSolution& sol, const GaussRule& rule) : m_(m), sol_(sol), rule_(rule) {}

  void cache_interval(int n) {
    std::vector<Vec> values;
    std::vector<double> times;
    for (double x : rule_.nodes) {
      values.push_back(sol_.local(n, x));
      times.push_back(sol_.mesh(n) + sol_.step() * x);
    }
    u_.push_back(std::move(values));
    s_.push_back(std::move(times));
  }

  Vec operator()(double t, int upto) const {
    Vec sum = Vec::Zero(m_.r);
    for (int j = 0; j < upto; ++j) {
      const auto& us = u_[static_cast<size_t>(j)];
      const auto& ss = s_[static_cast<size_t>(j)];
      for (size_t q = 0; q < rule_.nodes.size(); ++q) sum += rule_.weights[q] * m_.kappa(t, ss[q], us[q]);
    }
    return sol_.step() * sum;
  }

 private:
  const KernelModel& m_;
  const PiecewiseSolution& sol_;
  const GaussRule& rule_;
  std::vector<std::vector<Vec>> u_;
  std::vector<std::vector<double>> s_;
};

IaeSolveResult solve(const KernelModel& m, const CollocationConfig& cfg, Interval interval) {
  validate(cfg);
  if (!m.domain.contains(interval.lo, domain_slack(interval.lo)) ||
      !m.domain.contains(interval.hi, domain_slack(interval.hi))) {
    throw DomainError("solve_iae: interval outside the problem domain");
  }
  if (interval.lo < m.t_start - domain_slack(interval.lo)) throw DomainError("solve_iae: interval starts before t_start");
  const int n_intervals = interval_count(interval, cfg.h);
  const int r = m.r;
  const int mnodes = static_cast<int>(cfg.c.size());
  const double h = cfg.h;
  const GaussRule rule = gauss_legendre(cfg.quad_order);

  IaeSolveResult out;
  out.continuous = cfg.c.front() == 0.0;
  out.solution = PiecewiseSolution(interval.lo, h, cfg.c, r);
  const PreHistory pre(m, interval.lo);
  if (pre.active()) out.history_source = "exact";
  History history(m, out.solution, rule);

  // Unknown nodes and the Lagrange basis at the partial-integral quadrature points.
  const int first_unknown = out.continuous ? 1 : 0;
  const int n_unknown = mnodes - first_unknown;
  std::vector<std::vector<Vec>> basis_at(static_cast<size_t>(mnodes));
  for (int i = 0; i < mnodes; ++i) {
    for (double x : rule.nodes) basis_at[static_cast<size_t>(i)].push_back(out.solution.basis(cfg.c[i] * x));
  }

  Vec start_value;
  if (m.exact) {
    start_value = (*m.exact)(interval.lo);
  } else {
    // Minimum-norm solution of the equation at t = a.
    const Vec rhs = m.f(interval.lo) - pre(interval.lo);
    start_value = semi_inverse(m.A(interval.lo)).a_minus * rhs;
  }

  for (int n = 0; n < n_intervals; ++n) {
    const double tn = interval.lo + n * h;
    Mat U(r, mnodes);
    if (out.continuous) U.col(0) = n == 0 ? start_value : out.solution.local(n - 1, 1.0);
    for (int i = first_unknown; i < mnodes; ++i) {
      if (n == 0) {
        U.col(i) = start_value;
      } else if (cfg.predictor == Predictor::extrapolate) {
        U.col(i) = out.solution.local(n - 1, 1.0 + cfg.c[i]);
      } else {
        U.col(i) = out.solution.local(n - 1, 1.0);
      }
    }

    std::vector<double> ti(static_cast<size_t>(mnodes));
    std::vector<Vec> fixed(static_cast<size_t>(mnodes));
    std::vector<Mat> ai(static_cast<size_t>(mnodes));
    for (int i = first_unknown; i < mnodes; ++i) {
      const double t = tn + cfg.c[i] * h;
      ti[static_cast<size_t>(i)] = t;
      fixed[static_cast<size_t>(i)] = m.f(t) - pre(t) - history(t, n);
      ai[static_cast<size_t>(i)] = m.A(t);
    }

    const auto residual_of = [&](const Mat& u, std::vector<Vec>* node_res) {
      Vec g(r * n_unknown);
      for (int i = first_unknown; i < mnodes; ++i) {
        const size_t ii = static_cast<size_t>(i);
        Vec partial = Vec::Zero(r);
        for (size_t q = 0; q < rule.nodes.size(); ++q) {
          const double s = tn + cfg.c[i] * h * rule.nodes[q];
          partial += rule.weights[q] * m.kappa(ti[ii], s, Vec(u * basis_at[ii][q]));
        }
        const Vec gi = ai[ii] * u.col(i) + cfg.c[i] * h * partial - fixed[ii];
        g.segment((i - first_unknown) * r, r) = gi;
        if (node_res) node_res->push_back(gi);
      }
      return g;
    };

    CollocationStep rec;
    rec.n = n;
    rec.t = tn;
    Vec g = residual_of(U, nullptr);
    double gnorm = g.lpNorm<Eigen::Infinity>();
    bool converged = gnorm <= cfg.newton_tol;
    std::string why;
    Mat jac(r * n_unknown, r * n_unknown);
    while (!converged && rec.newton_iterations < cfg.newton_max_iter) {
      jac.setZero();
      for (int i = first_unknown; i < mnodes; ++i) {
        const size_t ii = static_cast<size_t>(i);
        const int row = (i - first_unknown) * r;
        jac.block(row, row, r, r) += ai[ii];
        for (size_t q = 0; q < rule.nodes.size(); ++q) {
          const double s = tn + cfg.c[i] * h * rule.nodes[q];
          const Mat ky = m.kappa_y(ti[ii], s, Vec(U * basis_at[ii][q]));
          const double scale = cfg.c[i] * h * rule.weights[q];
          for (int j = first_unknown; j < mnodes; ++j) {
            jac.block(row, (j - first_unknown) * r, r, r) += scale * basis_at[ii][q](j) * ky;
          }
        }
      }
      const Vec delta = jac.fullPivLu().solve(g);
      ++rec.newton_iterations;
      if (!delta.allFinite()) {
        why = "singular Newton matrix";
        break;
      }
      for (int j = first_unknown; j < mnodes; ++j) U.col(j) -= delta.segment((j - first_unknown) * r, r);
      g = residual_of(U, nullptr);
      gnorm = g.lpNorm<Eigen::Infinity>();
      if (!std::isfinite(gnorm)) {
        why = "non-finite residual";
        break;
      }
      converged = gnorm <= cfg.newton_tol;
    }
    if (rec.newton_iterations > 0) {
      Eigen::JacobiSVD<Mat> svd(jac);
      const Vec& sv = svd.singularValues();
      rec.condition_number = sv(sv.size() - 1) > 0 ? sv(0) / sv(sv.size() - 1) : INFINITY;
    }
    rec.residual_norm = gnorm;
    out.steps.push_back(rec);
    if (!converged) {
      std::ostringstream msg;
      msg << "Newton did not converge at step " << n << " (t = " << tn << ")";
      msg << (why.empty() ? ", residual " + std::to_string(gnorm) : ": " + why);
      out.failure = CollocationFailure{n, tn, msg.str()};
      break;
    }
    std::vector<Vec> node_res;
    residual_of(U, &node_res);
    for (int i = first_unknown; i < mnodes; ++i) {
      out.collocation_times.push_back(ti[static_cast<size_t>(i)]);
      out.collocation_residuals.push_back(node_res[static_cast<size_t>(i - first_unknown)].lpNorm<Eigen::Infinity>());
    }
    out.solution.push_back(U);
    history.cache_interval(n);
  }
  return out;
}

std::vector<double> residual_impl(const KernelModel& m, const PiecewiseSolution& sol, const std::vector<double>& probe,
                                  int quad_order) {
  const GaussRule rule = gauss_legendre(quad_order);
  const PreHistory pre(m, sol.start());
  std::vector<double> out;
  out.reserve(probe.size());
  for (double t : probe) {
    if (!Interval{sol.start(), sol.end()}.contains(t, domain_slack(t))) {
      throw DomainError("residual: probe point outside the solved span");
    }
    int n = static_cast<int>(std::floor((t - sol.start()) / sol.step()));
    n = std::clamp(n, 0, sol.intervals() - 1);
    const double tn = sol.mesh(n);
    Vec integral = pre(t);
    for (int j = 0; j < n; ++j) {
      for (size_t q = 0; q < rule.nodes.size(); ++q) {
        integral += sol.step() * rule.weights[q] *
                    m.kappa(t, sol.mesh(j) + sol.step() * rule.nodes[q], sol.local(j, rule.nodes[q]));
      }
    }
    const double tau = (t - tn) / sol.step();
    for (size_t q = 0; q < rule.nodes.size(); ++q) {
      integral += tau * sol.step() * rule.weights[q] *
                  m.kappa(t, tn + tau * sol.step() * rule.nodes[q], sol.local(n, tau * rule.nodes[q]));
    }
    out.push_back((m.A(t) * sol(t) + integral - m.f(t)).lpNorm<Eigen::Infinity>());
  }
  return out;
}

}  // namespace

void validate(const CollocationConfig& cfg) {
  if (cfg.c.empty()) throw InvalidInput("collocation: no collocation parameters");
  for (size_t i = 0; i < cfg.c.size(); ++i) {
    if (cfg.c[i] < 0.0 || cfg.c[i] > 1.0) throw InvalidInput("collocation: parameters must lie in [0, 1]");
    if (i > 0 && !(cfg.c[i] > cfg.c[i - 1])) throw InvalidInput("collocation: parameters must be increasing");
  }
  if (cfg.c.front() == 0.0 && cfg.c.size() < 2) throw InvalidInput("collocation: c = [0] leaves no collocation point");
  if (!(cfg.h > 0.0)) throw InvalidInput("collocation: h must be positive");
  if (cfg.quad_order < 1) throw InvalidInput("collocation: quad_order must be >= 1");
  if (!(cfg.newton_tol > 0.0)) throw InvalidInput("collocation: newton_tol must be positive");
  if (cfg.newton_max_iter < 1) throw InvalidInput("collocation: newton_max_iter must be >= 1");
}

PiecewiseSolution::PiecewiseSolution(double t0, double h, std::vector<double> c, int r)
    : t0_(t0), h_(h), c_(std::move(c)), r_(r) {}

Vec PiecewiseSolution::basis(double tau) const {
  const int m = static_cast<int>(c_.size());
  Vec l(m);
  for (int j = 0; j < m; ++j) {
    double v = 1.0;
    for (int k = 0; k < m; ++k) {
      if (k != j) v *= (tau - c_[k]) / (c_[j] - c_[k]);
    }
    l(j) = v;
  }
  return l;
}

Vec PiecewiseSolution::local(int n, double tau) const { return nodal(n) * basis(tau); }

Vec PiecewiseSolution::operator()(double t) const {
  if (nodal_.empty()) throw DomainError("PiecewiseSolution: empty solution");
  if (!Interval{start(), end()}.contains(t, domain_slack(t))) throw DomainError("PiecewiseSolution: t outside span");
  int n = static_cast<int>(std::floor((t - t0_) / h_));
  n = std::clamp(n, 0, intervals() - 1);
  return local(n, (t - mesh(n)) / h_);
}

void PiecewiseSolution::push_back(Mat nodal) {
  if (nodal.rows() != r_ || nodal.cols() != static_cast<Eigen::Index>(c_.size())) {
    throw InvalidInput("PiecewiseSolution: nodal block has the wrong shape");
  }
  nodal_.push_back(std::move(nodal));
}

IaeSolveResult solve_iae(const SemiNonlinearIAE& p, const CollocationConfig& cfg, Interval interval) {
  return solve(model_of(p), cfg, interval);
}

IaeSolveResult solve_iae(const LinearIAE& p, const CollocationConfig& cfg, Interval interval) {
  return solve(model_of(p), cfg, interval);
}

std::vector<double> residual(const SemiNonlinearIAE& p, const PiecewiseSolution& sol, const std::vector<double>& probe,
                             int quad_order) {
  return residual_impl(model_of(p), sol, probe, quad_order);
}

std::vector<double> residual(const LinearIAE& p, const PiecewiseSolution& sol, const std::vector<double>& probe,
                             int quad_order) {
  return residual_impl(model_of(p), sol, probe, quad_order);
}

PiecewiseSolution interpolate(const VectorFn& fn, const CollocationConfig& cfg, Interval interval, int r) {
  validate(cfg);
  const int n_intervals = interval_count(interval, cfg.h);
  PiecewiseSolution sol(interval.lo, cfg.h, cfg.c, r);
  for (int n = 0; n < n_intervals; ++n) {
    Mat u(r, static_cast<Eigen::Index>(cfg.c.size()));
    for (size_t i = 0; i < cfg.c.size(); ++i) u.col(static_cast<Eigen::Index>(i)) = fn(sol.mesh(n) + cfg.c[i] * cfg.h);
    sol.push_back(u);
  }
  return sol;
}

}  // namespace rankdeg
