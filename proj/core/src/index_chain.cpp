#include "rankdeg/index_chain.hpp"

#include <cmath>
#include <memory>
#include <sstream>

#include "memo.hpp"
#include "rankdeg/quadrature.hpp"

namespace rankdeg {

namespace {

using MatMemo = detail::Memo<double, Mat>;
using KernelMemo = detail::Memo<std::pair<double, double>, Mat>;
using VecMemo = detail::Memo<double, Vec>;

double step_at(const ChainOptions& opt, double t) { return opt.fd_step > 0.0 ? opt.fd_step : default_fd_step(t); }

std::function<Mat(double)> make_projector(const MatrixFunction& a, const ChainOptions& opt,
                                          std::optional<int> expected_rank, int level_index) {
  auto memo = std::make_shared<MatMemo>();
  const double tol = opt.tol;
  const SemiInverseFn custom = opt.semi_inverse;
  return [a, memo, tol, custom, expected_rank, level_index](double t) {
    return memo->get(t, [&] {
      const Mat at = a(t);
      const SemiInverseResult si = semi_inverse(at, tol);
      if (expected_rank && si.rank != *expected_rank) {
        std::ostringstream msg;
        msg << "A_" << level_index << " has rank " << si.rank << " at t = " << t << ", expected " << *expected_rank;
        throw ChainError(level_index, t, msg.str());
      }
      if (!custom) return si.projector;
      const Mat e = Mat::Identity(at.rows(), at.cols());
      return Mat(e - at * custom(at, tol));
    });
  };
}

int sign_of(double x) { return (x > 0) - (x < 0); }

void validate_grid(const std::vector<double>& grid, const Interval& dom) {
  if (grid.empty()) throw InvalidInput("rank_degree_index: empty grid");
  for (size_t i = 0; i < grid.size(); ++i) {
    if (!dom.contains(grid[i], domain_slack(grid[i]))) throw DomainError("rank_degree_index: grid point outside domain");
    if (i > 0 && !(grid[i] > grid[i - 1])) throw InvalidInput("rank_degree_index: grid must be increasing");
  }
}

}  // namespace

std::string to_string(ChainStatus s) {
  switch (s) {
    case ChainStatus::ok:
      return "ok";
    case ChainStatus::non_constant_rank:
      return "non-constant-rank";
    case ChainStatus::exceeded_max_level:
      return "exceeded-max-level";
  }
  return "unknown";
}

ChainStep chain_step(const LinearPair& level, const ChainOptions& opt, std::optional<int> expected_rank,
                     int level_index) {
  ChainStep out;
  out.projector = make_projector(level.A, opt, expected_rank, level_index);

  const MatrixFunction a = level.A;
  const KernelFn k = level.k;
  const auto v = out.projector;
  const Interval dom = a.domain();

  auto a_memo = std::make_shared<MatMemo>();
  out.next.A = MatrixFunction(
      [a, k, v, a_memo](double t) { return a_memo->get(t, [&] { return Mat(a(t) + v(t) * k(t, t)); }); }, dom);

  auto k_memo = std::make_shared<KernelMemo>();
  out.next.k = [k, v, dom, opt, k_memo](double t, double s) {
    return k_memo->get({t, s}, [&] {
      const auto vk = [&](double x) { return Mat(v(x) * k(x, s)); };
      return Mat(fd_derivative(vk, t, step_at(opt, t), dom) + k(t, s));
    });
  };
  return out;
}

IndexReport rank_degree_index(const MatrixFunction& A, const KernelFn& k, const std::vector<double>& grid,
                              const ChainOptions& opt) {
  if (opt.nu_max < 1) throw InvalidInput("rank_degree_index: nu_max must be >= 1");
  if (!(opt.tol > 0.0)) throw InvalidInput("rank_degree_index: tol must be positive");
  validate_grid(grid, A.domain());

  IndexReport report;
  report.grid = grid;
  report.tol = opt.tol;
  LinearPair pair{A, k};

  const auto fail = [&](ChainStatus status, int level, double t, const std::string& why) {
    report.status = status;
    report.failed_level = level;
    report.failed_at = t;
    report.diagnosis = why;
    report.nu.reset();
  };

  for (int i = 0;; ++i) {
    ChainLevel lvl;
    lvl.level = i;
    lvl.pair = pair;
    std::vector<int> ranks;
    try {
      for (double t : grid) {
        const Mat a = pair.A(t);
        ranks.push_back(numerical_rank(a, opt.tol));
        lvl.det_sample.emplace_back(t, a.determinant());
      }
    } catch (const ChainError& e) {
      report.levels.push_back(lvl);
      fail(ChainStatus::non_constant_rank, e.level(), e.time(), e.what());
      return report;
    }
    const int r = static_cast<int>(pair.A(grid.front()).rows());
    lvl.rank = ranks.front();
    for (size_t j = 1; j < ranks.size(); ++j) {
      if (ranks[j] != ranks.front()) {
        report.levels.push_back(lvl);
        std::ostringstream msg;
        msg << "rank of A_" << i << " changes from " << ranks.front() << " to " << ranks[j] << " at t = " << grid[j];
        fail(ChainStatus::non_constant_rank, i, grid[j], msg.str());
        return report;
      }
    }
    if (lvl.rank == r) {
      for (size_t j = 1; j < grid.size(); ++j) {
        const int s0 = sign_of(lvl.det_sample[j - 1].second);
        const int s1 = sign_of(lvl.det_sample[j].second);
        if (s0 != 0 && s1 != 0 && s0 != s1) {
          report.levels.push_back(lvl);
          std::ostringstream msg;
          msg << "det A_" << i << " changes sign between t = " << grid[j - 1] << " and t = " << grid[j];
          fail(ChainStatus::non_constant_rank, i, grid[j], msg.str());
          return report;
        }
      }
      lvl.projector = make_projector(pair.A, opt, r, i);
      report.levels.push_back(lvl);
      report.nu = i;
      report.status = ChainStatus::ok;
      return report;
    }
    if (i == opt.nu_max) {
      lvl.projector = make_projector(pair.A, opt, lvl.rank, i);
      report.levels.push_back(lvl);
      std::ostringstream msg;
      msg << "A_" << i << " still singular at level nu_max = " << opt.nu_max;
      fail(ChainStatus::exceeded_max_level, i, grid.front(), msg.str());
      return report;
    }
    ChainStep step = chain_step(pair, opt, lvl.rank, i);
    lvl.projector = step.projector;
    report.levels.push_back(lvl);
    pair = std::move(step.next);
  }
}

IndexReport rank_degree_index(const LinearIAE& p, const std::vector<double>& grid, const ChainOptions& opt) {
  return rank_degree_index(p.A, p.k, grid, opt);
}

std::vector<VectorFn> rhs_chain(const VectorFn& f, const IndexReport& report, const ChainOptions& opt) {
  if (report.status != ChainStatus::ok || !report.nu) throw InvalidInput("rhs_chain: index report is not ok");
  const Interval dom = report.levels.front().pair.A.domain();
  std::vector<VectorFn> out;
  out.push_back([f, dom](double t) {
    if (!dom.contains(t, domain_slack(t))) throw DomainError("rhs_chain: t outside domain");
    return f(t);
  });
  for (int i = 0; i < *report.nu; ++i) {
    const VectorFn prev = out.back();
    const auto v = report.levels[static_cast<size_t>(i)].projector;
    auto memo = std::make_shared<VecMemo>();
    out.push_back([prev, v, dom, opt, memo](double t) {
      return memo->get(t, [&] {
        const auto vf = [&](double x) { return Vec(v(x) * prev(x)); };
        return Vec(fd_derivative(vf, t, step_at(opt, t), dom) + prev(t));
      });
    });
  }
  return out;
}

ConsistencyReport consistency_check(const IndexReport& report, const std::vector<VectorFn>& F, double tol,
                                    std::optional<double> t0) {
  if (report.status != ChainStatus::ok || !report.nu || *report.nu < 1) {
    throw InvalidInput("consistency_check: needs an ok index report with nu >= 1");
  }
  const int nu = *report.nu;
  if (static_cast<int>(F.size()) < nu + 1) throw InvalidInput("consistency_check: right-hand-side chain too short");
  ConsistencyReport out;
  out.t0 = t0.value_or(report.levels.front().pair.A.domain().lo);
  const Mat a_nu = report.levels[static_cast<size_t>(nu)].pair.A(out.t0);
  if (numerical_rank(a_nu, report.tol) < a_nu.rows()) {
    throw Error("consistency_check: inconsistent chain, A_nu(t0) is numerically singular");
  }
  out.condition_number = condition_number(a_nu);
  out.ill_conditioned = out.condition_number > 1e8;
  const Vec y0 = a_nu.partialPivLu().solve(F[static_cast<size_t>(nu)](out.t0));
  out.passed = true;
  for (int i = 0; i < nu; ++i) {
    const auto& lvl = report.levels[static_cast<size_t>(i)];
    ConsistencyCondition c;
    c.level = i;
    c.residual = (lvl.pair.A(out.t0) * y0 - F[static_cast<size_t>(i)](out.t0)).lpNorm<Eigen::Infinity>();
    c.passed = c.residual <= tol;
    out.passed = out.passed && c.passed;
    out.conditions.push_back(c);
  }
  return out;
}

LinearIAE dae_to_iae(const LinearDAE& p, double quad_tol) {
  LinearIAE q;
  q.r = p.r;
  q.t_start = p.t_start;
  q.T = p.T;
  q.A = p.A;
  q.exact = p.exact;
  const MatrixFunction a = p.A;
  const MatrixFunction b = p.B;
  q.k = [a, b](double, double s) { return Mat(b(s) - matfn_derivative(a, s)); };
  const VectorFn rhs = p.f;
  const double t0 = p.t_start;
  const Vec offset = p.y0.size() == 0 ? Vec::Zero(p.r) : Vec(a(t0) * p.y0);
  q.f = [rhs, t0, offset, quad_tol](double t) { return Vec(adaptive_integrate(rhs, t0, t, quad_tol) + offset); };
  return q;
}

HessenbergCheck hessenberg_index(int nu, const std::vector<std::function<Mat(double)>>& diag_jacobians,
                                 const std::vector<double>& grid, double tol) {
  if (nu < 1) throw InvalidInput("hessenberg_index: nu must be >= 1");
  if (static_cast<int>(diag_jacobians.size()) != nu) throw InvalidInput("hessenberg_index: need nu diagonal blocks");
  if (grid.empty()) throw InvalidInput("hessenberg_index: empty grid");
  HessenbergCheck out;
  out.nu = nu;
  for (double t : grid) {
    Mat product = diag_jacobians.front()(t);
    for (size_t i = 1; i < diag_jacobians.size(); ++i) {
      const Mat block = diag_jacobians[i](t);
      if (product.cols() != block.rows()) throw InvalidInput("hessenberg_index: inconsistent block sizes");
      product = product * block;
    }
    if (product.rows() != product.cols()) throw InvalidInput("hessenberg_index: block product is not square");
    const double cond = condition_number(product);
    out.worst_condition = std::max(out.worst_condition, cond);
    if (!(cond < 1.0 / tol)) {
      out.violated_at = t;
      out.confirmed = false;
      return out;
    }
  }
  out.confirmed = true;
  return out;
}

}  // namespace rankdeg
