#include "rankdeg/matrix_core.hpp"

#include <limits>
#include <utility>

namespace rankdeg {

namespace {

void require_square_finite(const Mat& m, const char* who) {
  if (m.rows() != m.cols()) throw InvalidInput(std::string(who) + ": matrix must be square");
  if (!all_finite(m)) throw InvalidInput(std::string(who) + ": non-finite entries");
}

int rank_from_singular_values(const Vec& sv, double tol) {
  if (sv.size() == 0) return 0;
  const double smax = sv(0);
  if (smax == 0.0) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > tol * smax) ++rank;
  }
  return rank;
}

}  // namespace

bool all_finite(const Mat& m) { return m.allFinite(); }

int numerical_rank(const Mat& m, double tol) {
  if (!(tol > 0.0)) throw InvalidInput("numerical_rank: tol must be positive");
  if (!all_finite(m)) throw InvalidInput("numerical_rank: non-finite entries");
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Mat> svd(m);
  return rank_from_singular_values(svd.singularValues(), tol);
}

double condition_number(const Mat& m) {
  require_square_finite(m, "condition_number");
  if (m.size() == 0) return 1.0;
  Eigen::JacobiSVD<Mat> svd(m);
  const Vec& sv = svd.singularValues();
  const double smin = sv(sv.size() - 1);
  if (smin == 0.0) return std::numeric_limits<double>::infinity();
  return sv(0) / smin;
}

SemiInverseResult semi_inverse(const Mat& m, double tol) {
  require_square_finite(m, "semi_inverse");
  if (!(tol > 0.0)) throw InvalidInput("semi_inverse: tol must be positive");
  const Eigen::Index r = m.rows();
  SemiInverseResult out;
  out.tol_used = tol;
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec& sv = svd.singularValues();
  out.rank = rank_from_singular_values(sv, tol);
  Mat sinv = Mat::Zero(r, r);
  for (int i = 0; i < out.rank; ++i) sinv(i, i) = 1.0 / sv(i);
  out.a_minus = svd.matrixV() * sinv * svd.matrixU().transpose();
  // E - A A^+ equals the projector onto the orthogonal complement of range(A); building it
  // from the discarded left singular vectors keeps it exactly symmetric and idempotent.
  const Mat& u = svd.matrixU();
  const Eigen::Index null_dim = r - out.rank;
  if (null_dim > 0) {
    const auto un = u.rightCols(null_dim);
    out.projector = un * un.transpose();
  } else {
    out.projector = Mat::Zero(r, r);
  }
  return out;
}

MatrixFunction::MatrixFunction(Eval eval, Interval domain, Eval derivative, int smoothness)
    : eval_(std::move(eval)), derivative_(std::move(derivative)), domain_(domain), smoothness_(smoothness) {
  if (!eval_) throw InvalidInput("MatrixFunction: missing evaluator");
  if (!(domain_.hi >= domain_.lo)) throw InvalidInput("MatrixFunction: empty domain");
  if (smoothness_ < 0) throw InvalidInput("MatrixFunction: smoothness must be >= 0");
}

MatrixFunction MatrixFunction::constant(const Mat& m, Interval domain) {
  if (!all_finite(m)) throw InvalidInput("MatrixFunction::constant: non-finite entries");
  const Mat zero = Mat::Zero(m.rows(), m.cols());
  return MatrixFunction([m](double) { return m; }, domain, [zero](double) { return zero; },
                        std::numeric_limits<int>::max());
}

Mat MatrixFunction::operator()(double t) const {
  if (!domain_.contains(t, domain_slack(t))) {
    throw DomainError("MatrixFunction: t = " + std::to_string(t) + " outside [" + std::to_string(domain_.lo) + ", " +
                      std::to_string(domain_.hi) + "]");
  }
  Mat m = eval_(t);
  if (!all_finite(m)) throw EvaluationError("MatrixFunction: non-finite value at t = " + std::to_string(t));
  return m;
}

Mat MatrixFunction::analytic_derivative(double t) const {
  if (!derivative_) throw InvalidInput("MatrixFunction: no analytic derivative");
  if (!domain_.contains(t, domain_slack(t))) throw DomainError("MatrixFunction: derivative outside domain");
  return derivative_(t);
}

Mat matfn_derivative(const MatrixFunction& f, double t, std::optional<double> step) {
  if (!f.domain().contains(t, domain_slack(t))) throw DomainError("matfn_derivative: t outside domain");
  if (f.has_derivative()) return f.analytic_derivative(t);
  const double h = step.value_or(default_fd_step(t));
  return fd_derivative([&f](double x) { return f(x); }, t, h, f.domain());
}

}  // namespace rankdeg
