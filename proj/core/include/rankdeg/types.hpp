#pragma once

#include <functional>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace rankdeg {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

using VectorFn = std::function<Vec(double)>;
using KernelFn = std::function<Mat(double t, double s)>;
using StateFn = std::function<Vec(double t, const Vec& y)>;
using StateJacobianFn = std::function<Mat(double t, const Vec& y)>;
using KappaFn = std::function<Vec(double t, double s, const Vec& y)>;
using KappaJacobianFn = std::function<Mat(double t, double s, const Vec& y)>;
using ScalarStateFn = std::function<double(double t, const Vec& y)>;

/// Closed time interval [lo, hi].
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
  bool contains(double t, double slack = 0.0) const { return t >= lo - slack && t <= hi + slack; }
};

// Relative slack used when deciding whether a time lies inside a domain.
inline double domain_slack(double t) { return 1e-12 * (1.0 + (t < 0 ? -t : t)); }

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class EvaluationError : public Error {
 public:
  using Error::Error;
};

class NotFound : public Error {
 public:
  using Error::Error;
};

/// Thrown when a chain matrix changes rank at a point where it was assumed constant.
class ChainError : public Error {
 public:
  ChainError(int level, double t, const std::string& what) : Error(what), level_(level), t_(t) {}
  int level() const { return level_; }
  double time() const { return t_; }

 private:
  int level_;
  double t_;
};

class ClassificationError : public Error {
 public:
  using Error::Error;
};

/// A scalar relation on (t, y) whose zero set changes the index.
struct CriticalCondition {
  std::string id;
  ScalarStateFn fn;
};

}  // namespace rankdeg
