#include "rankdeg/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>
#include <utility>

namespace rankdeg {

namespace {

// P_n(x) and P_n'(x) by the three-term recurrence.
std::pair<double, double> legendre(int n, double x) {
  double p0 = 1.0;
  double p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return {p1, n * (x * p1 - p0) / (x * x - 1.0)};
}

}  // namespace

GaussRule gauss_legendre(int n) {
  if (n < 1) throw InvalidInput("gauss_legendre: order must be >= 1");
  static std::mutex mutex;
  static std::map<int, GaussRule> cache;
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(n); it != cache.end()) return it->second;
  }
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    // Newton on P_n starting from the Tricomi estimate.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    auto [pn, dpn] = legendre(n, x);
    for (int it = 0; it < 100; ++it) {
      const double dx = pn / dpn;
      x -= dx;
      std::tie(pn, dpn) = legendre(n, x);
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dpn * dpn);
    // Ascending order on [0, 1].
    rule.nodes[n - 1 - i] = 0.5 * (x + 1.0);
    rule.weights[n - 1 - i] = 0.5 * w;
  }
  std::lock_guard lock(mutex);
  cache.emplace(n, rule);
  return rule;
}

namespace {

Vec panel(const VectorFn& f, double a, double b, const GaussRule& rule) {
  const double h = b - a;
  Vec sum = rule.weights[0] * f(a + h * rule.nodes[0]);
  for (size_t q = 1; q < rule.nodes.size(); ++q) sum += rule.weights[q] * f(a + h * rule.nodes[q]);
  return h * sum;
}

Vec adapt(const VectorFn& f, double a, double b, const Vec& whole, double tol, int depth, const GaussRule& rule) {
  const double mid = 0.5 * (a + b);
  Vec left = panel(f, a, mid, rule);
  Vec right = panel(f, mid, b, rule);
  Vec halves = left + right;
  const double err = (halves - whole).lpNorm<Eigen::Infinity>();
  const double scale = std::max(1.0, halves.lpNorm<Eigen::Infinity>());
  if (err <= tol * scale || depth <= 0) return halves;
  return adapt(f, a, mid, left, 0.5 * tol, depth - 1, rule) + adapt(f, mid, b, right, 0.5 * tol, depth - 1, rule);
}

}  // namespace

Vec adaptive_integrate(const VectorFn& f, double a, double b, double tol, int max_depth) {
  if (!(tol > 0.0)) throw InvalidInput("adaptive_integrate: tol must be positive");
  const GaussRule rule = gauss_legendre(10);
  if (a == b) return Vec::Zero(f(a).size());
  const double sign = b > a ? 1.0 : -1.0;
  const double lo = std::min(a, b);
  const double hi = std::max(a, b);
  Vec whole = panel(f, lo, hi, rule);
  Vec result = adapt(f, lo, hi, whole, tol, max_depth, rule);
  if (!result.allFinite()) throw EvaluationError("adaptive_integrate: non-finite integral");
  return sign * result;
}

double adaptive_integrate(const std::function<double(double)>& f, double a, double b, double tol, int max_depth) {
  VectorFn wrapped = [&f](double x) { return Vec::Constant(1, f(x)); };
  return adaptive_integrate(wrapped, a, b, tol, max_depth)(0);
}

}  // namespace rankdeg
