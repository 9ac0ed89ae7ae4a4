#pragma once

#include <vector>

#include "rankdeg/types.hpp"

namespace rankdeg {

/// Gauss-Legendre rule mapped to [0, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussRule gauss_legendre(int n);

/// Adaptive Gauss-Legendre (10-point, bisection) for vector integrands.
/// Stops when the whole-vs-halves difference drops below max(tol, tol * |I|) per panel.
Vec adaptive_integrate(const VectorFn& f, double a, double b, double tol = 1e-12, int max_depth = 40);

double adaptive_integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-12,
                          int max_depth = 40);

}  // namespace rankdeg
