#include <cmath>

#include "doctest.h"
#include "rankdeg/quadrature.hpp"

using namespace rankdeg;

TEST_CASE("Gauss-Legendre on [0,1] integrates degree 2n-1 exactly") {
  for (int n = 1; n <= 12; ++n) {
    const GaussRule g = gauss_legendre(n);
    REQUIRE(g.nodes.size() == static_cast<size_t>(n));
    double wsum = 0.0;
    for (double w : g.weights) wsum += w;
    CHECK(wsum == doctest::Approx(1.0).epsilon(1e-14));
    for (int p = 0; p <= 2 * n - 1; ++p) {
      double q = 0.0;
      for (int i = 0; i < n; ++i) q += g.weights[i] * std::pow(g.nodes[i], p);
      CAPTURE(n);
      CAPTURE(p);
      CHECK(q == doctest::Approx(1.0 / (p + 1)).epsilon(1e-13));
    }
  }
  CHECK_THROWS_AS(gauss_legendre(0), InvalidInput);
}

TEST_CASE("adaptive integration") {
  CHECK(adaptive_integrate([](double t) { return std::exp(t); }, 0.0, 2.0) ==
        doctest::Approx(std::exp(2.0) - 1.0).epsilon(1e-13));
  CHECK(adaptive_integrate([](double t) { return std::sqrt(t); }, 0.0, 1.0, 1e-12) ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-10));
  CHECK(adaptive_integrate([](double) { return 1.0; }, 1.0, 1.0) == 0.0);
  const Vec v = adaptive_integrate(
      [](double t) {
        Vec out(2);
        out << std::cos(t), t;
        return out;
      },
      0.0, 1.0);
  CHECK(v(0) == doctest::Approx(std::sin(1.0)).epsilon(1e-13));
  CHECK(v(1) == doctest::Approx(0.5).epsilon(1e-13));
}
