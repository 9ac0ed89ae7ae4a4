#include <cmath>
#include <numbers>

#include "doctest.h"
#include "rankdeg/examples.hpp"
#include "rankdeg/problem.hpp"

using namespace rankdeg;

TEST_CASE("registered exact solutions satisfy their equations") {
  struct Case {
    const char* name;
    Interval span;
    double tol;
  };
  for (const Case& c : {Case{"ex32", {0.0, 2.0}, 1e-8}, Case{"ex33", {0.0, 2.0}, 1e-8}, Case{"ex34", {0.0, 2.0}, 1e-6},
                        Case{"ex35", {1.0, 2.0}, 1e-6}, Case{"pair-nu2", {0.0, 1.0}, 1e-8},
                        Case{"dae-nu0", {0.0, 1.0}, 1e-8}, Case{"dae-nu1", {0.0, 1.0}, 1e-8},
                        Case{"dae-nu2", {0.0, 1.0}, 1e-8}, Case{"volterra-exp", {0.0, 1.0}, 1e-8}}) {
    CAPTURE(c.name);
    const ExactCheck chk = verify_exact(example(c.name), uniform_grid(c.span, 101), c.tol);
    CHECK(chk.passed);
    CHECK(chk.max_residual <= c.tol);
  }
}

TEST_CASE("verify_exact catches a transcription slip") {
  auto p = std::get<SemiNonlinearDAE>(example("ex32"));
  // The printed sign of cos^2 t.
  p.f = [](double t) {
    Vec v(2);
    v << std::cos(t) * std::cos(t) - std::exp(t) - std::sin(t), -t * std::cos(t);
    return v;
  };
  const ExactCheck chk = verify_exact(p, uniform_grid({0.0, 1.0}, 11), 1e-8);
  CHECK_FALSE(chk.passed);
  CHECK(chk.max_residual == doctest::Approx(2.0).epsilon(1e-6));  // 2 cos^2(0)
  CHECK(chk.worst_time == 0.0);
}

TEST_CASE("verify_exact requires an exact solution") {
  CHECK_THROWS_AS(verify_exact(example("ex31"), uniform_grid({0.0, 1.0}, 5), 1e-8), InvalidInput);
}

TEST_CASE("analytic Jacobians match finite differences") {
  for (const char* name : {"ex31", "ex32", "ex33"}) {
    CAPTURE(name);
    CHECK(jacobian_mismatch(std::get<SemiNonlinearDAE>(example(name)), 50, 7) < 1e-6);
  }
  for (const char* name : {"ex34", "ex35"}) {
    CAPTURE(name);
    CHECK(jacobian_mismatch(std::get<SemiNonlinearIAE>(example(name)), 50, 7) < 1e-6);
  }
}

TEST_CASE("example registry") {
  CHECK_THROWS_AS(example("ex99"), NotFound);
  CHECK(list_examples().size() == 10);
  for (const ExampleInfo& e : list_examples()) CHECK_NOTHROW(example(e.name));
  const auto ex35 = std::get<SemiNonlinearIAE>(example("ex35"));
  CHECK(ex35.t_start == 1.0);
  // f(1) = A y(1) when the integral starts at 1.
  CHECK(ex35.f(1.0)(0) == doctest::Approx(std::cos(1.0)).epsilon(1e-13));
  CHECK(ex35.f(1.0)(1) == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
  for (const char* name : {"ex32", "ex34", "ex35"}) {
    const Problem p = example(name);
    const auto& conds = std::holds_alternative<SemiNonlinearDAE>(p) ? std::get<SemiNonlinearDAE>(p).critical_conditions
                                                                    : std::get<SemiNonlinearIAE>(p).critical_conditions;
    REQUIRE(conds.size() == 1);
    CHECK(conds[0].id == "y1=0");
  }
}

TEST_CASE("initial defect") {
  const auto ex32 = std::get<SemiNonlinearDAE>(example("ex32"));
  CHECK(initial_defect(ex32, 0.0, ex32.y0) < 1e-14);
  Vec off = ex32.y0;
  off(1) += 0.5;
  CHECK(initial_defect(ex32, 0.0, off) > 0.1);
  const auto ex31 = std::get<SemiNonlinearDAE>(example("ex31"));
  CHECK(initial_defect(ex31, 0.0, ex31.y0) == doctest::Approx(1.0));
}

TEST_CASE("TrajectorySample") {
  const TrajectorySample tr = TrajectorySample::from_function(
      [](double t) { return Vec::Constant(1, 2 * t); }, {0.0, 1.0}, 11);
  CHECK(tr(0.35)(0) == doctest::Approx(0.7));
  CHECK(tr.span().hi == 1.0);
  CHECK_THROWS_AS(tr(1.1), DomainError);
  const TrajectorySample c = TrajectorySample::constant(Vec::Ones(3), {2.0, 3.0});
  CHECK(c.dimension() == 3);
  CHECK(c(2.5).sum() == 3.0);
  CHECK_THROWS(TrajectorySample::from_function([](double) { return Vec::Zero(1); }, {0.0, 1.0}, 1));
}

TEST_CASE("uniform grid") {
  const auto g = uniform_grid({1.0, 2.0}, 5);
  REQUIRE(g.size() == 5);
  CHECK(g.front() == 1.0);
  CHECK(g.back() == 2.0);
  CHECK(g[2] == doctest::Approx(1.5));
}
