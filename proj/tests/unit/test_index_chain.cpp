#include <cmath>
#include <random>

#include "doctest.h"
#include "rankdeg/examples.hpp"
#include "rankdeg/index_chain.hpp"
#include "rankdeg/quadrature.hpp"
#include "rational_chain.hpp"

using namespace rankdeg;

namespace {

Mat to_mat(const oracle::QMat& q) {
  Mat m(q.size(), q[0].size());
  for (size_t i = 0; i < q.size(); ++i)
    for (size_t j = 0; j < q[0].size(); ++j) m(i, j) = q[i][j].value();
  return m;
}

Mat mat2(double a, double b, double c, double d) {
  Mat m(2, 2);
  m << a, b, c, d;
  return m;
}

IndexReport constant_chain(const Mat& a, const Mat& k, const ChainOptions& opt = {}) {
  const Interval dom{0.0, 1.0};
  return rank_degree_index(MatrixFunction::constant(a, dom), [k](double, double) { return k; },
                           uniform_grid(dom, kDefaultGridPoints), opt);
}

}  // namespace

TEST_CASE("rational oracle reproduces the hand-computed chain") {
  using oracle::Q;
  const oracle::QMat a{{1, 0}, {0, 0}};
  const oracle::QMat k{{0, 1}, {1, 0}};
  const oracle::ChainResult r = oracle::chain(a, k);
  REQUIRE(r.nu.has_value());
  CHECK(*r.nu == 2);
  CHECK(r.levels[1] == oracle::QMat{{1, 0}, {1, 0}});
  CHECK(r.levels[2] == oracle::QMat{{Q(1, 2), Q(1, 2)}, {Q(3, 2), Q(-1, 2)}});
}

TEST_CASE("constant pair: nu = 2 and A_2 against the exact oracle") {
  const Mat a = mat2(1, 0, 0, 0);
  const Mat k = mat2(0, 1, 1, 0);
  const IndexReport rep = constant_chain(a, k);
  REQUIRE(rep.status == ChainStatus::ok);
  REQUIRE(rep.nu == 2);
  const oracle::ChainResult exact = oracle::chain({{1, 0}, {0, 0}}, {{0, 1}, {1, 0}});
  for (int i = 0; i <= 2; ++i) {
    CAPTURE(i);
    CHECK((rep.levels[i].pair.A(0.3) - to_mat(exact.levels[i])).norm() <= 1e-10);
  }
  CHECK(rep.levels[0].rank == 1);
  CHECK(rep.levels[1].rank == 1);
  CHECK(rep.levels[2].rank == 2);
}

TEST_CASE("random constant pairs agree with the exact oracle") {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> coeff(-3, 3);
  int compared = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int r = 2 + trial % 2;
    oracle::QMat qa = oracle::zeros(r, r);
    oracle::QMat qk = oracle::zeros(r, r);
    // Rank-deficient leading matrix: last row is a combination of the others.
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j) qk[i][j] = coeff(rng);
    for (int i = 0; i + 1 < r; ++i)
      for (int j = 0; j < r; ++j) qa[i][j] = coeff(rng);
    for (int j = 0; j < r; ++j) qa[r - 1][j] = qa[0][j] * oracle::Q(coeff(rng));
    const oracle::ChainResult ex = oracle::chain(qa, qk, 3);
    const IndexReport num = constant_chain(to_mat(qa), to_mat(qk), ChainOptions{1e-10, 0.0, 3, {}});
    if (num.status == ChainStatus::non_constant_rank) continue;  // ill-conditioned levels
    CAPTURE(trial);
    CHECK(num.nu == ex.nu);
    if (ex.nu && num.nu) {
      CHECK((num.levels[*ex.nu].pair.A(0.0) - to_mat(ex.levels[*ex.nu])).norm() <= 1e-8);
      ++compared;
    }
  }
  CHECK(compared > 50);
}

TEST_CASE("index does not depend on the choice of semi-inverse") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0.0, 1.0);
  Mat w(2, 2);
  Mat z(2, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      w(i, j) = n(rng);
      z(i, j) = n(rng);
    }
  ChainOptions opt;
  // A^+ + (E - A^+ A) W + Z (E - A A^+) is again a semi-inverse.
  opt.semi_inverse = [w, z](const Mat& a, double tol) {
    const Mat p = semi_inverse(a, tol).a_minus;
    const Mat e = Mat::Identity(a.rows(), a.cols());
    return Mat(p + (e - p * a) * w + z * (e - a * p));
  };
  const IndexReport alt = constant_chain(mat2(1, 0, 0, 0), mat2(0, 1, 1, 0), opt);
  CHECK(alt.nu == 2);
  for (const char* name : {"dae-nu1", "dae-nu2"}) {
    const LinearIAE p = dae_to_iae(std::get<LinearDAE>(example(name)));
    const auto grid = uniform_grid(p.domain(), 17);
    CHECK(rank_degree_index(p, grid, opt).nu == rank_degree_index(p, grid).nu);
  }
}

TEST_CASE("DAE to IAE reduction against the exact oracle") {
  struct Case {
    const char* name;
    oracle::QMat a;
    oracle::QMat b;
    int nu;
  };
  for (const Case& c : {Case{"dae-nu0", {{1, 0}, {0, 1}}, {{0, 0}, {0, 0}}, 0},
                        Case{"dae-nu1", {{1, 0}, {0, 0}}, {{0, 0}, {0, 1}}, 1},
                        Case{"dae-nu2", {{1, 0}, {0, 0}}, {{0, 1}, {1, 0}}, 2}}) {
    CAPTURE(c.name);
    const LinearIAE iae = dae_to_iae(std::get<LinearDAE>(example(c.name)));
    const IndexReport rep = rank_degree_index(iae, uniform_grid(iae.domain(), kDefaultGridPoints));
    const oracle::ChainResult ex = oracle::chain(c.a, c.b);
    REQUIRE(ex.nu == c.nu);
    CHECK(rep.nu == c.nu);
    CHECK((rep.levels.back().pair.A(0.5) - to_mat(ex.levels.back())).norm() <= 1e-10);
  }
}

TEST_CASE("integrated DAE keeps the solution") {
  const LinearDAE d = std::get<LinearDAE>(example("dae-nu2"));
  const LinearIAE iae = dae_to_iae(d);
  const ExactCheck chk = verify_exact(iae, uniform_grid(iae.domain(), 21), 1e-8);
  CHECK(chk.passed);
}

TEST_CASE("rank change and non-termination are reported") {
  const Interval dom{0.0, 1.0};
  SUBCASE("level 0 rank change") {
    MatrixFunction a([](double t) { return mat2(1, 0, 0, t - 0.5); }, dom);
    const IndexReport rep = rank_degree_index(a, [](double, double) { return Mat::Zero(2, 2); },
                                              uniform_grid(dom, kDefaultGridPoints));
    CHECK(rep.status == ChainStatus::non_constant_rank);
    CHECK_FALSE(rep.nu.has_value());
    CHECK(rep.failed_level == 0);
    CHECK_FALSE(rep.diagnosis.empty());
  }
  SUBCASE("determinant sign change between grid points") {
    // Nonsingular at every grid point of 4, singular at t = 0.4.
    MatrixFunction a([](double t) { return mat2(1, 0, 0, t - 0.4); }, dom);
    const IndexReport rep =
        rank_degree_index(a, [](double, double) { return Mat::Zero(2, 2); }, uniform_grid(dom, 4));
    CHECK(rep.status == ChainStatus::non_constant_rank);
  }
  SUBCASE("never nonsingular") {
    const IndexReport rep = constant_chain(mat2(1, 0, 0, 0), Mat::Zero(2, 2));
    CHECK(rep.status == ChainStatus::exceeded_max_level);
    CHECK_FALSE(rep.nu.has_value());
  }
  SUBCASE("bad input") {
    CHECK_THROWS_AS(rank_degree_index(MatrixFunction::constant(Mat::Identity(2, 2), dom),
                                      [](double, double) { return Mat::Zero(2, 2); }, {}),
                    InvalidInput);
  }
}

TEST_CASE("nonsingular leading matrix has index 0") {
  const IndexReport rep = rank_degree_index(std::get<LinearIAE>(example("volterra-exp")), uniform_grid({0, 1}, 9));
  CHECK(rep.nu == 0);
  CHECK(rep.levels.size() == 1);
}

TEST_CASE("time-dependent chain uses the kernel derivative") {
  // A = diag(1, 0), k(t, s) = [[0, 1], [t, 0]]: V k(t, t) = [[0,0],[t,0]],
  // A_1 = [[1,0],[t,0]] is singular; the t-derivative of V k enters k_1.
  const Interval dom{0.5, 1.5};
  const KernelFn k = [](double t, double) { return mat2(0, 1, t, 0); };
  const ChainStep s0 = chain_step({MatrixFunction::constant(mat2(1, 0, 0, 0), dom), k});
  CHECK((s0.next.A(1.0) - mat2(1, 0, 1, 0)).norm() < 1e-12);
  CHECK((s0.next.k(1.0, 0.7) - mat2(0, 1, 2, 0)).norm() < 1e-8);
  const IndexReport rep = rank_degree_index(MatrixFunction::constant(mat2(1, 0, 0, 0), dom), k, uniform_grid(dom, 9));
  CHECK(rep.nu == 2);
}

TEST_CASE("chain evaluation is deterministic") {
  const IndexReport a = constant_chain(mat2(1, 0, 0, 0), mat2(0, 1, 1, 0));
  const IndexReport b = constant_chain(mat2(1, 0, 0, 0), mat2(0, 1, 1, 0));
  for (size_t i = 0; i < a.levels.size(); ++i) CHECK(a.levels[i].pair.A(0.25) == b.levels[i].pair.A(0.25));
}

TEST_CASE("consistency conditions") {
  const Interval dom{0.0, 1.0};
  const auto grid = uniform_grid(dom, kDefaultGridPoints);

  SUBCASE("zero right-hand side passes trivially") {
    const IndexReport rep = constant_chain(mat2(1, 0, 0, 0), mat2(0, 1, 1, 0));
    const ConsistencyReport c = consistency_check(rep, rhs_chain([](double) { return Vec::Zero(2); }, rep), 1e-12);
    CHECK(c.passed);
    CHECK(c.conditions.size() == 2);
    CHECK_FALSE(c.ill_conditioned);
  }

  // Linearization of ex34 along its exact solution with f generated from y = (e^t, t).
  const auto ex34 = std::get<SemiNonlinearIAE>(example("ex34"));
  const VectorFn y = *ex34.exact;
  const KernelFn k = [&](double t, double s) { return (*ex34.kappa_y)(t, s, y(s)); };
  const MatrixFunction a = MatrixFunction::constant(mat2(1, 0, 0, 0), dom);
  const VectorFn f = [&](double t) {
    const Vec integral = adaptive_integrate([&](double s) { return Vec(k(t, s) * y(s)); }, 0.0, t, 1e-13);
    return Vec(a(t) * y(t) + integral);
  };
  const IndexReport rep = rank_degree_index(a, k, grid);
  REQUIRE(rep.nu == 2);

  SUBCASE("constructed consistent system passes") {
    const ConsistencyReport c = consistency_check(rep, rhs_chain(f, rep), 1e-6);
    CHECK(c.passed);
    CHECK(c.t0 == 0.0);
  }
  SUBCASE("perturbed f(0) fails") {
    const VectorFn g = [&](double t) {
      Vec v = f(t);
      v(1) += 1.0;
      return v;
    };
    const ConsistencyReport c = consistency_check(rep, rhs_chain(g, rep), 1e-6);
    CHECK_FALSE(c.passed);
  }
  SUBCASE("index 0 is rejected") {
    const IndexReport r0 = constant_chain(Mat::Identity(2, 2), Mat::Zero(2, 2));
    CHECK_THROWS_AS(consistency_check(r0, rhs_chain(f, r0), 1e-6), InvalidInput);
  }
}

TEST_CASE("Hessenberg index check") {
  const auto grid = uniform_grid({0.0, 1.0}, 11);
  const std::function<Mat(double)> one = [](double t) { return Mat::Constant(1, 1, 1.0 + t); };
  const std::function<Mat(double)> vanishing = [](double t) { return Mat::Constant(1, 1, t - 0.5); };
  CHECK(hessenberg_index(2, {one, one}, grid).confirmed);
  const HessenbergCheck bad = hessenberg_index(2, {one, vanishing}, grid);
  CHECK_FALSE(bad.confirmed);
  REQUIRE(bad.violated_at.has_value());
  CHECK(*bad.violated_at == doctest::Approx(0.5));
}
