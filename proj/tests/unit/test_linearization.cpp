#include <cmath>
#include <numbers>

#include "doctest.h"
#include "rankdeg/examples.hpp"
#include "rankdeg/linearization.hpp"

using namespace rankdeg;

namespace {

constexpr double kHalfPi = std::numbers::pi / 2;

Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

TrajectorySample exact_traj(const Problem& p) {
  return std::visit(
      [](const auto& q) -> TrajectorySample {
        if constexpr (requires { q.critical_conditions; }) {
          return TrajectorySample::from_function(*q.exact, q.domain(), 2001);
        } else {
          return {};
        }
      },
      p);
}

}  // namespace

TEST_CASE("linearized DAE pair") {
  const auto ex32 = std::get<SemiNonlinearDAE>(example("ex32"));
  const TrajectorySample tr = exact_traj(ex32);
  const LinearizedDae lin = linearize_dae(ex32, tr);
  const double t = 0.7;
  Mat expect(2, 2);
  expect << -2 * std::cos(t), -std::exp(t), -t, -std::cos(t);
  CHECK((lin.B(t) - expect).norm() < 1e-5);  // linear interpolation of the trajectory
  CHECK((lin.A(t) - ex32.A(t)).norm() == 0.0);
}

TEST_CASE("linearized IAE kernel at the critical point") {
  const auto ex35 = std::get<SemiNonlinearIAE>(example("ex35"));
  const LinearIAE lin = linearize_iae(ex35, exact_traj(ex35));
  const Mat k = lin.k(1.8, kHalfPi);
  CHECK(std::abs(k(1, 0)) < 1e-6);  // 2 eta1 with eta1 = cos(pi/2)
  CHECK(lin.f(1.5).norm() == 0.0);
}

TEST_CASE("pointwise index along exact solutions") {
  const auto ex32 = std::get<SemiNonlinearDAE>(example("ex32"));
  const TrajectorySample t32 = exact_traj(ex32);
  CHECK(pointwise_index(ex32, t32, 0.7).nu == 1);
  CHECK(pointwise_index(ex32, t32, kHalfPi).nu == 2);

  const auto ex34 = std::get<SemiNonlinearIAE>(example("ex34"));
  const TrajectorySample t34 = exact_traj(ex34);
  for (double t = 1.0; t <= 2.0 + 1e-12; t += 0.125) {
    CAPTURE(t);
    CHECK(pointwise_index(ex34, t34, t).nu == 2);
  }
  CHECK_THROWS_AS(pointwise_index(ex32, t32, 2.5), DomainError);
}

TEST_CASE("index at frozen states") {
  const auto ex32 = std::get<SemiNonlinearDAE>(example("ex32"));
  CHECK(index_at_state(ex32, 0.7, vec2(0.3, 0.7)).nu == 1);
  CHECK(index_at_state(ex32, 0.7, vec2(0.0, 0.7)).nu == 2);
  const auto ex34 = std::get<SemiNonlinearIAE>(example("ex34"));
  CHECK(index_at_state(ex34, 1.2, vec2(1.5, 0.2)).nu == 2);
  // At eta1 = 0 the chain does not terminate.
  const PointwiseIndex z = index_at_state(ex34, 1.2, vec2(0.0, 0.2));
  CHECK_FALSE(z.nu.has_value());
  CHECK(z.status == ChainStatus::exceeded_max_level);
}

TEST_CASE("classification of the worked examples") {
  SUBCASE("ex31: well structure, index 2") {
    const auto ex31 = std::get<SemiNonlinearDAE>(example("ex31"));
    const IndexProfile p = classify(ex31, TrajectorySample::constant(ex31.y0, ex31.domain()), {0.0, 1.0});
    CHECK(p.classification == Structure::well);
    CHECK(p.index == 2);
    CHECK(p.critical_points.empty());
  }
  SUBCASE("ex32 on [1,2]: dependent, critical point at pi/2") {
    const auto ex32 = std::get<SemiNonlinearDAE>(example("ex32"));
    const IndexProfile p = classify(ex32, exact_traj(ex32), {1.0, 2.0});
    CHECK(p.classification == Structure::free_dependent);
    REQUIRE(p.critical_points.size() == 1);
    CHECK(std::abs(p.critical_points[0] - kHalfPi) <= 1e-3);
    CHECK_FALSE(p.index.has_value());
  }
  SUBCASE("ex32 on [0.5,1]: independent") {
    const auto ex32 = std::get<SemiNonlinearDAE>(example("ex32"));
    const IndexProfile p = classify(ex32, exact_traj(ex32), {0.5, 1.0});
    CHECK(p.classification == Structure::free_independent);
    CHECK(p.critical_points.empty());
    CHECK(p.index == 1);
  }
  SUBCASE("ex33: independent on both intervals") {
    const auto ex33 = std::get<SemiNonlinearDAE>(example("ex33"));
    for (Interval span : {Interval{0.5, 1.0}, Interval{1.0, 2.0}}) {
      const IndexProfile p = classify(ex33, exact_traj(ex33), span);
      CHECK(p.classification == Structure::free_independent);
      CHECK(p.critical_points.empty());
      CHECK(p.index == 1);
    }
  }
  SUBCASE("ex34: independent form of index 2") {
    const auto ex34 = std::get<SemiNonlinearIAE>(example("ex34"));
    const IndexProfile p = classify(ex34, exact_traj(ex34), {1.0, 2.0});
    CHECK(p.classification == Structure::free_independent);
    CHECK(p.index == 2);
  }
  SUBCASE("ex35: dependent") {
    const auto ex35 = std::get<SemiNonlinearIAE>(example("ex35"));
    const IndexProfile p = classify(ex35, exact_traj(ex35), {1.0, 2.0});
    CHECK(p.classification == Structure::free_dependent);
    REQUIRE_FALSE(p.critical_points.empty());
    CHECK(std::abs(p.critical_points[0] - kHalfPi) <= 1e-3);
  }
}

TEST_CASE("critical-point invariant: the index along the trajectory changes across t*") {
  const auto ex32 = std::get<SemiNonlinearDAE>(example("ex32"));
  const TrajectorySample tr = exact_traj(ex32);
  const IndexProfile p = classify(ex32, tr, {1.0, 2.0});
  REQUIRE(p.critical_points.size() == 1);
  const double ts = p.critical_points[0];
  const double d = 0.05;
  const IndexReport left = interval_index(ex32, tr, {ts - d, ts - 2e-3});
  const IndexReport across = interval_index(ex32, tr, {ts - d, ts + d});
  REQUIRE(left.nu.has_value());
  CHECK(across.nu != left.nu);
}

TEST_CASE("classify is deterministic for a fixed seed") {
  const auto ex32 = std::get<SemiNonlinearDAE>(example("ex32"));
  const TrajectorySample tr = exact_traj(ex32);
  ClassifyOptions opt;
  opt.seed = 42;
  const IndexProfile a = classify(ex32, tr, {0.5, 1.0}, opt);
  const IndexProfile b = classify(ex32, tr, {0.5, 1.0}, opt);
  REQUIRE(a.structure_evidence.size() == b.structure_evidence.size());
  for (size_t i = 0; i < a.structure_evidence.size(); ++i) {
    CHECK(a.structure_evidence[i].eta == b.structure_evidence[i].eta);
  }
  CHECK(a.nu_at == b.nu_at);
  CHECK(a.seed == 42);
}

TEST_CASE("classify rejects bad input and undefined profiles") {
  const auto ex32 = std::get<SemiNonlinearDAE>(example("ex32"));
  const TrajectorySample tr = exact_traj(ex32);
  ClassifyOptions bad;
  bad.eps = 0.0;
  CHECK_THROWS_AS(classify(ex32, tr, {0.5, 1.0}, bad), InvalidInput);
  CHECK_THROWS_AS(classify(ex32, tr, {1.0, 0.5}), InvalidInput);
  CHECK_THROWS_AS(classify(ex32, TrajectorySample::constant(ex32.y0, {0.0, 0.5}), {0.0, 1.0}), DomainError);

  // A = 0 with a vanishing kernel: the chain never terminates anywhere.
  SemiNonlinearIAE null;
  null.r = 1;
  null.t_start = 0.0;
  null.T = 1.0;
  null.A = MatrixFunction::constant(Mat::Zero(1, 1), null.domain());
  null.kappa = [](double, double, const Vec&) { return Vec::Zero(1); };
  null.f = [](double) { return Vec::Zero(1); };
  CHECK_THROWS_AS(classify(null, TrajectorySample::constant(Vec::Zero(1), {0.0, 1.0}), {0.0, 1.0}),
                  ClassificationError);
}

TEST_CASE("critical points from trajectory data") {
  const auto ex32 = std::get<SemiNonlinearDAE>(example("ex32"));
  const TrajectorySample tr = TrajectorySample::from_function(*ex32.exact, {1.0, 2.0}, 101);
  const auto hits = detect_critical_points(tr, ex32.critical_conditions);
  REQUIRE(hits.size() == 1);
  CHECK(std::abs(hits[0].t - kHalfPi) < 1e-4);  // linear interpolation between samples
  CHECK(hits[0].condition_id == "y1=0");

  const auto ex33 = std::get<SemiNonlinearDAE>(example("ex33"));
  CHECK(detect_critical_points(TrajectorySample::from_function(*ex33.exact, {0.0, 2.0}, 101),
                               ex33.critical_conditions)
            .empty());
  CHECK_THROWS_AS(detect_critical_points(tr, {}), InvalidInput);
}
