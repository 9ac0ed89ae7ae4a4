#include "rankdeg/examples.hpp"

#include <cmath>
#include <numbers>

namespace rankdeg {

namespace {

Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

Mat mat2(double a, double b, double c, double d) {
  Mat m(2, 2);
  m << a, b, c, d;
  return m;
}

// diag(1, 0): the leading matrix of every two-component example.
Mat first_row_selector() { return mat2(1, 0, 0, 0); }

// Shared by ex32 and ex33: F(t, y) = (-y1^2 - e^{y2}, -y1 y2).
Vec ex32_F(double, const Vec& y) { return vec2(-y(0) * y(0) - std::exp(y(1)), -y(0) * y(1)); }
Mat ex32_Fy(double, const Vec& y) { return mat2(-2 * y(0), -std::exp(y(1)), -y(1), -y(0)); }

// Shared by ex34 and ex35: kappa(y) = ((y1^2 + 2) y2 + e^{y2}, y1^2).
Vec ex34_kappa(double, double, const Vec& y) {
  return vec2((y(0) * y(0) + 2) * y(1) + std::exp(y(1)), y(0) * y(0));
}
Mat ex34_kappa_y(double, double, const Vec& y) {
  return mat2(2 * y(0) * y(1), (y(0) * y(0) + 2) + std::exp(y(1)), 2 * y(0), 0);
}

SemiNonlinearDAE ex31() {
  // y' = y^2 + e^y + z, 0 = e^y + sin t  written as A y' + F(t, (y, z)) = f.
  SemiNonlinearDAE p;
  p.r = 2;
  p.t_start = 0.0;
  p.T = 1.0;
  p.A = MatrixFunction::constant(first_row_selector(), p.domain());
  p.F = [](double, const Vec& y) { return vec2(-(y(0) * y(0) + std::exp(y(0)) + y(1)), std::exp(y(0))); };
  p.F_y = [](double, const Vec& y) { return mat2(-(2 * y(0) + std::exp(y(0))), -1.0, std::exp(y(0)), 0.0); };
  p.f = [](double t) { return vec2(0.0, -std::sin(t)); };
  // No real solution exists while sin t > 0; y0 is the reference state used for structural analysis.
  p.y0 = vec2(0.0, 0.0);
  return p;
}

SemiNonlinearDAE ex32() {
  SemiNonlinearDAE p;
  p.r = 2;
  p.t_start = 0.0;
  p.T = 2.0;
  p.A = MatrixFunction::constant(first_row_selector(), p.domain());
  p.F = ex32_F;
  p.F_y = ex32_Fy;
  // The first component carries -cos^2 t: with +cos^2 t the exact solution does not
  // satisfy A y' + F = f, while -cos^2 t agrees with F, F_y and ex33.
  p.f = [](double t) {
    const double c = std::cos(t);
    return vec2(-c * c - std::exp(t) - std::sin(t), -t * c);
  };
  p.exact = [](double t) { return vec2(std::cos(t), t); };
  p.y0 = (*p.exact)(p.t_start);
  p.critical_conditions = {first_component_vanishes()};
  return p;
}

SemiNonlinearDAE ex33() {
  SemiNonlinearDAE p;
  p.r = 2;
  p.t_start = 0.0;
  p.T = 2.0;
  p.A = MatrixFunction::constant(first_row_selector(), p.domain());
  p.F = ex32_F;
  p.F_y = ex32_Fy;
  p.f = [](double t) { return vec2(-std::exp(2 * t), -t * std::exp(t)); };
  p.exact = [](double t) { return vec2(std::exp(t), t); };
  p.y0 = (*p.exact)(p.t_start);
  p.critical_conditions = {first_component_vanishes()};
  return p;
}

SemiNonlinearIAE ex34() {
  SemiNonlinearIAE p;
  p.r = 2;
  p.t_start = 0.0;
  p.T = 2.0;
  p.A = MatrixFunction::constant(first_row_selector(), p.domain());
  p.kappa = ex34_kappa;
  p.kappa_y = ex34_kappa_y;
  // f = A y + int_0^t kappa(y(s)) ds for y = (e^t, t), integrated in closed form.
  p.f = [](double t) {
    const double e1 = std::exp(t);
    const double e2 = std::exp(2 * t);
    const double first = e1 + e2 * (t / 2 - 0.25) + 0.25 + t * t + (e1 - 1.0);
    return vec2(first, (e2 - 1.0) / 2.0);
  };
  p.exact = [](double t) { return vec2(std::exp(t), t); };
  p.critical_conditions = {first_component_vanishes()};
  return p;
}

SemiNonlinearIAE ex35() {
  SemiNonlinearIAE p;
  p.r = 2;
  // This right-hand side integrates from t = 1.
  p.t_start = 1.0;
  p.T = 2.0;
  p.A = MatrixFunction::constant(first_row_selector(), p.domain());
  p.kappa = ex34_kappa;
  p.kappa_y = ex34_kappa_y;
  p.f = [](double t) {
    const double e = std::numbers::e;
    const double s1 = std::sin(1.0);
    const double st = std::sin(t);
    const double first = std::cos(t) - std::sin(2.0) / 4 - e + std::exp(t) + t * std::sin(2 * t) / 4 - st * st / 4 +
                         s1 * s1 / 4 + 5 * t * t / 4 - 5.0 / 4;
    const double second = t / 2 + std::sin(2 * t) / 4 - std::sin(2.0) / 4 - 0.5;
    return vec2(first, second);
  };
  p.exact = [](double t) { return vec2(std::cos(t), t); };
  p.critical_conditions = {first_component_vanishes()};
  return p;
}

LinearIAE pair_nu2() {
  LinearIAE p;
  p.r = 2;
  p.t_start = 0.0;
  p.T = 1.0;
  p.A = MatrixFunction::constant(first_row_selector(), p.domain());
  const Mat k = mat2(0, 1, 1, 0);
  p.k = [k](double, double) { return k; };
  // Exact solution (sin t, cos t).
  p.f = [](double t) { return vec2(2 * std::sin(t), 1 - std::cos(t)); };
  p.exact = [](double t) { return vec2(std::sin(t), std::cos(t)); };
  return p;
}

LinearDAE constant_dae(const Mat& a, const Mat& b, VectorFn q, VectorFn exact) {
  LinearDAE p;
  p.r = 2;
  p.t_start = 0.0;
  p.T = 1.0;
  p.A = MatrixFunction::constant(a, p.domain());
  p.B = MatrixFunction::constant(b, p.domain());
  p.f = std::move(q);
  p.exact = std::move(exact);
  p.y0 = (*p.exact)(0.0);
  return p;
}

LinearIAE volterra_exp() {
  LinearIAE p;
  p.r = 1;
  p.t_start = 0.0;
  p.T = 1.0;
  p.A = MatrixFunction::constant(Mat::Identity(1, 1), p.domain());
  p.k = [](double, double) { return Mat::Identity(1, 1); };
  p.f = [](double) { return Vec::Ones(1); };
  p.exact = [](double t) { return Vec::Constant(1, std::exp(-t)); };
  return p;
}

}  // namespace

CriticalCondition first_component_vanishes() {
  return {"y1=0", [](double, const Vec& y) { return y(0); }};
}

Problem example(std::string_view name) {
  if (name == "ex31") return ex31();
  if (name == "ex32") return ex32();
  if (name == "ex33") return ex33();
  if (name == "ex34") return ex34();
  if (name == "ex35") return ex35();
  if (name == "pair-nu2") return pair_nu2();
  if (name == "dae-nu0") {
    return constant_dae(
        Mat::Identity(2, 2), Mat::Zero(2, 2), [](double t) { return vec2(std::cos(t), std::exp(t)); },
        [](double t) { return vec2(std::sin(t), std::exp(t)); });
  }
  if (name == "dae-nu1") {
    return constant_dae(
        first_row_selector(), mat2(0, 0, 0, 1), [](double t) { return vec2(std::cos(t), std::cos(t)); },
        [](double t) { return vec2(std::sin(t), std::cos(t)); });
  }
  if (name == "dae-nu2") {
    return constant_dae(
        first_row_selector(), mat2(0, 1, 1, 0), [](double t) { return vec2(2 * std::cos(t), std::sin(t)); },
        [](double t) { return vec2(std::sin(t), std::cos(t)); });
  }
  if (name == "volterra-exp") return volterra_exp();
  throw NotFound("unknown problem '" + std::string(name) + "'");
}

std::vector<ExampleInfo> list_examples() {
  return {
      {"ex31", "semi-nonlinear-dae", "y' = y^2 + e^y + z, 0 = e^y + sin t; well structure, index 2"},
      {"ex32", "semi-nonlinear-dae", "free structure DAE, exact (cos t, t); index 1, 2 where y1 = 0"},
      {"ex33", "semi-nonlinear-dae", "same A, F as ex32 with exact (e^t, t); independent form, index 1"},
      {"ex34", "semi-nonlinear-iae", "free structure IAE, exact (e^t, t); independent form, index 2"},
      {"ex35", "semi-nonlinear-iae", "kernel of ex34 with exact (cos t, t) from t = 1; dependent form"},
      {"pair-nu2", "linear-iae", "A = diag(1,0), k = [[0,1],[1,0]]; rank-degree index 2"},
      {"dae-nu0", "linear-dae", "A = E, B = 0; index 0"},
      {"dae-nu1", "linear-dae", "A = diag(1,0), B = diag(0,1); index 1"},
      {"dae-nu2", "linear-dae", "A = diag(1,0), B = [[0,1],[1,0]]; index 2"},
      {"volterra-exp", "linear-iae", "y + int_0^t y = 1, exact e^{-t}"},
  };
}

}  // namespace rankdeg
