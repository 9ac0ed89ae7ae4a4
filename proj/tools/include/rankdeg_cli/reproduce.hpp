#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "rankdeg/collocation.hpp"
#include "rankdeg/dae_solver.hpp"

namespace rankdeg::cli {

/// Overrides shared by the solve and reproduce commands; unset fields keep the defaults of
/// the experiment.
struct RunOverrides {
  std::optional<Interval> interval;
  std::optional<double> h;
  std::optional<std::vector<double>> c;
  std::optional<int> order;
};

struct ReproduceResult {
  std::string target;
  std::string csv;
  nlohmann::json summary;
  bool passed = false;
};

/// fig1  ex32 on [0.5, 1], BDF1, h = 1e-3            criterion 5 (ex32 part)
/// fig2  ex32 on [1, 2],   BDF1, h = 1e-3, monitored  criterion 6
/// fig3  ex33 on [0, 2],   BDF1, h = 1e-3            criterion 5 (ex33 part)
/// fig4  ex34 on [1, 2],   collocation c = [0,.7,.9], h = 0.025   criterion 7
/// fig5  ex35 on [1, 2],   same configuration        criterion 8
/// Throws NotFound for other targets.
ReproduceResult reproduce(const std::string& target, const RunOverrides& ov = {});

std::vector<std::string> reproduce_targets();

/// Solution table: header t,u1..ur,exact1..exactr,error then one row per time, 17
/// significant digits. Exact columns and error are empty when no exact solution is known.
std::string solution_csv(const std::vector<double>& times, const std::vector<Vec>& values,
                         const std::optional<VectorFn>& exact);

/// Max |u - exact|_inf over rows with t in [a, b] (0 if none).
double max_error(const std::vector<double>& times, const std::vector<Vec>& values, const VectorFn& exact, double a,
                 double b);

/// Uniform sample times over the solved span of a collocation solution (n + 1 points).
std::vector<double> sample_times(const PiecewiseSolution& sol, int n);

nlohmann::json to_json(const DaeSolveResult& r);
nlohmann::json to_json(const IaeSolveResult& r);

}  // namespace rankdeg::cli
