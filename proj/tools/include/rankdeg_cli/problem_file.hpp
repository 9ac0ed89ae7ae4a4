#pragma once

#include <string>
#include <string_view>

#include "json.hpp"

#include "rankdeg/problem.hpp"

namespace rankdeg::cli {

/// Problem definition file:
///   {
///     "kind": "linear-iae" | "linear-dae" | "semi-nonlinear-iae" | "semi-nonlinear-dae",
///     "r": 2, "t_start": 0, "T": 1,
///     "A": [["1", "0"], ["0", "0"]],          // entries: numbers or expressions in t
///     "k": [[...]]        (linear-iae, in t and s)
///     "B": [[...]]        (linear-dae, in t)
///     "F": [...], "F_y": [[...]]               (semi-nonlinear-dae, in t and y1..yr)
///     "kappa": [...], "kappa_y": [[...]]       (semi-nonlinear-iae, in t, s, y1..yr)
///     "f": [...]          (in t)
///     "y0": [...]         (DAEs)
///     "exact": [...]      (optional, in t)
///     "critical_conditions": [{"id": "y1=0", "expr": "y1"}]   (optional, in t, y1..yr)
///   }
/// Jacobians are optional; finite differences are used when absent.
Problem load_problem(const nlohmann::json& doc);
Problem load_problem_file(const std::string& path);

struct ResolvedProblem {
  std::string name;  // example name or file path
  Problem problem;
};

/// A registered example name, else a problem definition file. NotFound when neither exists.
ResolvedProblem resolve_problem(std::string_view name_or_path);

std::string kind_of(const Problem& p);

}  // namespace rankdeg::cli
