#pragma once

#include <iosfwd>
#include <string>

#include "json.hpp"
#include "rankdeg/linearization.hpp"
#include "rankdeg_cli/problem_file.hpp"
#include "rankdeg_cli/reproduce.hpp"

namespace rankdeg::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitUnknownProblem = 2;

/// Entry point of the rankdeg tool. Exit codes: 0 success (solver failures are reported in
/// the diagnostics), 1 invalid configuration, 2 unknown problem or reproduce target.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Index report of a linear problem (DAEs go through the integrated form) with the
/// consistency check when the index is at least 1.
nlohmann::json analyze(const ResolvedProblem& p, std::optional<Interval> interval, int grid_points = kDefaultGridPoints);

/// IndexProfile of a nonlinear problem along its exact solution (or, without one, around
/// the constant state y0).
nlohmann::json classify_problem(const ResolvedProblem& p, std::optional<Interval> interval, const ClassifyOptions& opt);

nlohmann::json to_json(const IndexReport& r);
nlohmann::json to_json(const IndexProfile& p);

}  // namespace rankdeg::cli
