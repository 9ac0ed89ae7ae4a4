#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "rankdeg/problem.hpp"

namespace rankdeg {

struct ExampleInfo {
  std::string name;
  std::string kind;  // linear-iae | linear-dae | semi-nonlinear-iae | semi-nonlinear-dae
  std::string description;
};

/// Registered worked problems:
///   ex31..ex35     the five nonlinear examples (well structure, free structure forms)
///   pair-nu2       constant linear pair with rank-degree index 2
///   dae-nu0/1/2    constant linear DAEs used by the DAE-to-IAE reduction
///   volterra-exp   y + int_0^t y = 1, exact e^{-t}
/// Throws NotFound for unknown names.
Problem example(std::string_view name);

std::vector<ExampleInfo> list_examples();

/// The condition y1 = 0 shared by ex32 to ex35.
CriticalCondition first_component_vanishes();

}  // namespace rankdeg
