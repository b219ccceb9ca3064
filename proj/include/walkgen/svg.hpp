#pragma once

#include <string>

#include "walkgen/pattern_gen.hpp"

namespace walkgen {

// Top view: foot rectangles, ZMP path, CoM path.
void write_pattern_svg(const std::string& path, const FootstepPlan& plan,
                       const ReferenceTrajectories& refs);

// Time series of ZMP x/y and CoM x/y/z.
void write_timeseries_svg(const std::string& path, const ReferenceTrajectories& refs);

}  // namespace walkgen
