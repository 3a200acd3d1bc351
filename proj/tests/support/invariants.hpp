#pragma once

#include <string>
#include <vector>

#include "gridtwin/smfae.hpp"

namespace gridtwin::testing {

/// Every constraint the optimiser promises, re-checked from the returned
/// schedule alone: PF envelope, active-power bounds, AC balance residuals,
/// voltage band and branch currents at the schedule's own voltage state.
/// Returns one line per breach; empty when all hold.
std::vector<std::string> schedule_invariant_breaches(const SetpointSchedule& schedule,
                                                     const RedispatchProblem& problem, double tol = 1e-6);

}  // namespace gridtwin::testing
