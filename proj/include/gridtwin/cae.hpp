#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gridtwin/network.hpp"
#include "gridtwin/powerflow.hpp"
#include "gridtwin/rsae.hpp"

namespace gridtwin {

enum class CaseOutcome { secure, violations, diverged, degenerate_topology };

std::string_view to_string(CaseOutcome outcome);

struct ContingencyCase {
    BranchRef element;
    std::vector<ElementId> islanded_buses;
    CaseOutcome outcome = CaseOutcome::secure;
    ViolationReport report;    // empty unless outcome is violations
    double worst_voltage_pu = 0.0;   // bus magnitude farthest from 1.0 p.u., 0 if not solved
    double min_voltage_pu = 0.0;     // 0 if not solved
    double max_voltage_pu = 0.0;
    double worst_loading_percent = 0.0;
    std::string diagnostic;    // solver message for diverged / degenerate cases
};

/// Every in-service line (by id), then every in-service transformer (by id).
std::vector<BranchRef> enumerate_contingencies(const Network& network);

/// Outage -> islanding prune -> power flow -> assessment. Failures are encoded
/// in the outcome; nothing is thrown for a case that merely fails to solve.
ContingencyCase assess_contingency(const Network& network, const OperatingPoint& point, const BranchRef& element,
                                   const SecurityLimits& limits, const SolverOptions& options = {});

/// All N-1 cases in enumeration order; `jobs` > 1 evaluates them concurrently.
std::vector<ContingencyCase> run_contingency_sweep(const Network& network, const OperatingPoint& point,
                                                   const SecurityLimits& limits, const SolverOptions& options = {},
                                                   int jobs = 1);

nlohmann::json to_json(const ContingencyCase& c);

inline constexpr std::string_view kContingencySummaryHeader =
    "timestamp,element,outcome,worst_voltage_pu,worst_loading_percent,islanded_count";

void write_summary_row(std::ostream& out, Timestamp t, const ContingencyCase& c);

}  // namespace gridtwin
