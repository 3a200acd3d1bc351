#include "gridtwin/cae.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "gridtwin/error.hpp"
#include "gridtwin/parallel.hpp"

namespace gridtwin {

std::string_view to_string(CaseOutcome outcome) {
    switch (outcome) {
        case CaseOutcome::secure: return "secure";
        case CaseOutcome::violations: return "violations";
        case CaseOutcome::diverged: return "diverged";
        case CaseOutcome::degenerate_topology: return "degenerate-topology";
    }
    return "?";
}

std::vector<BranchRef> enumerate_contingencies(const Network& net) {
    std::vector<BranchRef> lines;
    std::vector<BranchRef> trafos;
    for (const auto& l : net.lines) {
        if (l.in_service) lines.push_back({BranchKind::line, l.id});
    }
    for (const auto& t : net.transformers) {
        if (t.in_service) trafos.push_back({BranchKind::transformer, t.id});
    }
    std::sort(lines.begin(), lines.end());
    std::sort(trafos.begin(), trafos.end());
    lines.insert(lines.end(), trafos.begin(), trafos.end());
    return lines;
}

ContingencyCase assess_contingency(const Network& net, const OperatingPoint& point, const BranchRef& element,
                                   const SecurityLimits& limits, const SolverOptions& options) {
    ContingencyCase c;
    c.element = element;
    c.report.timestamp = point.timestamp;
    c.report.contingency = element;

    OutageResult outage;
    try {
        outage = apply_outage(net, element);
    } catch (const TopologyError& e) {
        c.outcome = CaseOutcome::degenerate_topology;
        c.islanded_buses = e.islanded_buses();
        c.diagnostic = e.what();
        return c;
    }
    c.islanded_buses = outage.islanded_buses;

    // Islanded units are out of service in the pruned network, so their
    // entries in the point are ignored by the solver.
    PowerFlowSolution sol;
    try {
        sol = solve_power_flow(outage.network, point, options);
    } catch (const PowerFlowError& e) {
        c.outcome = CaseOutcome::diverged;
        c.diagnostic = e.what();
        return c;
    }

    c.min_voltage_pu = std::numeric_limits<double>::infinity();
    c.max_voltage_pu = -std::numeric_limits<double>::infinity();
    for (const auto& b : sol.buses) {
        c.min_voltage_pu = std::min(c.min_voltage_pu, b.vm_pu);
        c.max_voltage_pu = std::max(c.max_voltage_pu, b.vm_pu);
    }
    if (sol.buses.empty()) c.min_voltage_pu = c.max_voltage_pu = 0.0;
    c.worst_voltage_pu = 1.0 - c.min_voltage_pu > c.max_voltage_pu - 1.0 ? c.min_voltage_pu : c.max_voltage_pu;
    for (const auto& br : sol.branches) {
        c.worst_loading_percent = std::max(c.worst_loading_percent, br.loading_percent);
    }
    c.report = assess(sol, limits, element);
    c.outcome = c.report.secure() ? CaseOutcome::secure : CaseOutcome::violations;
    return c;
}

std::vector<ContingencyCase> run_contingency_sweep(const Network& net, const OperatingPoint& point,
                                                   const SecurityLimits& limits, const SolverOptions& options,
                                                   int jobs) {
    const auto elements = enumerate_contingencies(net);
    return parallel_map(elements.size(), jobs, [&](std::size_t i) {
        return assess_contingency(net, point, elements[i], limits, options);
    });
}

nlohmann::json to_json(const ContingencyCase& c) {
    nlohmann::json doc;
    doc["timestamp"] = format_timestamp(c.report.timestamp);
    doc["element"] = c.element.to_string();
    doc["outcome"] = to_string(c.outcome);
    doc["islanded_buses"] = c.islanded_buses;
    doc["worst_voltage_pu"] = c.worst_voltage_pu;
    doc["worst_loading_percent"] = c.worst_loading_percent;
    if (c.outcome == CaseOutcome::violations) doc["report"] = to_json(c.report);
    if (!c.diagnostic.empty()) doc["diagnostic"] = c.diagnostic;
    return doc;
}

void write_summary_row(std::ostream& out, Timestamp t, const ContingencyCase& c) {
    fmt::print(out, "{},{},{},{},{},{}\n", format_timestamp(t), c.element.to_string(), to_string(c.outcome),
               c.worst_voltage_pu, c.worst_loading_percent, c.islanded_buses.size());
}

}  // namespace gridtwin
