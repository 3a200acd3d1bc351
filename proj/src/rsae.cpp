#include "gridtwin/rsae.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "gridtwin/error.hpp"

namespace gridtwin {

void SecurityLimits::validate() const {
    if (!(v_min_pu > 0.0 && v_min_pu < v_max_pu)) {
        throw ConfigError(fmt::format("voltage limits must satisfy 0 < v_min < v_max (got {}, {})", v_min_pu,
                                      v_max_pu));
    }
    if (!(loading_max_percent > 0.0 && loading_max_percent <= 100.0)) {
        throw ConfigError(fmt::format("loading_max_percent must lie in (0, 100], got {}", loading_max_percent));
    }
}

std::string_view to_string(ViolationKind kind) {
    switch (kind) {
        case ViolationKind::overvoltage: return "overvoltage";
        case ViolationKind::undervoltage: return "undervoltage";
        case ViolationKind::thermal: return "thermal";
    }
    return "?";
}

std::string ElementRef::to_string() const {
    switch (type) {
        case ElementType::bus: return fmt::format("bus:{}", id);
        case ElementType::line: return fmt::format("line:{}", id);
        case ElementType::transformer: return fmt::format("trafo:{}", id);
    }
    return "?";
}

ViolationReport assess(const PowerFlowSolution& solution, const SecurityLimits& limits,
                       std::optional<BranchRef> contingency) {
    ViolationReport report;
    report.timestamp = solution.timestamp;
    report.contingency = contingency;

    for (const auto& b : solution.buses) {
        const ElementRef ref{ElementType::bus, b.id};
        if (b.vm_pu > limits.v_max_pu) {
            report.violations.push_back({ViolationKind::overvoltage, ref, b.vm_pu, limits.v_max_pu});
        } else if (b.vm_pu < limits.v_min_pu) {
            report.violations.push_back({ViolationKind::undervoltage, ref, b.vm_pu, limits.v_min_pu});
        }
    }
    for (const auto& br : solution.branches) {
        if (br.loading_percent > limits.loading_max_percent) {
            const ElementRef ref{br.ref.kind == BranchKind::line ? ElementType::line : ElementType::transformer,
                                 br.ref.id};
            report.violations.push_back({ViolationKind::thermal, ref, br.loading_percent, limits.loading_max_percent});
        }
    }
    std::sort(report.violations.begin(), report.violations.end(), [](const Violation& a, const Violation& b) {
        return std::tie(a.kind, a.element) < std::tie(b.kind, b.element);
    });
    return report;
}

nlohmann::json to_json(const Violation& v) {
    return {{"kind", to_string(v.kind)}, {"element", v.element.to_string()}, {"value", v.value}, {"limit", v.limit}};
}

nlohmann::json to_json(const ViolationReport& report) {
    nlohmann::json doc;
    doc["timestamp"] = format_timestamp(report.timestamp);
    if (report.contingency) {
        doc["context"] = {{"contingency", report.contingency->to_string()}};
    } else {
        doc["context"] = "normal";
    }
    doc["violations"] = nlohmann::json::array();
    for (const auto& v : report.violations) doc["violations"].push_back(to_json(v));
    return doc;
}

std::string summarize(const ViolationReport& report) {
    std::string out = fmt::format("{} {}: {} violation(s)", format_timestamp(report.timestamp),
                                  report.contingency ? report.contingency->to_string() : std::string("normal"),
                                  report.violations.size());
    if (!report.violations.empty()) {
        out += " [";
        for (std::size_t i = 0; i < report.violations.size(); ++i) {
            const auto& v = report.violations[i];
            if (i > 0) out += ", ";
            out += fmt::format("{} {} {:.4f}{}{}", to_string(v.kind), v.element.to_string(), v.value,
                               v.kind == ViolationKind::undervoltage ? "<" : ">", v.limit);
        }
        out += "]";
    }
    return out;
}

}  // namespace gridtwin
