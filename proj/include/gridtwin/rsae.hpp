#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gridtwin/network.hpp"
#include "gridtwin/powerflow.hpp"
#include "gridtwin/time.hpp"

namespace gridtwin {

struct SecurityLimits {
    double v_min_pu = 0.95;
    double v_max_pu = 1.05;
    double loading_max_percent = 90.0;

    /// Throws ConfigError when the limits are not ordered / in range.
    void validate() const;
};

enum class ViolationKind { overvoltage, undervoltage, thermal };

std::string_view to_string(ViolationKind kind);

enum class ElementType { bus, line, transformer };

struct ElementRef {
    ElementType type = ElementType::bus;
    ElementId id = 0;

    auto operator<=>(const ElementRef&) const = default;
    std::string to_string() const;
};

struct Violation {
    ViolationKind kind = ViolationKind::overvoltage;
    ElementRef element;
    double value = 0.0;
    double limit = 0.0;
};

struct ViolationReport {
    Timestamp timestamp{};
    std::optional<BranchRef> contingency;  // empty: normal operation
    std::vector<Violation> violations;     // sorted by (kind, element)

    bool secure() const { return violations.empty(); }
};

/// Compares a converged state with the limits. Limits are inclusive: a value
/// exactly on the boundary is secure.
ViolationReport assess(const PowerFlowSolution& solution, const SecurityLimits& limits,
                       std::optional<BranchRef> contingency = std::nullopt);

nlohmann::json to_json(const Violation& v);
nlohmann::json to_json(const ViolationReport& report);

/// One-line human summary, e.g. "2024-06-01T12:00:00Z normal: 1 violation(s) [overvoltage bus:7 1.0612>1.05]".
std::string summarize(const ViolationReport& report);

}  // namespace gridtwin
