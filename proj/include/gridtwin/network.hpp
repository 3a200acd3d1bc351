#pragma once

#include <compare>
#include <cstddef>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace gridtwin {

using ElementId = int;

enum class BusKind { slack, pq };

struct Bus {
    ElementId id = 0;
    std::string name;
    double vn_kv = 0.0;
    BusKind kind = BusKind::pq;
    bool in_service = true;
};

struct Line {
    ElementId id = 0;
    ElementId from_bus = 0;
    ElementId to_bus = 0;
    double r_ohm_per_km = 0.0;
    double x_ohm_per_km = 0.0;
    double c_nf_per_km = 0.0;
    double length_km = 0.0;
    double max_i_ka = 0.0;
    bool in_service = true;
};

struct Transformer {
    ElementId id = 0;
    ElementId hv_bus = 0;
    ElementId lv_bus = 0;
    double sn_mva = 0.0;
    double vk_percent = 0.0;
    double vkr_percent = 0.0;
    double vn_hv_kv = 0.0;
    double vn_lv_kv = 0.0;
    bool in_service = true;
};

/// Constant-impedance shunt; q_mvar > 0 is inductive (consumes reactive power).
struct Shunt {
    ElementId id = 0;
    ElementId bus = 0;
    double q_mvar = 0.0;
    double p_mw = 0.0;
    bool in_service = true;
};

/// Equivalent generation unit of one substation. `substation` links it to
/// measurement series and defaults to the bus name.
struct Generator {
    ElementId id = 0;
    ElementId bus = 0;
    double p_hist_max_mw = std::numeric_limits<double>::quiet_NaN();
    std::string substation;
    bool in_service = true;

    bool has_hist_max() const { return p_hist_max_mw == p_hist_max_mw; }
};

struct Load {
    ElementId id = 0;
    ElementId bus = 0;
    std::string substation;
    bool in_service = true;
};

struct ExternalGrid {
    ElementId bus = 0;
    double vm_pu = 1.0;
};

enum class BranchKind { line, transformer };

/// Identifies a line or transformer; text form is `line:<id>` / `trafo:<id>`.
struct BranchRef {
    BranchKind kind = BranchKind::line;
    ElementId id = 0;

    auto operator<=>(const BranchRef&) const = default;

    std::string to_string() const;
    static BranchRef parse(std::string_view text);
};

struct Network {
    std::vector<Bus> buses;
    std::vector<Line> lines;
    std::vector<Transformer> transformers;
    std::vector<Shunt> shunts;
    std::vector<Generator> generators;
    std::vector<Load> loads;
    ExternalGrid ext_grid;
    double s_base_mva = 100.0;
    double f_hz = 50.0;

    const Bus& bus(ElementId id) const;
    Bus& bus(ElementId id);
    std::optional<std::size_t> bus_index(ElementId id) const;
    ElementId slack_bus() const { return ext_grid.bus; }

    std::size_t in_service_branch_count() const;
    bool contains(const BranchRef& ref) const;
    bool branch_in_service(const BranchRef& ref) const;
    void set_branch_in_service(const BranchRef& ref, bool in_service);
};

/// Parses and validates a network document. Throws DataError.
Network load_network(const nlohmann::json& document);
Network load_network_file(const std::filesystem::path& path);
nlohmann::json to_json(const Network& network);

/// Checks every structural invariant; throws DataError naming the first breach.
void validate_network(const Network& network);

/// Buses not reachable from the slack over in-service branches, sorted by id.
std::vector<ElementId> find_islanded_buses(const Network& network);

struct OutageResult {
    Network network;
    std::vector<ElementId> islanded_buses;
};

/// Takes a branch out of service and de-energises everything cut off from the
/// slack. The input is not modified. Throws DataError for an unknown element
/// and TopologyError when only the slack bus remains energised.
OutageResult apply_outage(const Network& network, const BranchRef& element);

}  // namespace gridtwin
