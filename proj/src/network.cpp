#include "gridtwin/network.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <deque>
#include <fstream>
#include <set>
#include <unordered_map>

#include <fmt/format.h>

#include "gridtwin/error.hpp"

namespace gridtwin {

using nlohmann::json;

std::string BranchRef::to_string() const {
    return fmt::format("{}:{}", kind == BranchKind::line ? "line" : "trafo", id);
}

BranchRef BranchRef::parse(std::string_view text) {
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) {
        throw DataError(fmt::format("branch reference '{}' must look like line:<id> or trafo:<id>", text));
    }
    const auto kind = text.substr(0, colon);
    const auto digits = text.substr(colon + 1);
    BranchRef ref;
    if (kind == "line") {
        ref.kind = BranchKind::line;
    } else if (kind == "trafo" || kind == "transformer") {
        ref.kind = BranchKind::transformer;
    } else {
        throw DataError(fmt::format("unknown branch kind in '{}'", text));
    }
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), ref.id);
    if (ec != std::errc{} || ptr != digits.data() + digits.size() || digits.empty()) {
        throw DataError(fmt::format("bad element id in '{}'", text));
    }
    return ref;
}

const Bus& Network::bus(ElementId id) const {
    const auto idx = bus_index(id);
    if (!idx) throw DataError(fmt::format("dangling reference: bus {} does not exist", id));
    return buses[*idx];
}

Bus& Network::bus(ElementId id) {
    const auto idx = bus_index(id);
    if (!idx) throw DataError(fmt::format("dangling reference: bus {} does not exist", id));
    return buses[*idx];
}

std::optional<std::size_t> Network::bus_index(ElementId id) const {
    for (std::size_t i = 0; i < buses.size(); ++i) {
        if (buses[i].id == id) return i;
    }
    return std::nullopt;
}

std::size_t Network::in_service_branch_count() const {
    const auto on = [](const auto& e) { return e.in_service; };
    return static_cast<std::size_t>(std::count_if(lines.begin(), lines.end(), on) +
                                    std::count_if(transformers.begin(), transformers.end(), on));
}

bool Network::contains(const BranchRef& ref) const {
    if (ref.kind == BranchKind::line) {
        return std::any_of(lines.begin(), lines.end(), [&](const Line& l) { return l.id == ref.id; });
    }
    return std::any_of(transformers.begin(), transformers.end(),
                       [&](const Transformer& t) { return t.id == ref.id; });
}

bool Network::branch_in_service(const BranchRef& ref) const {
    if (ref.kind == BranchKind::line) {
        for (const auto& l : lines) {
            if (l.id == ref.id) return l.in_service;
        }
    } else {
        for (const auto& t : transformers) {
            if (t.id == ref.id) return t.in_service;
        }
    }
    throw DataError(fmt::format("unknown element {}", ref.to_string()));
}

void Network::set_branch_in_service(const BranchRef& ref, bool in_service) {
    if (ref.kind == BranchKind::line) {
        for (auto& l : lines) {
            if (l.id == ref.id) {
                l.in_service = in_service;
                return;
            }
        }
    } else {
        for (auto& t : transformers) {
            if (t.id == ref.id) {
                t.in_service = in_service;
                return;
            }
        }
    }
    throw DataError(fmt::format("unknown element {}", ref.to_string()));
}

// ---------------------------------------------------------------------------
// JSON document

namespace {

const json& field(const json& obj, const char* key, const std::string& where) {
    const auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) {
        throw DataError(fmt::format("schema violation: {}.{} is missing", where, key));
    }
    return *it;
}

double number(const json& obj, const char* key, const std::string& where) {
    const json& v = field(obj, key, where);
    if (!v.is_number()) {
        throw DataError(fmt::format("schema violation: {}.{} must be a number", where, key));
    }
    return v.get<double>();
}

double number_or(const json& obj, const char* key, const std::string& where, double fallback) {
    const auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return fallback;
    return number(obj, key, where);
}

int integer(const json& obj, const char* key, const std::string& where) {
    const json& v = field(obj, key, where);
    if (!v.is_number_integer()) {
        throw DataError(fmt::format("schema violation: {}.{} must be an integer", where, key));
    }
    return v.get<int>();
}

std::string text_or(const json& obj, const char* key, const std::string& where, std::string fallback) {
    const auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return fallback;
    if (!it->is_string()) {
        throw DataError(fmt::format("schema violation: {}.{} must be a string", where, key));
    }
    return it->get<std::string>();
}

bool flag_or(const json& obj, const char* key, const std::string& where, bool fallback) {
    const auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return fallback;
    if (!it->is_boolean()) {
        throw DataError(fmt::format("schema violation: {}.{} must be a boolean", where, key));
    }
    return it->get<bool>();
}

const json& array_or_empty(const json& doc, const char* key) {
    static const json empty = json::array();
    const auto it = doc.find(key);
    if (it == doc.end() || it->is_null()) return empty;
    if (!it->is_array()) {
        throw DataError(fmt::format("schema violation: '{}' must be an array", key));
    }
    return *it;
}

template <typename Fn>
void each(const json& doc, const char* key, Fn&& fn) {
    const json& arr = array_or_empty(doc, key);
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string where = fmt::format("{}[{}]", key, i);
        if (!arr[i].is_object()) {
            throw DataError(fmt::format("schema violation: {} must be an object", where));
        }
        fn(arr[i], where);
    }
}

template <typename T>
void check_unique_ids(const std::vector<T>& items, const char* what) {
    std::set<ElementId> seen;
    for (const auto& item : items) {
        if (!seen.insert(item.id).second) {
            throw DataError(fmt::format("duplicate {} id {}", what, item.id));
        }
    }
}

bool same_voltage(double a, double b) { return std::abs(a - b) <= 1e-6 * std::max(std::abs(a), std::abs(b)); }

}  // namespace

Network load_network(const json& doc) {
    if (!doc.is_object()) throw DataError("schema violation: network document must be a JSON object");
    Network net;

    each(doc, "buses", [&](const json& b, const std::string& where) {
        Bus bus;
        bus.id = integer(b, "id", where);
        bus.name = text_or(b, "name", where, fmt::format("bus{}", bus.id));
        bus.vn_kv = number(b, "vn_kv", where);
        const std::string kind = text_or(b, "kind", where, "pq");
        if (kind == "slack") {
            bus.kind = BusKind::slack;
        } else if (kind == "pq") {
            bus.kind = BusKind::pq;
        } else {
            throw DataError(fmt::format("schema violation: {}.kind must be 'slack' or 'pq'", where));
        }
        bus.in_service = flag_or(b, "in_service", where, true);
        net.buses.push_back(std::move(bus));
    });

    each(doc, "lines", [&](const json& l, const std::string& where) {
        Line line;
        line.id = integer(l, "id", where);
        line.from_bus = integer(l, "from_bus", where);
        line.to_bus = integer(l, "to_bus", where);
        line.r_ohm_per_km = number(l, "r_ohm_per_km", where);
        line.x_ohm_per_km = number(l, "x_ohm_per_km", where);
        line.c_nf_per_km = number_or(l, "c_nf_per_km", where, 0.0);
        line.length_km = number(l, "length_km", where);
        line.max_i_ka = number(l, "max_i_ka", where);
        line.in_service = flag_or(l, "in_service", where, true);
        net.lines.push_back(line);
    });

    each(doc, "transformers", [&](const json& t, const std::string& where) {
        Transformer tr;
        tr.id = integer(t, "id", where);
        tr.hv_bus = integer(t, "hv_bus", where);
        tr.lv_bus = integer(t, "lv_bus", where);
        tr.sn_mva = number(t, "sn_mva", where);
        tr.vk_percent = number(t, "vk_percent", where);
        tr.vkr_percent = number(t, "vkr_percent", where);
        tr.vn_hv_kv = number(t, "vn_hv_kv", where);
        tr.vn_lv_kv = number(t, "vn_lv_kv", where);
        tr.in_service = flag_or(t, "in_service", where, true);
        net.transformers.push_back(tr);
    });

    each(doc, "shunts", [&](const json& s, const std::string& where) {
        Shunt sh;
        sh.id = integer(s, "id", where);
        sh.bus = integer(s, "bus", where);
        sh.q_mvar = number(s, "q_mvar", where);
        sh.p_mw = number_or(s, "p_mw", where, 0.0);
        sh.in_service = flag_or(s, "in_service", where, true);
        net.shunts.push_back(sh);
    });

    each(doc, "generators", [&](const json& g, const std::string& where) {
        Generator gen;
        gen.id = integer(g, "id", where);
        gen.bus = integer(g, "bus", where);
        gen.p_hist_max_mw = number_or(g, "p_hist_max_mw", where, std::numeric_limits<double>::quiet_NaN());
        gen.substation = text_or(g, "substation", where, "");
        gen.in_service = flag_or(g, "in_service", where, true);
        net.generators.push_back(std::move(gen));
    });

    each(doc, "loads", [&](const json& l, const std::string& where) {
        Load load;
        load.id = integer(l, "id", where);
        load.bus = integer(l, "bus", where);
        load.substation = text_or(l, "substation", where, "");
        load.in_service = flag_or(l, "in_service", where, true);
        net.loads.push_back(std::move(load));
    });

    const json& ext = field(doc, "ext_grid", "network");
    if (!ext.is_object()) throw DataError("schema violation: ext_grid must be an object");
    net.ext_grid.bus = integer(ext, "bus", "ext_grid");
    net.ext_grid.vm_pu = number_or(ext, "vm_pu", "ext_grid", 1.0);

    net.s_base_mva = number_or(doc, "s_base_mva", "network", 100.0);
    net.f_hz = number_or(doc, "f_hz", "network", 50.0);

    // Units without an explicit substation tag follow their bus name.
    for (auto& g : net.generators) {
        if (g.substation.empty()) {
            if (auto idx = net.bus_index(g.bus)) g.substation = net.buses[*idx].name;
        }
    }
    for (auto& l : net.loads) {
        if (l.substation.empty()) {
            if (auto idx = net.bus_index(l.bus)) l.substation = net.buses[*idx].name;
        }
    }

    validate_network(net);
    return net;
}

Network load_network_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError(fmt::format("cannot open network file '{}'", path.string()));
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw DataError(fmt::format("network file '{}' is not valid JSON: {}", path.string(), e.what()));
    }
    return load_network(doc);
}

json to_json(const Network& net) {
    json doc;
    doc["s_base_mva"] = net.s_base_mva;
    doc["f_hz"] = net.f_hz;
    doc["buses"] = json::array();
    for (const auto& b : net.buses) {
        doc["buses"].push_back({{"id", b.id},
                                {"name", b.name},
                                {"vn_kv", b.vn_kv},
                                {"kind", b.kind == BusKind::slack ? "slack" : "pq"},
                                {"in_service", b.in_service}});
    }
    doc["lines"] = json::array();
    for (const auto& l : net.lines) {
        doc["lines"].push_back({{"id", l.id},
                                {"from_bus", l.from_bus},
                                {"to_bus", l.to_bus},
                                {"r_ohm_per_km", l.r_ohm_per_km},
                                {"x_ohm_per_km", l.x_ohm_per_km},
                                {"c_nf_per_km", l.c_nf_per_km},
                                {"length_km", l.length_km},
                                {"max_i_ka", l.max_i_ka},
                                {"in_service", l.in_service}});
    }
    doc["transformers"] = json::array();
    for (const auto& t : net.transformers) {
        doc["transformers"].push_back({{"id", t.id},
                                       {"hv_bus", t.hv_bus},
                                       {"lv_bus", t.lv_bus},
                                       {"sn_mva", t.sn_mva},
                                       {"vk_percent", t.vk_percent},
                                       {"vkr_percent", t.vkr_percent},
                                       {"vn_hv_kv", t.vn_hv_kv},
                                       {"vn_lv_kv", t.vn_lv_kv},
                                       {"in_service", t.in_service}});
    }
    doc["shunts"] = json::array();
    for (const auto& s : net.shunts) {
        doc["shunts"].push_back(
            {{"id", s.id}, {"bus", s.bus}, {"q_mvar", s.q_mvar}, {"p_mw", s.p_mw}, {"in_service", s.in_service}});
    }
    doc["generators"] = json::array();
    for (const auto& g : net.generators) {
        json item = {{"id", g.id}, {"bus", g.bus}, {"substation", g.substation}, {"in_service", g.in_service}};
        if (g.has_hist_max()) item["p_hist_max_mw"] = g.p_hist_max_mw;
        doc["generators"].push_back(std::move(item));
    }
    doc["loads"] = json::array();
    for (const auto& l : net.loads) {
        doc["loads"].push_back(
            {{"id", l.id}, {"bus", l.bus}, {"substation", l.substation}, {"in_service", l.in_service}});
    }
    doc["ext_grid"] = {{"bus", net.ext_grid.bus}, {"vm_pu", net.ext_grid.vm_pu}};
    return doc;
}

// ---------------------------------------------------------------------------
// Validation

void validate_network(const Network& net) {
    if (!(net.s_base_mva > 0.0)) throw DataError("non-positive physical parameter: s_base_mva");
    if (!(net.f_hz > 0.0)) throw DataError("non-positive physical parameter: f_hz");
    if (net.buses.empty()) throw DataError("network has no buses");

    check_unique_ids(net.buses, "bus");
    check_unique_ids(net.lines, "line");
    check_unique_ids(net.transformers, "transformer");
    check_unique_ids(net.shunts, "shunt");
    check_unique_ids(net.generators, "generator");
    check_unique_ids(net.loads, "load");

    int slack_count = 0;
    for (const auto& b : net.buses) {
        if (!(b.vn_kv > 0.0)) {
            throw DataError(fmt::format("non-positive physical parameter: bus {} vn_kv", b.id));
        }
        if (b.kind == BusKind::slack) ++slack_count;
    }
    if (slack_count == 0) throw DataError("no slack bus");
    if (slack_count > 1) throw DataError("multiple slack buses");

    const auto require_bus = [&](ElementId bus, const std::string& who) -> const Bus& {
        const auto idx = net.bus_index(bus);
        if (!idx) throw DataError(fmt::format("dangling reference: {} refers to missing bus {}", who, bus));
        return net.buses[*idx];
    };

    const Bus& slack = require_bus(net.ext_grid.bus, "ext_grid");
    if (slack.kind != BusKind::slack) {
        throw DataError(fmt::format("ext_grid must sit on the slack bus, bus {} is not slack", slack.id));
    }
    if (!slack.in_service) throw DataError("slack bus is out of service");
    if (!(net.ext_grid.vm_pu >= 0.9 && net.ext_grid.vm_pu <= 1.1)) {
        throw DataError(fmt::format("ext_grid vm_pu {} outside [0.9, 1.1]", net.ext_grid.vm_pu));
    }

    for (const auto& l : net.lines) {
        const std::string who = fmt::format("line {}", l.id);
        const Bus& a = require_bus(l.from_bus, who);
        const Bus& b = require_bus(l.to_bus, who);
        if (l.from_bus == l.to_bus) throw DataError(fmt::format("{} connects bus {} to itself", who, l.from_bus));
        if (!(l.length_km > 0.0)) throw DataError(fmt::format("non-positive physical parameter: {} length_km", who));
        if (!(l.max_i_ka > 0.0)) throw DataError(fmt::format("non-positive physical parameter: {} max_i_ka", who));
        if (!(l.x_ohm_per_km >= 0.0) || !(l.r_ohm_per_km >= 0.0) || !(l.c_nf_per_km >= 0.0)) {
            throw DataError(fmt::format("negative impedance parameter on {}", who));
        }
        if (!same_voltage(a.vn_kv, b.vn_kv)) {
            throw DataError(fmt::format("{} joins buses of different nominal voltage ({} kV, {} kV)", who,
                                        a.vn_kv, b.vn_kv));
        }
    }
    for (const auto& t : net.transformers) {
        const std::string who = fmt::format("transformer {}", t.id);
        const Bus& hv = require_bus(t.hv_bus, who);
        const Bus& lv = require_bus(t.lv_bus, who);
        if (t.hv_bus == t.lv_bus) throw DataError(fmt::format("{} connects bus {} to itself", who, t.hv_bus));
        if (!(t.sn_mva > 0.0)) throw DataError(fmt::format("non-positive physical parameter: {} sn_mva", who));
        if (!(t.vkr_percent > 0.0 && t.vkr_percent <= t.vk_percent)) {
            throw DataError(fmt::format("{} needs 0 < vkr_percent <= vk_percent", who));
        }
        if (!(t.vn_hv_kv > 0.0) || !(t.vn_lv_kv > 0.0)) {
            throw DataError(fmt::format("non-positive physical parameter: {} rated voltage", who));
        }
        // Unit-tap model: rated voltages must equal the bus nominal voltages.
        if (!same_voltage(t.vn_hv_kv, hv.vn_kv) || !same_voltage(t.vn_lv_kv, lv.vn_kv)) {
            throw DataError(fmt::format("{} rated voltages {}/{} kV do not match its buses ({}/{} kV)", who,
                                        t.vn_hv_kv, t.vn_lv_kv, hv.vn_kv, lv.vn_kv));
        }
    }

    const auto check_attached = [&](ElementId bus, bool in_service, const std::string& who) {
        const Bus& b = require_bus(bus, who);
        if (in_service && !b.in_service) {
            throw DataError(fmt::format("{} is in service on de-energised bus {}", who, bus));
        }
    };
    for (const auto& s : net.shunts) check_attached(s.bus, s.in_service, fmt::format("shunt {}", s.id));
    for (const auto& l : net.loads) check_attached(l.bus, l.in_service, fmt::format("load {}", l.id));
    for (const auto& g : net.generators) {
        check_attached(g.bus, g.in_service, fmt::format("generator {}", g.id));
        if (g.has_hist_max() && !(g.p_hist_max_mw >= 0.0)) {
            throw DataError(fmt::format("generator {} has negative p_hist_max_mw", g.id));
        }
    }

    for (const ElementId id : find_islanded_buses(net)) {
        if (net.bus(id).in_service) {
            throw DataError(fmt::format("bus {} is not connected to the slack bus", id));
        }
    }
}

// ---------------------------------------------------------------------------
// Topology

std::vector<ElementId> find_islanded_buses(const Network& net) {
    std::unordered_map<ElementId, std::vector<ElementId>> adjacency;
    const auto energised = [&](ElementId id) {
        const auto idx = net.bus_index(id);
        return idx && net.buses[*idx].in_service;
    };
    const auto connect = [&](ElementId a, ElementId b) {
        if (!energised(a) || !energised(b)) return;
        adjacency[a].push_back(b);
        adjacency[b].push_back(a);
    };
    for (const auto& l : net.lines) {
        if (l.in_service) connect(l.from_bus, l.to_bus);
    }
    for (const auto& t : net.transformers) {
        if (t.in_service) connect(t.hv_bus, t.lv_bus);
    }

    std::set<ElementId> reached{net.slack_bus()};
    std::deque<ElementId> frontier{net.slack_bus()};
    while (!frontier.empty()) {
        const ElementId at = frontier.front();
        frontier.pop_front();
        for (const ElementId next : adjacency[at]) {
            if (reached.insert(next).second) frontier.push_back(next);
        }
    }

    std::vector<ElementId> islanded;
    for (const auto& b : net.buses) {
        if (!reached.contains(b.id)) islanded.push_back(b.id);
    }
    std::sort(islanded.begin(), islanded.end());
    return islanded;
}

OutageResult apply_outage(const Network& network, const BranchRef& element) {
    if (!network.contains(element)) {
        throw DataError(fmt::format("element id unknown: {}", element.to_string()));
    }
    OutageResult result{network, {}};
    Network& net = result.network;
    net.set_branch_in_service(element, false);

    // Only buses energised before the outage count as newly islanded.
    std::vector<ElementId> cut = find_islanded_buses(net);
    std::erase_if(cut, [&](ElementId id) { return !network.bus(id).in_service; });
    result.islanded_buses = cut;

    const std::set<ElementId> dead(cut.begin(), cut.end());
    for (auto& b : net.buses) {
        if (dead.contains(b.id)) b.in_service = false;
    }
    for (auto& g : net.generators) {
        if (dead.contains(g.bus)) g.in_service = false;
    }
    for (auto& l : net.loads) {
        if (dead.contains(l.bus)) l.in_service = false;
    }
    for (auto& s : net.shunts) {
        if (dead.contains(s.bus)) s.in_service = false;
    }
    for (auto& l : net.lines) {
        if (dead.contains(l.from_bus) || dead.contains(l.to_bus)) l.in_service = false;
    }
    for (auto& t : net.transformers) {
        if (dead.contains(t.hv_bus) || dead.contains(t.lv_bus)) t.in_service = false;
    }

    const bool anything_left = std::any_of(net.buses.begin(), net.buses.end(), [&](const Bus& b) {
        return b.in_service && b.id != net.slack_bus();
    });
    if (!anything_left) {
        throw TopologyError("degenerate case: empty network", result.islanded_buses);
    }
    return result;
}

}  // namespace gridtwin
