#include "fixtures.hpp"

#include <array>
#include <cstdio>
#include <sys/wait.h>

#include "gridtwin/error.hpp"
#include "gridtwin/run.hpp"
#include "gridtwin/synthetic.hpp"

namespace gridtwin::testing {

std::filesystem::path source_dir() { return GRIDTWIN_SOURCE_DIR; }
std::filesystem::path fixture_dir() { return source_dir() / "data" / "mini_bornholm"; }
std::filesystem::path cli_path() { return GRIDTWIN_CLI; }
std::filesystem::path synth_path() { return GRIDTWIN_SYNTH; }

std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "gridtwin-tests" / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

int run_command(const std::string& command, std::string* output) {
    const std::string full = command + " 2>&1";
    FILE* pipe = popen(full.c_str(), "r");
    if (!pipe) return -1;
    std::array<char, 4096> buf{};
    std::string text;
    while (const auto n = fread(buf.data(), 1, buf.size(), pipe)) text.append(buf.data(), n);
    const int status = pclose(pipe);
    if (output) *output = text;
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Network two_bus(double x_pu, double max_i_ka) {
    Network net;
    net.buses = {{1, "slack", 60.0, BusKind::slack}, {2, "load", 60.0, BusKind::pq}};
    // z_base = 60^2 / 100 = 36 ohm
    net.lines = {{1, 1, 2, 0.0, x_pu * 36.0, 0.0, 1.0, max_i_ka}};
    net.loads = {{1, 2, "load"}};
    net.ext_grid = {1, 1.0};
    validate_network(net);
    return net;
}

OperatingPoint two_bus_point(double p_mw, double q_mvar) {
    OperatingPoint p;
    p.loads = {{p_mw, q_mvar}};
    return p;
}

ThreeBus three_bus_overvoltage() {
    ThreeBus c;
    Network& net = c.network;
    net.buses = {{1, "feed", 20.0, BusKind::slack}, {2, "mid", 20.0, BusKind::pq}, {3, "end", 20.0, BusKind::pq}};
    net.lines = {{1, 1, 2, 0.3, 0.1, 0.0, 10.0, 1.0}, {2, 2, 3, 0.3, 0.1, 0.0, 10.0, 1.0}};
    net.loads = {{1, 2, "mid"}, {2, 3, "end"}};
    net.generators = {{1, 2, 20.0, "mid"}, {2, 3, 20.0, "end"}};
    net.ext_grid = {1, 1.0};
    validate_network(net);
    c.point.loads = {{1.0, 0.33}, {0.5, 0.16}};
    c.point.generators = {{1.0, 0.14}, {6.0, 0.85}};
    return c;
}

Network mini_bornholm() { return load_network(synthetic::mini_bornholm_network()); }

OperatingPoint zero_point(const Network& network) {
    OperatingPoint p;
    p.loads.resize(network.loads.size());
    p.generators.resize(network.generators.size());
    return p;
}

Timestamp at(const char* text) { return parse_timestamp(text); }

const OperatingPoint& FixtureWeek::point(const char* when) const {
    const Timestamp t = at(when);
    for (const auto& p : points) {
        if (p.timestamp == t) return p;
    }
    throw Error(std::string("no fixture point at ") + when);
}

const FixtureWeek& fixture_week() {
    static const FixtureWeek week = [] {
        auto in = load_inputs(fixture_dir() / "network.json", fixture_dir() / "week.csv", GapPolicy::hold_last, {});
        return FixtureWeek{std::move(in.network), std::move(in.points.points)};
    }();
    return week;
}

}  // namespace gridtwin::testing
