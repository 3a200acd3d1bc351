#pragma once

#include <filesystem>
#include <string>

#include "gridtwin/network.hpp"
#include "gridtwin/powerflow.hpp"
#include "gridtwin/time.hpp"

namespace gridtwin::testing {

std::filesystem::path source_dir();
std::filesystem::path fixture_dir();  // data/mini_bornholm
std::filesystem::path cli_path();
std::filesystem::path synth_path();

/// Fresh, empty scratch directory unique to `name`.
std::filesystem::path scratch_dir(const std::string& name);

/// Runs a shell command, returning its exit status; stdout/stderr land in `output`.
int run_command(const std::string& command, std::string* output = nullptr);

/// Slack bus 1 (60 kV, V = 1.0) and one lossless line of j0.1 p.u. to bus 2.
Network two_bus(double x_pu = 0.1, double max_i_ka = 1.0);
OperatingPoint two_bus_point(double p_mw, double q_mvar);

Network mini_bornholm();

/// An empty point sized for the network.
OperatingPoint zero_point(const Network& network);

Timestamp at(const char* text);

/// Resistive 20 kV feeder 1-2-3 with a unit at each far bus; the unit at bus 3
/// lifts it to about 1.079 p.u. Mirrors tests/oracles/three_bus_grid.py.
struct ThreeBus {
    Network network;
    OperatingPoint point;
};
ThreeBus three_bus_overvoltage();

// Frozen output of tests/oracles/three_bus_grid.py (p.u.^2).
inline constexpr double kThreeBusGridOptimum = 0.030689083;
inline constexpr double kThreeBusResolutionBound = 0.018039132;

/// The checked-in fixture week loaded as the engine would (hold-last gaps).
struct FixtureWeek {
    Network network;
    std::vector<OperatingPoint> points;

    const OperatingPoint& point(const char* when) const;
};

const FixtureWeek& fixture_week();

}  // namespace gridtwin::testing
