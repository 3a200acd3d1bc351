#pragma once

#include <cstdint>

#include "gridtwin/network.hpp"
#include "gridtwin/powerflow.hpp"

namespace gridtwin::testing {

struct RandomCase {
    Network network;
    OperatingPoint point;
};

/// Connected 2..max_buses network at one voltage level (spanning tree plus a
/// few extra lines, random shunts) with a moderate load/generation pattern.
RandomCase random_case(std::uint64_t seed, int max_buses = 6);

}  // namespace gridtwin::testing
