#pragma once

#include <filesystem>
#include <vector>

#include "gridtwin/config.hpp"
#include "gridtwin/harness.hpp"
#include "gridtwin/ingestion.hpp"
#include "gridtwin/network.hpp"

namespace gridtwin {

struct Inputs {
    Network network;  // generators without a hist-max get the ingested one
    Aggregation aggregation;
    OperatingPointSet points;
};

Inputs load_inputs(const std::filesystem::path& network_path, const std::filesystem::path& measurements_path,
                   GapPolicy policy, const PowerFactors& factors);

/// Fills missing generator hist-max values from the measurement series.
void fill_historical_maxima(Network& network, const Aggregation& aggregation);

struct RunOutcome {
    BaseCase base;
    std::vector<ScenarioResult> scenarios;
};

/// Base Case and every configured scenario, then all artifacts
/// under config.output.
RunOutcome execute_run(const RunConfig& config);

}  // namespace gridtwin
