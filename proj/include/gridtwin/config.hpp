#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "gridtwin/harness.hpp"
#include "gridtwin/ingestion.hpp"
#include "gridtwin/nlp.hpp"
#include "gridtwin/powerflow.hpp"
#include "gridtwin/rsae.hpp"
#include "gridtwin/smfae.hpp"

namespace gridtwin {

struct RunConfig {
    std::filesystem::path network;
    std::filesystem::path measurements;
    std::filesystem::path output = "run";
    RedispatchConfig redispatch;  // limits, weights, power-flow and optimiser options
    PowerFactors power_factors;
    GapPolicy gap_policy = GapPolicy::hold_last;
    std::vector<Scenario> scenarios;
    int jobs = 1;
    int cae_stride = 1;
    double activation_threshold_mw = 1e-6;

    HarnessOptions harness_options() const;
};

/// Defaults: Base Case with contingency sweep, then -20% and +20% load.
RunConfig default_config();

/// Reads a JSON config. Relative paths resolve against the config's directory.
/// Unknown keys and out-of-range values raise ConfigError.
RunConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

/// Range checks; with `require_inputs` also checks that input files exist.
void validate_config(const RunConfig& config, bool require_inputs);

nlohmann::json to_json(const RunConfig& config);

}  // namespace gridtwin
