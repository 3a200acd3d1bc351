#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gridtwin/cae.hpp"
#include "gridtwin/error.hpp"
#include "gridtwin/network.hpp"
#include "gridtwin/parallel.hpp"
#include "gridtwin/powerflow.hpp"
#include "gridtwin/rsae.hpp"
#include "gridtwin/smfae.hpp"

namespace gridtwin {

struct Scenario {
    std::string name;
    double load_scale = 1.0;
    bool rsae = true;
    bool cae = false;    // sweep runs on the unscaled Base Case
    bool smfae = true;
};

struct HarnessOptions {
    RedispatchConfig redispatch;  // also carries security limits and power-flow options
    int jobs = 1;
    int cae_stride = 1;                         // assess every n-th Base Case timestamp
    double activation_threshold_mw = 1e-6;      // |delta| above this counts as an activation
    ProgressFn progress;
};

/// Base Case construction failed; carries every offending timestamp.
class BaseCaseError : public Error {
public:
    BaseCaseError(const std::string& what, std::vector<Timestamp> timestamps)
        : Error(what), timestamps_(std::move(timestamps)) {}
    const std::vector<Timestamp>& timestamps() const noexcept { return timestamps_; }

private:
    std::vector<Timestamp> timestamps_;
};

struct BaseCaseAdjustment {
    Timestamp timestamp{};
    std::string violations;  // one-line summary of what was repaired
    SetpointSchedule schedule;
};

struct BaseCase {
    std::vector<OperatingPoint> points;  // violation-free, ascending time
    std::vector<double> p_ext_mw;        // import at each point
    std::vector<BaseCaseAdjustment> adjustments;
};

/// Power flow + assessment at every point; violated points get a corrective
/// redispatch that holds their own import. Throws BaseCaseError listing the
/// timestamps that could not be secured.
BaseCase build_base_case(const Network& network, std::vector<OperatingPoint> points, const HarnessOptions& options);

/// Loads (P and Q) multiplied by `scale`; generators untouched.
OperatingPoint scale_loads(OperatingPoint point, double scale);

struct DistributionSummary {
    std::size_t samples = 0;   // all deltas offered
    std::size_t activations = 0;
    bool no_activation = true;
    double min = 0.0;
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
    double max = 0.0;
    double mean = 0.0;
};

/// Five-number summary and mean over the deltas with |delta| > threshold,
/// quartiles by linear interpolation between order statistics.
DistributionSummary compute_distribution_summary(std::span<const double> deltas, double threshold = 0.0);

nlohmann::json to_json(const DistributionSummary& s);

struct GeneratorDeltaSummary {
    ElementId generator = 0;
    DistributionSummary delta_p_mw;
    DistributionSummary delta_q_mvar;
};

struct ActivationCounts {
    std::size_t requested = 0;
    std::size_t optimal = 0;
    std::size_t infeasible = 0;
    std::size_t solver_failure = 0;
    std::size_t problem_error = 0;  // could not be assembled
    std::size_t verified_secure = 0;
};

struct RunMetrics {
    std::size_t operating_points = 0;
    std::size_t violated_points = 0;
    double violation_rate_percent = 0.0;
    double overvoltage_rate_percent = 0.0;
    double undervoltage_rate_percent = 0.0;
    double thermal_rate_percent = 0.0;
    std::size_t power_flow_failures = 0;
    double max_voltage_pu = 0.0;
    double min_voltage_pu = 0.0;
    double max_loading_percent = 0.0;

    ActivationCounts corrective;
    std::vector<GeneratorDeltaSummary> corrective_deltas;

    bool cae_enabled = false;
    std::size_t cae_timestamps = 0;
    std::size_t cae_cases = 0;
    std::size_t cae_violated_cases = 0;
    std::size_t cae_violated_timestamps = 0;
    double cae_case_violation_rate_percent = 0.0;
    double cae_timestamp_violation_rate_percent = 0.0;
    std::size_t cae_diverged = 0;
    std::size_t cae_degenerate = 0;
    double cae_max_voltage_pu = 0.0;
    double cae_min_voltage_pu = 0.0;
    double cae_max_loading_percent = 0.0;
    ActivationCounts preventive;
    std::vector<GeneratorDeltaSummary> preventive_deltas;

    double import_without_smfae_mwh = 0.0;
    double import_with_smfae_mwh = 0.0;
    double import_reduction_mwh = 0.0;
};

nlohmann::json to_json(const RunMetrics& m);

/// Per-timestamp outcome of the normal-operation sweep.
struct TimestampRecord {
    Timestamp timestamp{};
    bool solved = false;
    std::string failure;
    ViolationReport report;
    double p_ext_without_mw = 0.0;
    double p_ext_with_mw = 0.0;
    double max_loading_percent = 0.0;
    std::optional<SetpointSchedule> schedule;
    std::vector<double> vm_assessed;  // admittance order
    std::vector<double> vm_secured;
};

struct ContingencyRecord {
    Timestamp timestamp{};
    ContingencyCase c;
    std::optional<SetpointSchedule> schedule;
    std::string failure;  // preventive problem could not be built
};

struct BusEnvelope {
    ElementId bus = 0;
    double min_v = 0.0;
    double max_v = 0.0;
};

struct ScenarioResult {
    Scenario scenario;
    std::vector<TimestampRecord> timestamps;
    std::vector<ContingencyRecord> contingencies;
    std::vector<BusEnvelope> envelope_assessed;  // before redispatch
    std::vector<BusEnvelope> envelope_secured;   // redispatched where optimal
    RunMetrics metrics;
    double rsae_seconds = 0.0;
    double smfae_seconds = 0.0;
    double cae_seconds = 0.0;
};

ScenarioResult run_scenario(const Network& network, const BaseCase& base, const Scenario& scenario,
                            const HarnessOptions& options);

/// Writes one scenario's records into an open run directory (appending to the
/// shared JSON-lines and CSV files created by begin_run_directory).
void begin_run_directory(const std::filesystem::path& dir);
void write_scenario_outputs(const std::filesystem::path& dir, const Network& network, const ScenarioResult& result);
void write_base_case_log(const std::filesystem::path& dir, const BaseCase& base);

/// metrics.json holds only deterministic quantities; wall-clock goes to timings.json.
void write_metrics(const std::filesystem::path& dir, const nlohmann::json& base_case_info,
                   std::span<const ScenarioResult> results);
void write_timings(const std::filesystem::path& dir, const nlohmann::json& timings);

}  // namespace gridtwin
