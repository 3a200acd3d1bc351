#include "gridtwin/run.hpp"

#include <chrono>
#include <fstream>

#include <spdlog/spdlog.h>

#include "gridtwin/report.hpp"

namespace gridtwin {

void fill_historical_maxima(Network& network, const Aggregation& aggregation) {
    bool missing = false;
    for (const auto& g : network.generators) missing |= g.in_service && !g.has_hist_max();
    if (!missing) return;
    const auto maxima = historical_max(network, aggregation);
    for (std::size_t k = 0; k < network.generators.size(); ++k) {
        auto& g = network.generators[k];
        if (g.in_service && !g.has_hist_max()) g.p_hist_max_mw = maxima[k];
    }
}

Inputs load_inputs(const std::filesystem::path& network_path, const std::filesystem::path& measurements_path,
                   GapPolicy policy, const PowerFactors& factors) {
    Inputs in;
    in.network = load_network_file(network_path);
    const auto records = parse_measurements_file(measurements_path);
    const auto required = required_substations(in.network);
    in.aggregation = aggregate_to_substation(records, policy, factors, required);
    fill_historical_maxima(in.network, in.aggregation);
    in.points = build_operating_points(in.network, in.aggregation);
    spdlog::info("ingested {} records -> {} operating points ({} dropped, {} gaps)", records.size(),
                 in.points.points.size(), in.points.dropped.size(), in.aggregation.gaps.size());
    return in;
}

RunOutcome execute_run(const RunConfig& config) {
    validate_config(config, true);
    using Clock = std::chrono::steady_clock;
    const auto t0 = Clock::now();
    Inputs in = load_inputs(config.network, config.measurements, config.gap_policy, config.power_factors);
    const double ingest_s = std::chrono::duration<double>(Clock::now() - t0).count();

    HarnessOptions options = config.harness_options();
    const auto t1 = Clock::now();
    RunOutcome out;
    out.base = build_base_case(in.network, in.points.points, options);
    const double base_s = std::chrono::duration<double>(Clock::now() - t1).count();

    begin_run_directory(config.output);
    write_base_case_log(config.output, out.base);

    nlohmann::json timings;
    timings["ingestion_seconds"] = ingest_s;
    timings["base_case_seconds"] = base_s;
    for (const auto& sc : config.scenarios) {
        spdlog::info("scenario {} (load x{})", sc.name, sc.load_scale);
        const auto ts = Clock::now();
        ScenarioResult r = run_scenario(in.network, out.base, sc, options);
        timings["scenarios"][sc.name] = {
            {"total_seconds", std::chrono::duration<double>(Clock::now() - ts).count()},
            {"rsae_seconds", r.rsae_seconds},
            {"smfae_seconds", r.smfae_seconds},
            {"cae_seconds", r.cae_seconds},
        };
        write_scenario_outputs(config.output, in.network, r);
        out.scenarios.push_back(std::move(r));
    }

    nlohmann::json info;
    info["operating_points"] = out.base.points.size();
    info["adjusted_points"] = out.base.adjustments.size();
    info["dropped_timestamps"] = in.points.dropped.size();
    info["gap_events"] = in.aggregation.gaps.size();
    info["gap_policy"] = std::string(to_string(config.gap_policy));
    double import_mwh = 0.0;
    for (double p : out.base.p_ext_mw) import_mwh += p * kIntervalHours;
    info["import_mwh"] = import_mwh;
    if (!out.base.points.empty()) {
        info["first_timestamp"] = format_timestamp(out.base.points.front().timestamp);
        info["last_timestamp"] = format_timestamp(out.base.points.back().timestamp);
    }
    write_metrics(config.output, info, out.scenarios);
    write_timings(config.output, timings);
    {
        std::ofstream cfg(config.output / "config.json");
        cfg << to_json(config).dump(2) << '\n';
    }
    write_report(config.output, config.output);
    return out;
}

}  // namespace gridtwin
