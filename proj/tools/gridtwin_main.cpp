// gridtwin command-line entry point.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "gridtwin/cae.hpp"
#include "gridtwin/config.hpp"
#include "gridtwin/error.hpp"
#include "gridtwin/logging.hpp"
#include "gridtwin/report.hpp"
#include "gridtwin/run.hpp"

using namespace gridtwin;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitViolations = 1;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitSolver = 4;

struct Flags {
    std::string config;
    std::string network;
    std::string measurements;
    std::string out;
    std::string at;
    std::string from;
    std::string to;
    std::string contingency;
    std::string run_dir;
    std::optional<double> scale;
    std::optional<int> jobs;
    bool check = true;
};

RunConfig resolve(const Flags& f) {
    RunConfig c = f.config.empty() ? default_config() : load_config(f.config);
    if (!f.network.empty()) c.network = f.network;
    if (!f.measurements.empty()) c.measurements = f.measurements;
    if (!f.out.empty()) c.output = f.out;
    if (f.jobs) c.jobs = *f.jobs;
    if (c.network.empty()) throw ConfigError("no network given (--network or config)");
    validate_config(c, false);
    return c;
}

Inputs inputs(const RunConfig& c) {
    if (c.measurements.empty()) throw ConfigError("no measurements given (--measurements or config)");
    return load_inputs(c.network, c.measurements, c.gap_policy, c.power_factors);
}

const OperatingPoint& point_at(const Inputs& in, const std::string& at) {
    if (at.empty()) throw ConfigError("--at is required");
    const Timestamp t = parse_timestamp(at);
    const auto& pts = in.points.points;
    const auto it = std::find_if(pts.begin(), pts.end(), [&](const OperatingPoint& p) { return p.timestamp == t; });
    if (it == pts.end()) throw DataError(fmt::format("no complete operating point at {}", format_timestamp(t)));
    return *it;
}

void print_solution(const Network& net, const PowerFlowSolution& sol) {
    fmt::print("timestamp {}  iterations {}  max mismatch {:.3e} p.u.\n", format_timestamp(sol.timestamp),
               sol.iterations, sol.max_mismatch_pu);
    fmt::print("external grid: P {:.4f} MW, Q {:.4f} MVAr\n\n", sol.p_ext_mw, sol.q_ext_mvar);
    fmt::print("{:>6} {:<18} {:>10} {:>10}\n", "bus", "name", "vm_pu", "va_deg");
    for (const auto& b : sol.buses) {
        fmt::print("{:>6} {:<18} {:>10.5f} {:>10.4f}\n", b.id, net.bus(b.id).name, b.vm_pu, b.va_rad * 180.0 / M_PI);
    }
    fmt::print("\n{:<10} {:>10} {:>10} {:>10} {:>10}\n", "branch", "i_ka", "p_from_mw", "q_from_mvar", "loading_%");
    for (const auto& br : sol.branches) {
        fmt::print("{:<10} {:>10.5f} {:>10.4f} {:>10.4f} {:>10.2f}\n", br.ref.to_string(), br.i_ka, br.p_from_mw,
                   br.q_from_mvar, br.loading_percent);
    }
}

int cmd_validate(const Flags& f) {
    const RunConfig c = resolve(f);
    const Network net = load_network_file(c.network);
    fmt::print("network ok: {} buses, {} lines, {} transformers, {} in-service branches\n", net.buses.size(),
               net.lines.size(), net.transformers.size(), net.in_service_branch_count());
    if (!c.measurements.empty()) {
        const Inputs in = inputs(c);
        fmt::print("measurements ok: {} operating points, {} dropped timestamps, {} gap events\n",
                   in.points.points.size(), in.points.dropped.size(), in.aggregation.gaps.size());
    }
    return kExitOk;
}

int cmd_powerflow(const Flags& f) {
    const RunConfig c = resolve(f);
    const Inputs in = inputs(c);
    OperatingPoint point = scale_loads(point_at(in, f.at), f.scale.value_or(1.0));
    Network net = in.network;
    if (!f.contingency.empty()) {
        const auto outage = apply_outage(net, BranchRef::parse(f.contingency));
        net = outage.network;
    }
    const PowerFlowSolution sol = solve_power_flow(net, point, c.redispatch.power_flow);
    print_solution(net, sol);
    return kExitOk;
}

int cmd_assess(const Flags& f) {
    const RunConfig c = resolve(f);
    const Inputs in = inputs(c);
    const AdmittanceMatrix y = build_admittance(in.network);
    std::optional<Timestamp> from, to;
    if (!f.at.empty()) from = to = parse_timestamp(f.at);
    if (!f.from.empty()) from = parse_timestamp(f.from);
    if (!f.to.empty()) to = parse_timestamp(f.to);

    std::ofstream out;
    if (!f.out.empty()) {
        out.open(f.out);
        if (!out) throw Error(fmt::format("cannot write {}", f.out));
    }
    std::size_t assessed = 0, violated = 0, failed = 0;
    for (const auto& p : in.points.points) {
        if ((from && p.timestamp < *from) || (to && p.timestamp > *to)) continue;
        ++assessed;
        const OperatingPoint point = scale_loads(p, f.scale.value_or(1.0));
        try {
            const auto sol = solve_power_flow(in.network, y, point, c.redispatch.power_flow);
            const ViolationReport report = assess(sol, c.redispatch.limits);
            if (report.secure()) continue;
            ++violated;
            fmt::print("{}\n", summarize(report));
            if (out) out << to_json(report).dump() << '\n';
        } catch (const PowerFlowError& e) {
            ++failed;
            fmt::print("{} power flow failed: {}\n", format_timestamp(p.timestamp), e.what());
        }
    }
    if (assessed == 0) throw DataError("no operating point in the requested range");
    fmt::print("assessed {} operating point(s): {} with violations, {} not solved\n", assessed, violated, failed);
    if (failed > 0) return kExitSolver;
    return violated > 0 && f.check ? kExitViolations : kExitOk;
}

int cmd_contingency(const Flags& f) {
    const RunConfig c = resolve(f);
    const Inputs in = inputs(c);
    const OperatingPoint point = scale_loads(point_at(in, f.at), f.scale.value_or(1.0));
    std::vector<ContingencyCase> cases;
    if (f.contingency.empty()) {
        cases = run_contingency_sweep(in.network, point, c.redispatch.limits, c.redispatch.power_flow, c.jobs);
    } else {
        cases.push_back(assess_contingency(in.network, point, BranchRef::parse(f.contingency), c.redispatch.limits,
                                           c.redispatch.power_flow));
    }
    std::ofstream out;
    if (!f.out.empty()) {
        out.open(f.out);
        if (!out) throw Error(fmt::format("cannot write {}", f.out));
    }
    fmt::print("{}\n", kContingencySummaryHeader);
    std::size_t violated = 0;
    for (const auto& cc : cases) {
        write_summary_row(std::cout, point.timestamp, cc);
        if (out) out << to_json(cc).dump() << '\n';
        violated += cc.outcome == CaseOutcome::violations;
    }
    fmt::print("{} case(s), {} with violations\n", cases.size(), violated);
    return violated > 0 && f.check ? kExitViolations : kExitOk;
}

int cmd_redispatch(const Flags& f) {
    const RunConfig c = resolve(f);
    const Inputs in = inputs(c);
    const OperatingPoint& base_point = point_at(in, f.at);
    // The import to hold is the unscaled, pre-contingency one.
    const double p_ext = solve_power_flow(in.network, base_point, c.redispatch.power_flow).p_ext_mw;
    const OperatingPoint point = scale_loads(base_point, f.scale.value_or(1.0));

    Network net = in.network;
    ActivationMode mode = ActivationMode::corrective();
    if (!f.contingency.empty()) {
        const BranchRef ref = BranchRef::parse(f.contingency);
        net = apply_outage(net, ref).network;
        mode = ActivationMode::preventive(ref);
    }
    const RedispatchProblem pb = build_problem(net, point, mode, p_ext, c.redispatch);
    const SetpointSchedule sch = solve_and_verify(pb);
    const std::string text = to_json(sch).dump(2);
    if (f.out.empty()) {
        fmt::print("{}\n", text);
    } else {
        std::ofstream out(f.out);
        out << text << '\n';
        fmt::print("{}: {} (objective {:.6g}, {} iterations)\n", mode.to_string(), to_string(sch.status),
                   sch.objective, sch.iterations);
    }
    return sch.status == ScheduleStatus::optimal ? kExitOk : kExitSolver;
}

int cmd_run(const Flags& f) {
    RunConfig c = resolve(f);
    if (f.scale) c.scenarios = {{"scaled", *f.scale, true, false, true}};
    const RunOutcome outcome = execute_run(c);
    for (const auto& s : outcome.scenarios) {
        const auto& m = s.metrics;
        fmt::print("{}: {} points, {:.2f}% violated, corrective {}/{} optimal, import reduction {:.3f} MWh\n",
                   s.scenario.name, m.operating_points, m.violation_rate_percent, m.corrective.optimal,
                   m.corrective.requested, m.import_reduction_mwh);
    }
    fmt::print("results in {}\n", c.output.string());
    return kExitOk;
}

int cmd_report(const Flags& f) {
    if (f.run_dir.empty()) throw ConfigError("--run is required");
    const std::string out = f.out.empty() ? f.run_dir : f.out;
    write_report(f.run_dir, out);
    fmt::print("report written to {}\n", out);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    setup_logging();
    CLI::App app{"Digital twin engine for distribution-network security assessment"};
    app.require_subcommand(1);
    Flags f;

    const auto common = [&](CLI::App* sub) {
        sub->add_option("--config", f.config, "JSON run configuration");
        sub->add_option("--network", f.network, "network document (JSON)");
        sub->add_option("--measurements", f.measurements, "feeder measurements (CSV)");
        sub->add_option("--jobs", f.jobs, "worker threads")->check(CLI::Range(1, 256));
    };
    const auto check_flag = [&](CLI::App* sub) {
        sub->add_flag("--check,!--no-check", f.check, "exit 1 when violations are found (default on)");
    };

    auto* validate = app.add_subcommand("validate", "check network and measurement inputs");
    common(validate);

    auto* powerflow = app.add_subcommand("powerflow", "solve one timestamp and print the solution");
    common(powerflow);
    powerflow->add_option("--at", f.at, "timestamp")->required();
    powerflow->add_option("--scale", f.scale, "load scaling factor")->check(CLI::PositiveNumber);
    powerflow->add_option("--contingency", f.contingency, "outaged element, e.g. line:3");

    auto* assess_cmd = app.add_subcommand("assess", "security assessment over a time range");
    common(assess_cmd);
    assess_cmd->add_option("--at", f.at, "single timestamp");
    assess_cmd->add_option("--from", f.from, "first timestamp");
    assess_cmd->add_option("--to", f.to, "last timestamp");
    assess_cmd->add_option("--scale", f.scale, "load scaling factor")->check(CLI::PositiveNumber);
    assess_cmd->add_option("--out", f.out, "write violation reports (JSON lines)");
    check_flag(assess_cmd);

    auto* contingency = app.add_subcommand("contingency", "N-1 sweep at one timestamp");
    common(contingency);
    contingency->add_option("--at", f.at, "timestamp")->required();
    contingency->add_option("--scale", f.scale, "load scaling factor")->check(CLI::PositiveNumber);
    contingency->add_option("--contingency", f.contingency, "assess only this element");
    contingency->add_option("--out", f.out, "write cases (JSON lines)");
    check_flag(contingency);

    auto* redispatch = app.add_subcommand("redispatch", "corrective or preventive redispatch at one timestamp");
    common(redispatch);
    redispatch->add_option("--at", f.at, "timestamp")->required();
    redispatch->add_option("--scale", f.scale, "load scaling factor")->check(CLI::PositiveNumber);
    redispatch->add_option("--contingency", f.contingency, "preventive activation for this outage");
    redispatch->add_option("--out", f.out, "write the schedule (JSON)");

    auto* run = app.add_subcommand("run", "run the configured scenarios end to end");
    common(run);
    run->add_option("--out", f.out, "run directory");
    run->add_option("--scale", f.scale, "run a single scenario at this load scale")->check(CLI::PositiveNumber);

    auto* report = app.add_subcommand("report", "regenerate summaries and plot data from a run directory");
    report->add_option("--run", f.run_dir, "run directory")->required();
    report->add_option("--out", f.out, "output directory (default: the run directory)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*validate) return cmd_validate(f);
        if (*powerflow) return cmd_powerflow(f);
        if (*assess_cmd) return cmd_assess(f);
        if (*contingency) return cmd_contingency(f);
        if (*redispatch) return cmd_redispatch(f);
        if (*run) return cmd_run(f);
        if (*report) return cmd_report(f);
    } catch (const ConfigError& e) {
        fmt::print(std::cerr, "error: {}\n", e.what());
        return kExitUsage;
    } catch (const DataError& e) {
        fmt::print(std::cerr, "data error: {}\n", e.what());
        return kExitData;
    } catch (const TopologyError& e) {
        fmt::print(std::cerr, "topology error: {}\n", e.what());
        return kExitData;
    } catch (const ProblemError& e) {
        fmt::print(std::cerr, "data error: {}\n", e.what());
        return kExitData;
    } catch (const PowerFlowError& e) {
        fmt::print(std::cerr, "solver failure: {}\n", e.what());
        return kExitSolver;
    } catch (const BaseCaseError& e) {
        fmt::print(std::cerr, "solver failure: {}\n", e.what());
        return kExitSolver;
    } catch (const Error& e) {
        fmt::print(std::cerr, "error: {}\n", e.what());
        return kExitData;
    } catch (const std::exception& e) {
        fmt::print(std::cerr, "internal error: {}\n", e.what());
        return kExitSolver;
    }
    return kExitUsage;
}
