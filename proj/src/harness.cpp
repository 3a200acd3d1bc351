#include "gridtwin/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <spdlog/spdlog.h>

namespace gridtwin {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

/// File-name friendly timestamp, e.g. 20240601T1200Z.
std::string compact(Timestamp t) {
    std::string s = format_timestamp(t);  // YYYY-MM-DDTHH:MM:SSZ
    std::string out;
    for (char c : s.substr(0, 16)) {
        if (c != '-' && c != ':') out += c;
    }
    return out + "Z";
}

std::string setpoint_file(const std::string& scenario, const SetpointSchedule& s) {
    std::string mode = s.mode.kind == ActivationKind::corrective ? "corrective" : "preventive";
    if (s.mode.element) {
        std::string el = s.mode.element->to_string();
        std::replace(el.begin(), el.end(), ':', '-');
        mode += "_" + el;
    }
    return fmt::format("{}_{}_{}.json", scenario, compact(s.timestamp), mode);
}

void count(ActivationCounts& c, const SetpointSchedule& s) {
    ++c.requested;
    switch (s.status) {
        case ScheduleStatus::optimal:
            ++c.optimal;
            if (s.verification.performed && s.verification.violations == 0) ++c.verified_secure;
            break;
        case ScheduleStatus::infeasible: ++c.infeasible; break;
        case ScheduleStatus::solver_failure: ++c.solver_failure; break;
    }
}

std::vector<GeneratorDeltaSummary> delta_summaries(const Network& net, const std::vector<const SetpointSchedule*>& schedules,
                                                   double threshold) {
    std::map<ElementId, std::pair<std::vector<double>, std::vector<double>>> per_gen;
    for (const auto* s : schedules) {
        if (s->status != ScheduleStatus::optimal) continue;
        for (const auto& sp : s->setpoints) {
            per_gen[sp.id].first.push_back(sp.delta_p_mw());
            per_gen[sp.id].second.push_back(sp.delta_q_mvar());
        }
    }
    std::vector<GeneratorDeltaSummary> out;
    for (const auto& g : net.generators) {
        GeneratorDeltaSummary s;
        s.generator = g.id;
        const auto it = per_gen.find(g.id);
        if (it != per_gen.end()) {
            s.delta_p_mw = compute_distribution_summary(it->second.first, threshold);
            s.delta_q_mvar = compute_distribution_summary(it->second.second, threshold);
        }
        out.push_back(s);
    }
    return out;
}

nlohmann::json to_json(const ActivationCounts& c) {
    return {{"requested", c.requested},           {"optimal", c.optimal},
            {"infeasible", c.infeasible},         {"solver_failure", c.solver_failure},
            {"problem_error", c.problem_error},   {"verified_secure", c.verified_secure}};
}

nlohmann::json to_json(const std::vector<GeneratorDeltaSummary>& v) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& s : v) {
        arr.push_back({{"generator", s.generator},
                       {"delta_p_mw", to_json(s.delta_p_mw)},
                       {"delta_q_mvar", to_json(s.delta_q_mvar)}});
    }
    return arr;
}

double percent(std::size_t part, std::size_t whole) {
    return whole == 0 ? 0.0 : 100.0 * static_cast<double>(part) / static_cast<double>(whole);
}

std::vector<BusEnvelope> envelope(const std::vector<ElementId>& ids, const std::vector<TimestampRecord>& records,
                                  bool secured) {
    std::vector<BusEnvelope> env(ids.size());
    for (std::size_t b = 0; b < ids.size(); ++b) {
        env[b] = {ids[b], std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    }
    bool any = false;
    for (const auto& r : records) {
        const auto& vm = secured ? r.vm_secured : r.vm_assessed;
        if (vm.size() != ids.size()) continue;
        any = true;
        for (std::size_t b = 0; b < ids.size(); ++b) {
            env[b].min_v = std::min(env[b].min_v, vm[b]);
            env[b].max_v = std::max(env[b].max_v, vm[b]);
        }
    }
    if (!any) return {};
    return env;
}

std::ofstream open_append(const std::filesystem::path& p) {
    std::ofstream out(p, std::ios::app);
    if (!out) throw Error(fmt::format("cannot write {}", p.string()));
    return out;
}

}  // namespace

OperatingPoint scale_loads(OperatingPoint point, double scale) {
    for (auto& l : point.loads) {
        l.p_mw *= scale;
        l.q_mvar *= scale;
    }
    return point;
}

BaseCase build_base_case(const Network& network, std::vector<OperatingPoint> points, const HarnessOptions& options) {
    struct Item {
        OperatingPoint point;
        double p_ext = 0.0;
        std::optional<BaseCaseAdjustment> adjustment;
        std::string failure;
    };
    const AdmittanceMatrix y = build_admittance(network);
    const auto& cfg = options.redispatch;

    auto items = parallel_map(
        points.size(), options.jobs,
        [&](std::size_t i) {
            Item item;
            item.point = std::move(points[i]);
            PowerFlowSolution sol;
            try {
                sol = solve_power_flow(network, y, item.point, cfg.power_flow);
            } catch (const PowerFlowError& e) {
                item.failure = e.what();
                return item;
            }
            item.p_ext = sol.p_ext_mw;
            const ViolationReport report = assess(sol, cfg.limits);
            if (report.secure()) return item;

            try {
                const RedispatchProblem pb =
                    build_problem(network, item.point, ActivationMode::corrective(), sol.p_ext_mw, cfg);
                SetpointSchedule sch = solve_and_verify(pb);
                if (sch.status != ScheduleStatus::optimal) {
                    item.failure = fmt::format("{}: {}", to_string(sch.status), sch.message);
                    return item;
                }
                item.point = apply_schedule(network, item.point, sch);
                item.adjustment = BaseCaseAdjustment{item.point.timestamp, summarize(report), std::move(sch)};
            } catch (const ProblemError& e) {
                item.failure = e.what();
            }
            return item;
        },
        options.progress);

    BaseCase base;
    std::vector<Timestamp> failed;
    std::string first_reason;
    for (auto& item : items) {
        if (!item.failure.empty()) {
            if (failed.empty()) first_reason = item.failure;
            failed.push_back(item.point.timestamp);
            continue;
        }
        base.p_ext_mw.push_back(item.p_ext);
        if (item.adjustment) base.adjustments.push_back(std::move(*item.adjustment));
        base.points.push_back(std::move(item.point));
    }
    if (!failed.empty()) {
        std::string list;
        for (std::size_t i = 0; i < failed.size() && i < 10; ++i) list += (i ? ", " : "") + format_timestamp(failed[i]);
        if (failed.size() > 10) list += fmt::format(" and {} more", failed.size() - 10);
        std::string message = fmt::format("Base Case cannot be secured at {} timestamp(s): {} (first: {})",
                                          failed.size(), list, first_reason);
        throw BaseCaseError(std::move(message), std::move(failed));
    }
    spdlog::info("base case: {} points, {} adjusted", base.points.size(), base.adjustments.size());
    return base;
}

DistributionSummary compute_distribution_summary(std::span<const double> deltas, double threshold) {
    DistributionSummary s;
    s.samples = deltas.size();
    std::vector<double> v;
    for (double d : deltas) {
        if (std::abs(d) > threshold) v.push_back(d);
    }
    s.activations = v.size();
    if (v.empty()) return s;
    s.no_activation = false;
    std::sort(v.begin(), v.end());
    const auto quantile = [&](double q) {
        const double h = q * static_cast<double>(v.size() - 1);
        const auto lo = static_cast<std::size_t>(std::floor(h));
        const std::size_t hi = std::min(lo + 1, v.size() - 1);
        return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
    };
    s.min = v.front();
    s.max = v.back();
    s.q1 = quantile(0.25);
    s.median = quantile(0.5);
    s.q3 = quantile(0.75);
    double sum = 0.0;
    for (double d : v) sum += d;
    s.mean = sum / static_cast<double>(v.size());
    return s;
}

nlohmann::json to_json(const DistributionSummary& s) {
    nlohmann::json doc{{"samples", s.samples}, {"activations", s.activations}, {"no_activation", s.no_activation}};
    if (!s.no_activation) {
        doc["min"] = s.min;
        doc["q1"] = s.q1;
        doc["median"] = s.median;
        doc["q3"] = s.q3;
        doc["max"] = s.max;
        doc["mean"] = s.mean;
    }
    return doc;
}

nlohmann::json to_json(const RunMetrics& m) {
    nlohmann::json doc;
    doc["operating_points"] = m.operating_points;
    doc["violated_points"] = m.violated_points;
    doc["violation_rate_percent"] = m.violation_rate_percent;
    doc["overvoltage_rate_percent"] = m.overvoltage_rate_percent;
    doc["undervoltage_rate_percent"] = m.undervoltage_rate_percent;
    doc["thermal_rate_percent"] = m.thermal_rate_percent;
    doc["power_flow_failures"] = m.power_flow_failures;
    doc["max_voltage_pu"] = m.max_voltage_pu;
    doc["min_voltage_pu"] = m.min_voltage_pu;
    doc["max_loading_percent"] = m.max_loading_percent;
    doc["corrective"] = to_json(m.corrective);
    doc["corrective_deltas"] = to_json(m.corrective_deltas);
    doc["import_without_smfae_mwh"] = m.import_without_smfae_mwh;
    doc["import_with_smfae_mwh"] = m.import_with_smfae_mwh;
    doc["import_reduction_mwh"] = m.import_reduction_mwh;
    if (m.cae_enabled) {
        nlohmann::json cae;
        cae["timestamps"] = m.cae_timestamps;
        cae["cases"] = m.cae_cases;
        cae["violated_cases"] = m.cae_violated_cases;
        cae["violated_timestamps"] = m.cae_violated_timestamps;
        cae["case_violation_rate_percent"] = m.cae_case_violation_rate_percent;
        cae["timestamp_violation_rate_percent"] = m.cae_timestamp_violation_rate_percent;
        cae["diverged"] = m.cae_diverged;
        cae["degenerate_topology"] = m.cae_degenerate;
        cae["max_voltage_pu"] = m.cae_max_voltage_pu;
        cae["min_voltage_pu"] = m.cae_min_voltage_pu;
        cae["max_loading_percent"] = m.cae_max_loading_percent;
        cae["preventive"] = to_json(m.preventive);
        cae["preventive_deltas"] = to_json(m.preventive_deltas);
        doc["contingency"] = cae;
    }
    return doc;
}

ScenarioResult run_scenario(const Network& network, const BaseCase& base, const Scenario& scenario,
                            const HarnessOptions& options) {
    if (!(scenario.load_scale > 0.0)) throw ConfigError(fmt::format("scenario {}: load_scale must be positive", scenario.name));
    const auto& cfg = options.redispatch;
    const AdmittanceMatrix y = build_admittance(network);

    ScenarioResult result;
    result.scenario = scenario;

    struct Timed {
        TimestampRecord record;
        double rsae = 0.0;
        double smfae = 0.0;
    };
    if (scenario.rsae) {
        auto timed = parallel_map(
            base.points.size(), options.jobs,
            [&](std::size_t i) {
                Timed t;
                auto& r = t.record;
                const auto start = Clock::now();
                const OperatingPoint point = scale_loads(base.points[i], scenario.load_scale);
                r.timestamp = point.timestamp;
                r.report.timestamp = point.timestamp;
                PowerFlowSolution sol;
                try {
                    sol = solve_power_flow(network, y, point, cfg.power_flow);
                } catch (const PowerFlowError& e) {
                    r.failure = e.what();
                    t.rsae = seconds_since(start);
                    return t;
                }
                r.solved = true;
                r.report = assess(sol, cfg.limits);
                r.p_ext_without_mw = sol.p_ext_mw;
                r.p_ext_with_mw = sol.p_ext_mw;
                r.vm_assessed = to_std(sol.vm());
                r.vm_secured = r.vm_assessed;
                for (const auto& br : sol.branches) {
                    r.max_loading_percent = std::max(r.max_loading_percent, br.loading_percent);
                }
                t.rsae = seconds_since(start);
                if (r.report.secure() || !scenario.smfae) return t;

                const auto opt_start = Clock::now();
                try {
                    const RedispatchProblem pb =
                        build_problem(network, point, ActivationMode::corrective(), base.p_ext_mw[i], cfg);
                    SetpointSchedule sch = solve_and_verify(pb);
                    if (sch.status == ScheduleStatus::optimal) {
                        r.p_ext_with_mw = sch.p_ext_mw;
                        r.vm_secured = to_std(sch.vm);
                    }
                    r.schedule = std::move(sch);
                } catch (const ProblemError& e) {
                    r.failure = e.what();
                }
                t.smfae = seconds_since(opt_start);
                return t;
            },
            options.progress);

        for (auto& t : timed) {
            result.rsae_seconds += t.rsae;
            result.smfae_seconds += t.smfae;
            result.timestamps.push_back(std::move(t.record));
        }
    }

    if (scenario.cae) {
        const int stride = std::max(1, options.cae_stride);
        std::vector<std::size_t> picks;
        for (std::size_t i = 0; i < base.points.size(); i += static_cast<std::size_t>(stride)) picks.push_back(i);
        struct TimedCases {
            std::vector<ContingencyRecord> records;
            double cae = 0.0;
            double smfae = 0.0;
        };
        auto timed = parallel_map(picks.size(), options.jobs, [&](std::size_t k) {
            TimedCases out;
            const std::size_t i = picks[k];
            const OperatingPoint& point = base.points[i];
            const auto start = Clock::now();
            auto cases = run_contingency_sweep(network, point, cfg.limits, cfg.power_flow, 1);
            out.cae = seconds_since(start);
            for (auto& c : cases) {
                ContingencyRecord rec;
                rec.timestamp = point.timestamp;
                if (c.outcome == CaseOutcome::violations && scenario.smfae) {
                    const auto opt_start = Clock::now();
                    try {
                        const OutageResult outage = apply_outage(network, c.element);
                        const RedispatchProblem pb = build_problem(
                            outage.network, point, ActivationMode::preventive(c.element), base.p_ext_mw[i], cfg);
                        rec.schedule = solve_and_verify(pb);
                    } catch (const Error& e) {
                        rec.failure = e.what();
                    }
                    out.smfae += seconds_since(opt_start);
                }
                rec.c = std::move(c);
                out.records.push_back(std::move(rec));
            }
            return out;
        });
        for (auto& t : timed) {
            result.cae_seconds += t.cae;
            result.smfae_seconds += t.smfae;
            for (auto& r : t.records) result.contingencies.push_back(std::move(r));
        }
    }

    // Metrics, merged in timestamp order.
    RunMetrics& m = result.metrics;
    m.operating_points = result.timestamps.size();
    std::size_t over = 0, under = 0, thermal = 0;
    m.max_voltage_pu = -std::numeric_limits<double>::infinity();
    m.min_voltage_pu = std::numeric_limits<double>::infinity();
    std::vector<const SetpointSchedule*> corrective;
    for (const auto& r : result.timestamps) {
        if (!r.solved) {
            ++m.power_flow_failures;
            continue;
        }
        m.max_loading_percent = std::max(m.max_loading_percent, r.max_loading_percent);
        for (double v : r.vm_assessed) {
            m.max_voltage_pu = std::max(m.max_voltage_pu, v);
            m.min_voltage_pu = std::min(m.min_voltage_pu, v);
        }
        if (!r.report.secure()) {
            ++m.violated_points;
            bool o = false, u = false, th = false;
            for (const auto& v : r.report.violations) {
                o |= v.kind == ViolationKind::overvoltage;
                u |= v.kind == ViolationKind::undervoltage;
                th |= v.kind == ViolationKind::thermal;
            }
            over += o;
            under += u;
            thermal += th;
            if (scenario.smfae) {
                if (r.schedule) {
                    count(m.corrective, *r.schedule);
                    corrective.push_back(&*r.schedule);
                } else {
                    ++m.corrective.requested;
                    ++m.corrective.problem_error;
                }
            }
        }
        m.import_without_smfae_mwh += r.p_ext_without_mw * kIntervalHours;
        m.import_with_smfae_mwh += r.p_ext_with_mw * kIntervalHours;
    }
    if (!std::isfinite(m.max_voltage_pu)) m.max_voltage_pu = 0.0;
    if (!std::isfinite(m.min_voltage_pu)) m.min_voltage_pu = 0.0;
    m.violation_rate_percent = percent(m.violated_points, m.operating_points);
    m.overvoltage_rate_percent = percent(over, m.operating_points);
    m.undervoltage_rate_percent = percent(under, m.operating_points);
    m.thermal_rate_percent = percent(thermal, m.operating_points);
    m.import_reduction_mwh = m.import_without_smfae_mwh - m.import_with_smfae_mwh;
    m.corrective_deltas = delta_summaries(network, corrective, options.activation_threshold_mw);

    if (scenario.cae) {
        m.cae_enabled = true;
        m.cae_max_voltage_pu = -std::numeric_limits<double>::infinity();
        m.cae_min_voltage_pu = std::numeric_limits<double>::infinity();
        std::vector<const SetpointSchedule*> preventive;
        std::optional<Timestamp> last;
        bool last_violated = false;
        for (const auto& rec : result.contingencies) {
            if (!last || *last != rec.timestamp) {
                ++m.cae_timestamps;
                last = rec.timestamp;
                last_violated = false;
            }
            ++m.cae_cases;
            const auto& c = rec.c;
            switch (c.outcome) {
                case CaseOutcome::violations:
                    ++m.cae_violated_cases;
                    if (!last_violated) ++m.cae_violated_timestamps;
                    last_violated = true;
                    break;
                case CaseOutcome::diverged: ++m.cae_diverged; break;
                case CaseOutcome::degenerate_topology: ++m.cae_degenerate; break;
                case CaseOutcome::secure: break;
            }
            if (c.outcome == CaseOutcome::secure || c.outcome == CaseOutcome::violations) {
                m.cae_max_voltage_pu = std::max(m.cae_max_voltage_pu, c.max_voltage_pu);
                m.cae_min_voltage_pu = std::min(m.cae_min_voltage_pu, c.min_voltage_pu);
                m.cae_max_loading_percent = std::max(m.cae_max_loading_percent, c.worst_loading_percent);
            }
            if (c.outcome == CaseOutcome::violations && scenario.smfae) {
                if (rec.schedule) {
                    count(m.preventive, *rec.schedule);
                    preventive.push_back(&*rec.schedule);
                } else {
                    ++m.preventive.requested;
                    ++m.preventive.problem_error;
                }
            }
        }
        if (!std::isfinite(m.cae_max_voltage_pu)) m.cae_max_voltage_pu = 0.0;
        if (!std::isfinite(m.cae_min_voltage_pu)) m.cae_min_voltage_pu = 0.0;
        m.cae_case_violation_rate_percent = percent(m.cae_violated_cases, m.cae_cases);
        m.cae_timestamp_violation_rate_percent = percent(m.cae_violated_timestamps, m.cae_timestamps);
        m.preventive_deltas = delta_summaries(network, preventive, options.activation_threshold_mw);
    }

    result.envelope_assessed = envelope(y.bus_ids(), result.timestamps, false);
    result.envelope_secured = envelope(y.bus_ids(), result.timestamps, true);
    return result;
}

void begin_run_directory(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    fs::remove_all(dir / "setpoints");
    fs::create_directories(dir / "setpoints");
    const auto fresh = [&](const char* name, std::string_view header) {
        std::ofstream out(dir / name, std::ios::trunc);
        if (!out) throw Error(fmt::format("cannot write {}", (dir / name).string()));
        if (!header.empty()) out << header << '\n';
    };
    fresh("violations.jsonl", "");
    fresh("contingencies.jsonl", "");
    fresh("base_case_adjustments.jsonl", "");
    fresh("deltas.csv", "scenario,timestamp,mode,generator,delta_p_mw,delta_q_mvar");
    fresh("import_comparison.csv", "scenario,timestamp,p_ext_without_mw,p_ext_with_mw,reduction_mwh");
    fresh("envelopes.csv", "scenario,stage,bus,min_v,max_v");
    fresh("contingency_summary.csv", fmt::format("scenario,{}", kContingencySummaryHeader));
}

void write_base_case_log(const std::filesystem::path& dir, const BaseCase& base) {
    auto out = open_append(dir / "base_case_adjustments.jsonl");
    for (const auto& a : base.adjustments) {
        nlohmann::json doc;
        doc["timestamp"] = format_timestamp(a.timestamp);
        doc["repaired"] = a.violations;
        doc["schedule"] = to_json(a.schedule);
        out << doc.dump() << '\n';
    }
}

void write_scenario_outputs(const std::filesystem::path& dir, const Network& network, const ScenarioResult& result) {
    (void)network;
    const std::string& name = result.scenario.name;
    auto violations = open_append(dir / "violations.jsonl");
    auto deltas = open_append(dir / "deltas.csv");
    auto imports = open_append(dir / "import_comparison.csv");
    auto envelopes = open_append(dir / "envelopes.csv");
    auto contingencies = open_append(dir / "contingencies.jsonl");
    auto summary = open_append(dir / "contingency_summary.csv");

    const auto write_schedule = [&](const SetpointSchedule& s) {
        const std::string file = setpoint_file(name, s);
        std::ofstream out(dir / "setpoints" / file);
        nlohmann::json doc = to_json(s);
        doc["scenario"] = name;
        out << doc.dump(2) << '\n';
        if (s.status == ScheduleStatus::optimal) {
            for (const auto& sp : s.setpoints) {
                fmt::print(deltas, "{},{},{},{},{},{}\n", name, format_timestamp(s.timestamp), s.mode.to_string(), sp.id,
                           sp.delta_p_mw(), sp.delta_q_mvar());
            }
        }
        return file;
    };

    for (const auto& r : result.timestamps) {
        if (r.solved) {
            fmt::print(imports, "{},{},{},{},{}\n", name, format_timestamp(r.timestamp), r.p_ext_without_mw,
                       r.p_ext_with_mw, (r.p_ext_without_mw - r.p_ext_with_mw) * kIntervalHours);
        }
        if (r.solved && r.report.secure()) continue;
        nlohmann::json doc = r.solved ? to_json(r.report) : nlohmann::json{{"timestamp", format_timestamp(r.timestamp)}};
        doc["scenario"] = name;
        if (!r.failure.empty()) doc["failure"] = r.failure;
        if (r.schedule) {
            doc["redispatch"] = {{"status", to_string(r.schedule->status)}, {"file", write_schedule(*r.schedule)}};
        }
        violations << doc.dump() << '\n';
    }

    for (const auto& rec : result.contingencies) {
        summary << name << ',';
        write_summary_row(summary, rec.timestamp, rec.c);
        if (rec.c.outcome == CaseOutcome::secure) continue;
        nlohmann::json doc = to_json(rec.c);
        doc["scenario"] = name;
        if (!rec.failure.empty()) doc["failure"] = rec.failure;
        if (rec.schedule) {
            doc["redispatch"] = {{"status", to_string(rec.schedule->status)}, {"file", write_schedule(*rec.schedule)}};
        }
        contingencies << doc.dump() << '\n';
    }

    const auto write_env = [&](const char* stage, const std::vector<BusEnvelope>& env) {
        for (const auto& e : env) fmt::print(envelopes, "{},{},{},{},{}\n", name, stage, e.bus, e.min_v, e.max_v);
    };
    write_env("assessed", result.envelope_assessed);
    write_env("secured", result.envelope_secured);
}

void write_metrics(const std::filesystem::path& dir, const nlohmann::json& base_case_info,
                   std::span<const ScenarioResult> results) {
    nlohmann::json doc;
    doc["base_case"] = base_case_info;
    nlohmann::json scenarios = nlohmann::json::array();
    for (const auto& r : results) {
        nlohmann::json s = to_json(r.metrics);
        s["name"] = r.scenario.name;
        s["load_scale"] = r.scenario.load_scale;
        s["engines"] = {{"rsae", r.scenario.rsae}, {"cae", r.scenario.cae}, {"smfae", r.scenario.smfae}};
        scenarios.push_back(s);
    }
    doc["scenarios"] = scenarios;
    std::ofstream out(dir / "metrics.json");
    if (!out) throw Error(fmt::format("cannot write {}", (dir / "metrics.json").string()));
    out << doc.dump(2) << '\n';
}

void write_timings(const std::filesystem::path& dir, const nlohmann::json& timings) {
    std::ofstream out(dir / "timings.json");
    out << timings.dump(2) << '\n';
}

}  // namespace gridtwin
