// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion,
// detail lines indented underneath; exits non-zero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "fixtures.hpp"
#include "gauss_seidel.hpp"
#include "gridtwin/cae.hpp"
#include "gridtwin/harness.hpp"
#include "gridtwin/logging.hpp"
#include "gridtwin/run.hpp"
#include "gridtwin/smfae.hpp"
#include "invariants.hpp"
#include "random_network.hpp"

using namespace gridtwin;
using namespace gridtwin::testing;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string read(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

// Collects the evidence for one criterion.
struct Verdict {
    bool pass = true;
    std::vector<std::string> notes;

    void require(bool ok, std::string what) {
        if (!ok) pass = false;
        notes.push_back((ok ? "ok    " : "FAIL  ") + std::move(what));
    }
    void note(std::string what) { notes.push_back("      " + std::move(what)); }
};

int failures = 0;

void report(int number, const char* title, const std::function<void(Verdict&)>& body) {
    Verdict v;
    try {
        body(v);
    } catch (const std::exception& e) {
        v.require(false, fmt::format("aborted: {}", e.what()));
    }
    std::printf("%s %d %s\n", v.pass ? "PASS" : "FAIL", number, title);
    for (const auto& n : v.notes) std::printf("    %s\n", n.c_str());
    std::fflush(stdout);
    if (!v.pass) ++failures;
}

// --- 1 ---------------------------------------------------------------------

void power_flow_correctness(Verdict& v) {
    const auto start = Clock::now();

    // Closed form of the lossless j0.1 p.u. feeder carrying P = 0.5 p.u.
    const double x = 0.1;
    const double p = 0.5;
    const double v2 = std::sqrt((1.0 + std::sqrt(1.0 - 4.0 * (x * p) * (x * p))) / 2.0);
    const double q_from = (1.0 - v2 * v2) / x;
    const auto two = solve_power_flow(two_bus(x), two_bus_point(p * 100.0, 0.0));
    const double dv = std::abs(two.buses[1].vm_pu - v2);
    const double ds = std::abs(two.branches[0].s_from_mva / 100.0 - std::hypot(p, q_from));
    v.require(dv <= 1e-8 && ds <= 1e-8, fmt::format("2-bus |V2| error {:.2e}, |S_from| error {:.2e} (<= 1e-8)", dv, ds));

    double worst = 0.0;
    int converged = 0;
    for (std::uint64_t seed = 1; seed <= 200; ++seed) {
        const auto c = random_case(seed);
        const auto gs = gauss_seidel(c.network, c.point);
        if (!gs.converged) continue;
        ++converged;
        const auto sol = solve_power_flow(c.network, c.point);
        for (std::size_t i = 0; i < sol.buses.size(); ++i) {
            const Complex vi = std::polar(sol.buses[i].vm_pu, sol.buses[i].va_rad);
            worst = std::max(worst, std::abs(vi - gs.v(static_cast<Eigen::Index>(i))));
        }
    }
    v.require(converged == 200 && worst <= 1e-6,
              fmt::format("{} of 200 random networks compared, max |V - V_gs| = {:.2e} (<= 1e-6)", converged, worst));

    Network bare = mini_bornholm();
    bare.shunts.clear();
    for (auto& l : bare.lines) l.c_nf_per_km = 0.0;
    const auto flat = solve_power_flow(bare, zero_point(bare));
    bool exact = true;
    for (const auto& b : flat.buses) exact = exact && b.vm_pu == bare.ext_grid.vm_pu && b.va_rad == 0.0;
    v.require(exact, "flat no-load case reproduces the slack voltage exactly at every bus");

    const double elapsed = seconds_since(start);
    v.require(elapsed < 5.0, fmt::format("suite time {:.3f} s (< 5 s)", elapsed));
}

// --- 2 ---------------------------------------------------------------------

void contingency_enumeration(Verdict& v) {
    const auto& week = fixture_week();
    const auto cases = enumerate_contingencies(week.network);
    std::size_t lines = 0;
    std::size_t trafos = 0;
    for (const auto& c : cases) (c.kind == BranchKind::line ? lines : trafos)++;
    v.require(cases.size() == 39 && lines == 23 && trafos == 16,
              fmt::format("{} cases: {} lines + {} transformers", cases.size(), lines, trafos));

    const auto& point = week.point("2024-06-01T12:00Z");
    const auto sweep = [&] {
        std::string text;
        for (const auto& c : run_contingency_sweep(week.network, point, {})) text += to_json(c).dump() + "\n";
        return text;
    };
    const std::string first = sweep();
    const std::string second = sweep();
    v.require(first == second, "two sweeps at 2024-06-01T12:00Z agree case by case, in order");
}

// --- 3 ---------------------------------------------------------------------

// Every optimal schedule produced in this process is re-checked here.
struct ScheduleLedger {
    std::size_t checked = 0;
    std::size_t breached = 0;
    std::vector<std::string> examples;

    void check(const SetpointSchedule& s, const RedispatchProblem& pb) {
        if (s.status != ScheduleStatus::optimal) return;
        ++checked;
        const auto breaches = schedule_invariant_breaches(s, pb);
        if (breaches.empty()) return;
        ++breached;
        if (examples.size() < 5) examples.push_back(format_timestamp(s.timestamp) + " " + breaches.front());
    }
};

ScheduleLedger ledger;

void redispatch_optimality(Verdict& v) {
    const auto c = three_bus_overvoltage();
    const double p_ext = solve_power_flow(c.network, c.point).p_ext_mw;
    const auto pb = build_problem(c.network, c.point, ActivationMode::corrective(), p_ext);
    const auto s = solve_and_verify(pb);
    v.require(s.status == ScheduleStatus::optimal, fmt::format("3-bus status {}", to_string(s.status)));
    const double bound = kThreeBusGridOptimum + 2 * kThreeBusResolutionBound;
    v.require(s.objective <= bound, fmt::format("objective {:.6f} <= grid optimum {:.6f} + 2 x {:.6f}", s.objective,
                                                kThreeBusGridOptimum, kThreeBusResolutionBound));
    ledger.check(s, pb);
}

// --- 4 ---------------------------------------------------------------------

struct ClosedLoop {
    std::size_t violated = 0;
    std::size_t optimal = 0;
    std::size_t secure = 0;
    double worst_slack = 0.0;
    std::map<std::string, std::size_t> other;
    std::vector<std::string> insecure;
};

// Fresh power flow and assessment of a schedule, independent of verify().
void recheck(ClosedLoop& loop, const RedispatchProblem& pb, const SetpointSchedule& s) {
    ++loop.optimal;
    const auto point = apply_schedule(pb.network, pb.point, s);
    const auto sol = solve_power_flow(pb.network, point);
    const auto rep = assess(sol, pb.config.limits, pb.mode.element);
    const double dev = std::abs(sol.p_ext_mw / pb.network.s_base_mva - pb.p_ext_fixed_pu);
    loop.worst_slack = std::max(loop.worst_slack, dev);
    if (rep.secure() && dev <= 1e-4) {
        ++loop.secure;
    } else if (loop.insecure.size() < 5) {
        loop.insecure.push_back(summarize(rep) + fmt::format(" slack dev {:.2e}", dev));
    }
}

void sweep_scenario(ClosedLoop& loop, const Network& net, const BaseCase& base, const Scenario& sc,
                    const HarnessOptions& options) {
    const auto r = run_scenario(net, base, sc, options);
    for (std::size_t i = 0; i < r.timestamps.size(); ++i) {
        const auto& t = r.timestamps[i];
        if (!t.schedule) continue;
        ++loop.violated;
        if (t.schedule->status != ScheduleStatus::optimal) {
            ++loop.other[std::string(to_string(t.schedule->status))];
            continue;
        }
        const auto pb = build_problem(net, scale_loads(base.points[i], sc.load_scale), ActivationMode::corrective(),
                                      base.p_ext_mw[i], options.redispatch);
        recheck(loop, pb, *t.schedule);
        ledger.check(*t.schedule, pb);
    }
    std::map<Timestamp, std::size_t> index;
    for (std::size_t i = 0; i < base.points.size(); ++i) index[base.points[i].timestamp] = i;
    for (const auto& rec : r.contingencies) {
        if (rec.c.outcome != CaseOutcome::violations || !rec.schedule) continue;
        ++loop.violated;
        if (rec.schedule->status != ScheduleStatus::optimal) {
            ++loop.other[std::string(to_string(rec.schedule->status))];
            continue;
        }
        const std::size_t i = index.at(rec.timestamp);
        const auto outage = apply_outage(net, rec.c.element);
        const auto pb = build_problem(outage.network, base.points[i], ActivationMode::preventive(rec.c.element),
                                      base.p_ext_mw[i], options.redispatch);
        recheck(loop, pb, *rec.schedule);
        ledger.check(*rec.schedule, pb);
    }
}

void closed_loop_security(Verdict& v) {
    const auto& week = fixture_week();
    HarnessOptions options;
    const BaseCase base = build_base_case(week.network, week.points, options);
    v.note(fmt::format("fixture week: {} points, {} Base Case adjustments", base.points.size(), base.adjustments.size()));
    // Base Case repairs hold each timestamp's own import.
    for (const auto& a : base.adjustments) {
        for (std::size_t i = 0; i < base.points.size(); ++i) {
            if (base.points[i].timestamp != a.timestamp) continue;
            const auto& raw = week.point(format_timestamp(a.timestamp).c_str());
            ledger.check(a.schedule, build_problem(week.network, raw, ActivationMode::corrective(), base.p_ext_mw[i],
                                                   options.redispatch));
        }
    }

    ClosedLoop loop;
    sweep_scenario(loop, week.network, base, {"base", 1.0, true, true, true}, options);
    sweep_scenario(loop, week.network, base, {"minus20", 0.8, true, false, true}, options);
    sweep_scenario(loop, week.network, base, {"plus20", 1.2, true, false, true}, options);

    std::string others;
    for (const auto& [k, n] : loop.other) others += fmt::format(", {} {}", n, k);
    v.note(fmt::format("{} violated timestamps/contingencies, {} optimal{}", loop.violated, loop.optimal, others));
    v.require(loop.optimal > 0, "redispatch was exercised");
    v.require(loop.secure == loop.optimal,
              fmt::format("{} of {} optimal schedules re-verify with zero violations", loop.secure, loop.optimal));
    v.require(loop.worst_slack <= 1e-4, fmt::format("worst slack deviation {:.2e} p.u. (<= 1e-4)", loop.worst_slack));
    for (const auto& s : loop.insecure) v.note(s);
}

// --- 5 and 6 -----------------------------------------------------------------

struct YearRun {
    std::filesystem::path dir;
    double seconds = 0.0;
    int exit_code = -1;
    std::string output;
};

YearRun year_plus20() {
    YearRun y;
    const auto root = scratch_dir("acceptance-year");
    const auto net = root / "network.json";
    const auto csv = root / "year.csv";
    if (run_command(synth_path().string() + " network --out " + net.string()) != 0 ||
        run_command(synth_path().string() + " measurements --start 2023-01-01T00:00Z --days 365 --out " +
                    csv.string()) != 0) {
        throw Error("fixture year generation failed");
    }
    std::ofstream(root / "config.json") << R"({
  "network": "network.json",
  "measurements": "year.csv",
  "scenarios": [{"name": "plus20", "load_scale": 1.2, "rsae": true, "cae": false, "smfae": true}]
})";
    y.dir = root / "run";
    const auto start = Clock::now();
    y.exit_code = run_command(cli_path().string() + " run --config " + (root / "config.json").string() + " --out " +
                                  y.dir.string(),
                              &y.output);
    y.seconds = seconds_since(start);
    return y;
}

void import_accounting(Verdict& v, const YearRun& y) {
    v.require(y.exit_code == 0, fmt::format("year run exit code {}", y.exit_code));
    if (y.exit_code != 0) {
        v.note(y.output.substr(0, 400));
        return;
    }
    const auto metrics = nlohmann::json::parse(read(y.dir / "metrics.json"));
    const auto& sc = metrics["scenarios"][0];
    const double reported = sc["import_reduction_mwh"].get<double>();

    std::istringstream rows(read(y.dir / "import_comparison.csv"));
    std::string line;
    std::getline(rows, line);
    double recomputed = 0.0;
    std::size_t n = 0;
    while (std::getline(rows, line)) {
        std::vector<std::string> cols;
        std::stringstream cells(line);
        for (std::string cell; std::getline(cells, cell, ',');) cols.push_back(cell);
        if (cols.size() != 5 || cols[0] != "plus20") continue;
        recomputed += (std::stod(cols[2]) - std::stod(cols[3])) * 0.25;
        ++n;
    }
    const double rel = std::abs(recomputed - reported) / std::max(std::abs(reported), 1e-12);
    v.note(fmt::format("{} timestamps, {} violated, corrective {} requested / {} optimal / {} infeasible / {} failed", n,
                       sc["violated_points"].get<std::size_t>(), sc["corrective"]["requested"].get<std::size_t>(),
                       sc["corrective"]["optimal"].get<std::size_t>(), sc["corrective"]["infeasible"].get<std::size_t>(),
                       sc["corrective"]["solver_failure"].get<std::size_t>()));
    v.require(n == 35040, fmt::format("{} per-timestamp rows (35040 expected)", n));
    v.require(rel <= 1e-6, fmt::format("recomputed {:.6f} MWh vs reported {:.6f} MWh, relative gap {:.1e} (<= 1e-6)",
                                       recomputed, reported, rel));
    v.require(reported > 0.0, fmt::format("import reduction {:.3f} MWh is positive", reported));
}

void throughput(Verdict& v, const YearRun& y) {
    v.require(y.exit_code == 0 && y.seconds < 600.0,
              fmt::format("fixture year, RSAE + corrective redispatch: {:.1f} s (< 600 s)", y.seconds));

    // One violated timestamp end to end: flow, assess, solve, verify.
    const auto& week = fixture_week();
    const auto point = scale_loads(week.point("2024-06-01T12:00Z"), 0.8);
    const auto start = Clock::now();
    const auto y_bus = build_admittance(week.network);
    const auto sol = solve_power_flow(week.network, y_bus, point);
    const auto rep = assess(sol, {});
    SetpointSchedule s;
    if (!rep.secure()) s = solve_and_verify(build_problem(week.network, point, ActivationMode::corrective(), sol.p_ext_mw));
    const double elapsed = seconds_since(start);
    v.require(!rep.secure() && s.status == ScheduleStatus::optimal,
              fmt::format("2024-06-01T12:00Z at 0.8 load: {} violation(s), schedule {}", rep.violations.size(),
                          to_string(s.status)));
    v.require(elapsed < 1.0, fmt::format("single timestamp end to end: {:.3f} s (< 1 s)", elapsed));
}

// --- 7 ---------------------------------------------------------------------

void determinism(Verdict& v) {
    const auto root = scratch_dir("acceptance-determinism");
    const std::string config = (fixture_dir() / "config.json").string();
    std::string out;
    const int a = run_command(cli_path().string() + " run --config " + config + " --out " + (root / "a").string(), &out);
    const int b = run_command(cli_path().string() + " run --config " + config + " --out " + (root / "b").string(), &out);
    v.require(a == 0 && b == 0, fmt::format("both runs exit 0 ({}, {})", a, b));
    const std::string ma = read(root / "a" / "metrics.json");
    const std::string mb = read(root / "b" / "metrics.json");
    v.require(!ma.empty() && ma == mb, fmt::format("metrics.json byte-identical ({} bytes)", ma.size()));
}

}  // namespace

int main() {
    setup_logging();
    report(1, "power-flow correctness", power_flow_correctness);
    report(2, "contingency enumeration", contingency_enumeration);

    // Criterion 3 also covers every schedule produced for criterion 4, so that
    // runs first and criterion 3 is printed once the ledger is complete.
    Verdict closed;
    try {
        closed_loop_security(closed);
    } catch (const std::exception& e) {
        closed.require(false, fmt::format("aborted: {}", e.what()));
    }

    report(3, "redispatch optimality and constraint invariants", [](Verdict& v) {
        redispatch_optimality(v);
        v.require(ledger.checked > 1 && ledger.breached == 0,
                  fmt::format("constraint invariants hold on {} of {} optimal schedules", ledger.checked - ledger.breached,
                              ledger.checked));
        for (const auto& e : ledger.examples) v.note(e);
    });
    report(4, "closed-loop security", [&](Verdict& v) { v = closed; });

    YearRun year;
    try {
        year = year_plus20();
    } catch (const std::exception& e) {
        year.output = e.what();
    }
    report(5, "import accounting", [&](Verdict& v) { import_accounting(v, year); });
    report(6, "throughput", [&](Verdict& v) { throughput(v, year); });
    report(7, "determinism", determinism);

    std::printf("%d of 7 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
