#include "gridtwin/report.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string_view>
#include <vector>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "gridtwin/error.hpp"
#include "gridtwin/harness.hpp"

namespace gridtwin {

namespace {

using nlohmann::json;

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

/// Rows of a CSV written by the harness (no quoting). Header checked.
std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path, std::string_view header) {
    std::ifstream in(path);
    if (!in) throw DataError(fmt::format("run artifact {} is missing", path.string()));
    std::string line;
    std::getline(in, line);
    if (line != header) throw DataError(fmt::format("{}: unexpected header '{}'", path.string(), line));
    std::vector<std::vector<std::string>> rows;
    const std::size_t columns = split(std::string(header)).size();
    std::size_t number = 1;
    while (std::getline(in, line)) {
        ++number;
        if (line.empty()) continue;
        auto row = split(line);
        if (row.size() != columns) throw DataError(fmt::format("{}: malformed row, line {}", path.string(), number));
        rows.push_back(std::move(row));
    }
    return rows;
}

double number(const std::string& s) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw DataError(fmt::format("not a number: '{}'", s));
}

std::string fmt_rate(const json& j, const char* key) { return fmt::format("{:.2f}%", j.value(key, 0.0)); }

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw Error(fmt::format("cannot write {}", path.string()));
    out << text;
}

}  // namespace

std::string render_summary(const json& metrics) {
    std::string md = "# Run summary\n\n";
    if (const auto it = metrics.find("base_case"); it != metrics.end()) {
        const json& b = *it;
        md += "## Base Case\n\n";
        md += fmt::format("- operating points: {}\n", b.value("operating_points", 0));
        md += fmt::format("- adjusted by corrective redispatch: {}\n", b.value("adjusted_points", 0));
        md += fmt::format("- timestamps dropped for missing data: {}\n", b.value("dropped_timestamps", 0));
        if (b.contains("first_timestamp")) {
            md += fmt::format("- horizon: {} to {}\n", b["first_timestamp"].get<std::string>(),
                              b["last_timestamp"].get<std::string>());
        }
        md += fmt::format("- external-grid import: {:.3f} MWh\n\n", b.value("import_mwh", 0.0));
    }

    md += "## Scenarios\n\n";
    md += "| scenario | load scale | points | violated | over-V | under-V | thermal | V min | V max | max loading |\n";
    md += "|---|---|---|---|---|---|---|---|---|---|\n";
    for (const auto& s : metrics.value("scenarios", json::array())) {
        md += fmt::format("| {} | {} | {} | {} | {} | {} | {} | {:.4f} | {:.4f} | {:.1f}% |\n",
                          s.value("name", ""), s.value("load_scale", 1.0), s.value("operating_points", 0),
                          fmt_rate(s, "violation_rate_percent"), fmt_rate(s, "overvoltage_rate_percent"),
                          fmt_rate(s, "undervoltage_rate_percent"), fmt_rate(s, "thermal_rate_percent"),
                          s.value("min_voltage_pu", 0.0), s.value("max_voltage_pu", 0.0),
                          s.value("max_loading_percent", 0.0));
    }
    md += "\n## Corrective redispatch\n\n";
    md += "| scenario | requested | optimal | verified secure | infeasible | solver failure | import reduction |\n";
    md += "|---|---|---|---|---|---|---|\n";
    for (const auto& s : metrics.value("scenarios", json::array())) {
        const json c = s.value("corrective", json::object());
        md += fmt::format("| {} | {} | {} | {} | {} | {} | {:.3f} MWh |\n", s.value("name", ""), c.value("requested", 0),
                          c.value("optimal", 0), c.value("verified_secure", 0), c.value("infeasible", 0),
                          c.value("solver_failure", 0), s.value("import_reduction_mwh", 0.0));
    }
    for (const auto& s : metrics.value("scenarios", json::array())) {
        const auto it = s.find("contingency");
        if (it == s.end()) continue;
        const json& c = *it;
        const json p = c.value("preventive", json::object());
        md += fmt::format("\n## Contingency sweep ({})\n\n", s.value("name", ""));
        md += fmt::format("- timestamps assessed: {}, cases: {}\n", c.value("timestamps", 0), c.value("cases", 0));
        md += fmt::format("- cases with violations: {} ({})\n", c.value("violated_cases", 0),
                          fmt_rate(c, "case_violation_rate_percent"));
        md += fmt::format("- timestamps with a violating contingency: {} ({})\n", c.value("violated_timestamps", 0),
                          fmt_rate(c, "timestamp_violation_rate_percent"));
        md += fmt::format("- diverged: {}, degenerate topology: {}\n", c.value("diverged", 0),
                          c.value("degenerate_topology", 0));
        md += fmt::format("- post-contingency voltage range: {:.4f} to {:.4f} p.u.\n", c.value("min_voltage_pu", 0.0),
                          c.value("max_voltage_pu", 0.0));
        md += fmt::format("- preventive redispatch: {} requested, {} optimal, {} infeasible, {} solver failures\n",
                          p.value("requested", 0), p.value("optimal", 0), p.value("infeasible", 0),
                          p.value("solver_failure", 0));
    }
    return md;
}

void write_report(const std::filesystem::path& run_dir, const std::filesystem::path& out_dir) {
    namespace fs = std::filesystem;
    std::ifstream metrics_in(run_dir / "metrics.json");
    if (!metrics_in) throw DataError(fmt::format("{} is not a run directory (no metrics.json)", run_dir.string()));
    json metrics;
    try {
        metrics = json::parse(metrics_in);
    } catch (const json::parse_error& e) {
        throw DataError(fmt::format("metrics.json is not valid JSON: {}", e.what()));
    }
    fs::create_directories(out_dir);

    // Voltage envelopes.
    const auto env_rows = read_csv(run_dir / "envelopes.csv", "scenario,stage,bus,min_v,max_v");
    std::map<std::string, std::pair<double, double>> overall;  // bus -> (min, max), assessed stage
    std::map<std::string, std::string> per_file;
    std::vector<std::string> bus_order;
    for (const auto& r : env_rows) {
        const std::string file = fmt::format("voltage_envelope_{}_{}.csv", r[0], r[1]);
        auto& text = per_file[file];
        if (text.empty()) text = "bus,min_v,max_v\n";
        text += fmt::format("{},{},{}\n", r[2], r[3], r[4]);
        if (r[1] != "assessed") continue;
        const double lo = number(r[3]);
        const double hi = number(r[4]);
        auto [it, inserted] = overall.try_emplace(r[2], lo, hi);
        if (inserted) {
            bus_order.push_back(r[2]);
        } else {
            it->second.first = std::min(it->second.first, lo);
            it->second.second = std::max(it->second.second, hi);
        }
    }
    std::string envelope = "bus,min_v,max_v\n";
    for (const auto& bus : bus_order) {
        envelope += fmt::format("{},{},{}\n", bus, overall[bus].first, overall[bus].second);
    }
    write_text(out_dir / "voltage_envelope.csv", envelope);
    for (const auto& [file, text] : per_file) write_text(out_dir / file, text);

    // Redispatch delta distributions, one row per unit and quantity.
    const double threshold = 1e-6;
    const auto delta_rows = read_csv(run_dir / "deltas.csv", "scenario,timestamp,mode,generator,delta_p_mw,delta_q_mvar");
    std::map<std::tuple<std::string, std::string, int>, std::pair<std::vector<double>, std::vector<double>>> groups;
    for (const auto& r : delta_rows) {
        const std::string mode = r[2].rfind("preventive", 0) == 0 ? "preventive" : "corrective";
        auto& g = groups[{r[0], mode, static_cast<int>(number(r[3]))}];
        g.first.push_back(number(r[4]));
        g.second.push_back(number(r[5]));
    }
    std::string dist = "scenario,mode,generator,quantity,samples,activations,min,q1,median,q3,max,mean,no_activation\n";
    for (const auto& [key, values] : groups) {
        const auto& [scenario, mode, gen] = key;
        const auto row = [&](const char* quantity, const std::vector<double>& v) {
            const DistributionSummary s = compute_distribution_summary(v, threshold);
            dist += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{}\n", scenario, mode, gen, quantity, s.samples,
                                s.activations, s.min, s.q1, s.median, s.q3, s.max, s.mean,
                                s.no_activation ? "true" : "false");
        };
        row("delta_p_mw", values.first);
        row("delta_q_mvar", values.second);
    }
    write_text(out_dir / "delta_distribution.csv", dist);

    // Cumulative import difference per scenario.
    const auto import_rows =
        read_csv(run_dir / "import_comparison.csv", "scenario,timestamp,p_ext_without_mw,p_ext_with_mw,reduction_mwh");
    std::string series = "scenario,timestamp,p_ext_without_mw,p_ext_with_mw,cumulative_reduction_mwh\n";
    std::map<std::string, double> cumulative;
    for (const auto& r : import_rows) {
        double& acc = cumulative[r[0]];
        acc += number(r[4]);
        series += fmt::format("{},{},{},{},{}\n", r[0], r[1], r[2], r[3], acc);
    }
    write_text(out_dir / "import_series.csv", series);

    write_text(out_dir / "summary.md", render_summary(metrics));
}

}  // namespace gridtwin
