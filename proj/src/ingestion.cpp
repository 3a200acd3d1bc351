#include "gridtwin/ingestion.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>

#include <fmt/format.h>

#include "gridtwin/error.hpp"

namespace gridtwin {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

double parse_number(std::string_view text, std::size_t line, const char* column) {
    double value = 0.0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    if (!text.empty() && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (text.empty() || ec != std::errc{} || ptr != last || !std::isfinite(value)) {
        throw DataError(fmt::format("malformed row, line {}: {} '{}' is not a number", line, column, text));
    }
    return value;
}

}  // namespace

// ---------------------------------------------------------------------------

std::optional<FeederMeasurement> MeasurementStream::feed_line(std::string_view text) {
    ++line_;
    text = trim(text);
    if (text.empty()) return std::nullopt;
    if (text == kMeasurementHeader) return std::nullopt;

    std::string_view cols[5];
    std::size_t count = 0;
    std::size_t start = 0;
    for (;;) {
        const auto comma = text.find(',', start);
        const auto cell = trim(text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (count < 5) cols[count] = cell;
        ++count;
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    if (count != 5) {
        throw DataError(fmt::format("malformed row, line {}: expected 5 columns, found {}", line_, count));
    }

    FeederMeasurement rec;
    rec.line = line_;
    try {
        rec.timestamp = parse_timestamp(cols[0]);
    } catch (const DataError& e) {
        throw DataError(fmt::format("malformed row, line {}: {}", line_, e.what()));
    }
    rec.substation_id = std::string(cols[1]);
    rec.feeder_id = std::string(cols[2]);
    if (rec.substation_id.empty() || rec.feeder_id.empty()) {
        throw DataError(fmt::format("malformed row, line {}: empty substation or feeder id", line_));
    }
    rec.injected_kw = parse_number(cols[3], line_, "injected_kw");
    rec.withdrawn_kw = parse_number(cols[4], line_, "withdrawn_kw");
    return feed(std::move(rec));
}

FeederMeasurement MeasurementStream::feed(FeederMeasurement rec) {
    const std::size_t line = rec.line;
    if (rec.injected_kw < 0.0 || rec.withdrawn_kw < 0.0) {
        throw DataError(fmt::format("negative power channel, line {}", line));
    }
    if (!on_interval_grid(rec.timestamp)) {
        throw DataError(
            fmt::format("off-grid timestamp {}, line {}", format_timestamp(rec.timestamp), line));
    }
    auto [it, fresh] = seen_.try_emplace({rec.substation_id, rec.feeder_id, rec.timestamp}, line);
    if (!fresh) {
        throw DataError(fmt::format("duplicate record for feeder {}/{} at {}: lines {} and {}", rec.substation_id,
                                    rec.feeder_id, format_timestamp(rec.timestamp), it->second, line));
    }
    return rec;
}

std::vector<FeederMeasurement> parse_measurements(std::istream& in) {
    MeasurementStream stream;
    std::vector<FeederMeasurement> out;
    std::string line;
    while (std::getline(in, line)) {
        if (auto rec = stream.feed_line(line)) out.push_back(std::move(*rec));
    }
    std::sort(out.begin(), out.end(), [](const FeederMeasurement& a, const FeederMeasurement& b) {
        return std::tie(a.timestamp, a.substation_id, a.feeder_id) <
               std::tie(b.timestamp, b.substation_id, b.feeder_id);
    });
    return out;
}

std::vector<FeederMeasurement> parse_measurements_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError(fmt::format("cannot open measurement file '{}'", path.string()));
    return parse_measurements(in);
}

// ---------------------------------------------------------------------------

double reconstruct_reactive(double p_mw, PowerRole role, const PowerFactors& factors) {
    if (!(p_mw >= 0.0)) {
        throw DataError(fmt::format("cannot reconstruct reactive power from negative P {}", p_mw));
    }
    const double pf = role == PowerRole::load ? factors.load : factors.generation;
    return p_mw * std::tan(std::acos(pf));
}

GapPolicy parse_gap_policy(std::string_view text) {
    if (text == "skip") return GapPolicy::skip;
    if (text == "hold-last" || text == "hold_last") return GapPolicy::hold_last;
    if (text == "zero") return GapPolicy::zero;
    throw ConfigError(fmt::format("unknown gap policy '{}' (skip, hold-last, zero)", text));
}

std::string_view to_string(GapPolicy policy) {
    switch (policy) {
        case GapPolicy::skip: return "skip";
        case GapPolicy::hold_last: return "hold-last";
        case GapPolicy::zero: return "zero";
    }
    return "?";
}

const SubstationSample* SubstationSeries::at(Timestamp t) const {
    auto it = std::lower_bound(samples.begin(), samples.end(), t,
                               [](const SubstationSample& s, Timestamp when) { return s.timestamp < when; });
    if (it == samples.end() || it->timestamp != t) return nullptr;
    return &*it;
}

Aggregation aggregate_to_substation(std::span<const FeederMeasurement> records, GapPolicy policy,
                                    const PowerFactors& factors, std::span<const std::string> expected) {
    struct FeederValue {
        double injected_kw = 0.0;
        double withdrawn_kw = 0.0;
    };
    // substation -> feeder -> time -> value
    std::map<std::string, std::map<std::string, std::map<Timestamp, FeederValue>>> grouped;
    std::set<Timestamp> axis;
    for (const auto& r : records) {
        grouped[r.substation_id][r.feeder_id][r.timestamp] = {r.injected_kw, r.withdrawn_kw};
        axis.insert(r.timestamp);
    }
    for (const auto& name : expected) {
        if (!grouped.contains(name)) {
            throw DataError(fmt::format("substation {} has zero feeders in the measurements", name));
        }
    }

    Aggregation out;
    for (const auto& [substation, feeders] : grouped) {
        SubstationSeries series;
        series.substation_id = substation;
        series.samples.reserve(axis.size());
        std::map<std::string, FeederValue> last;
        for (const Timestamp t : axis) {
            double inj_kw = 0.0;
            double wdr_kw = 0.0;
            bool keep = true;
            for (const auto& [feeder, values] : feeders) {
                const auto it = values.find(t);
                if (it != values.end()) {
                    inj_kw += it->second.injected_kw;
                    wdr_kw += it->second.withdrawn_kw;
                    last[feeder] = it->second;
                    continue;
                }
                switch (policy) {
                    case GapPolicy::skip:
                        keep = false;
                        out.gaps.push_back({substation, feeder, t, false});
                        break;
                    case GapPolicy::zero:
                        out.gaps.push_back({substation, feeder, t, true});
                        break;
                    case GapPolicy::hold_last: {
                        // No earlier value: the gap is filled with zero.
                        const auto prev = last.find(feeder);
                        if (prev != last.end()) {
                            inj_kw += prev->second.injected_kw;
                            wdr_kw += prev->second.withdrawn_kw;
                        }
                        out.gaps.push_back({substation, feeder, t, true});
                        break;
                    }
                }
            }
            if (!keep) continue;
            SubstationSample s;
            s.timestamp = t;
            s.p_gen_mw = inj_kw / 1000.0;
            s.p_load_mw = wdr_kw / 1000.0;
            s.q_gen_mvar = reconstruct_reactive(s.p_gen_mw, PowerRole::generation, factors);
            s.q_load_mvar = reconstruct_reactive(s.p_load_mw, PowerRole::load, factors);
            series.samples.push_back(s);
        }
        out.series.emplace(substation, std::move(series));
    }
    return out;
}

double historical_max(std::span<const double> p_gen_mw) {
    if (p_gen_mw.empty()) throw DataError("historical maximum of an empty series");
    return *std::max_element(p_gen_mw.begin(), p_gen_mw.end());
}

namespace {

template <typename Units>
std::map<std::string, int> units_per_substation(const Units& units) {
    std::map<std::string, int> count;
    for (const auto& u : units) {
        if (u.in_service) ++count[u.substation];
    }
    return count;
}

}  // namespace

std::vector<double> historical_max(const Network& net, const Aggregation& agg) {
    const auto shares = units_per_substation(net.generators);
    std::vector<double> out(net.generators.size(), 0.0);
    for (std::size_t k = 0; k < net.generators.size(); ++k) {
        const auto& g = net.generators[k];
        const auto it = agg.series.find(g.substation);
        if (it == agg.series.end()) {
            throw DataError(fmt::format("no measurements for substation {} of generator {}", g.substation, g.id));
        }
        std::vector<double> p;
        p.reserve(it->second.samples.size());
        for (const auto& s : it->second.samples) p.push_back(s.p_gen_mw);
        const auto share = shares.find(g.substation);
        const int n = share == shares.end() ? 1 : share->second;
        out[k] = historical_max(p) / n;
    }
    return out;
}

std::vector<std::string> required_substations(const Network& net) {
    std::set<std::string> names;
    for (const auto& g : net.generators) {
        if (g.in_service) names.insert(g.substation);
    }
    for (const auto& l : net.loads) {
        if (l.in_service) names.insert(l.substation);
    }
    return {names.begin(), names.end()};
}

OperatingPointSet build_operating_points(const Network& net, const Aggregation& agg) {
    const auto required = required_substations(net);
    std::vector<const SubstationSeries*> series;
    for (const auto& name : required) {
        const auto it = agg.series.find(name);
        if (it == agg.series.end()) {
            throw DataError(fmt::format("no measurements for substation {}", name));
        }
        series.push_back(&it->second);
    }

    std::set<Timestamp> axis;
    for (const auto& [name, s] : agg.series) {
        for (const auto& sample : s.samples) axis.insert(sample.timestamp);
    }

    const auto gen_share = units_per_substation(net.generators);
    const auto load_share = units_per_substation(net.loads);

    OperatingPointSet out;
    out.points.reserve(axis.size());
    for (const Timestamp t : axis) {
        std::map<std::string_view, const SubstationSample*> at;
        bool complete = true;
        for (std::size_t k = 0; k < required.size(); ++k) {
            const SubstationSample* s = series[k]->at(t);
            if (!s) {
                complete = false;
                break;
            }
            at[required[k]] = s;
        }
        if (!complete) {
            out.dropped.push_back(t);
            continue;
        }

        OperatingPoint p;
        p.timestamp = t;
        p.loads.resize(net.loads.size());
        p.generators.resize(net.generators.size());
        for (std::size_t k = 0; k < net.loads.size(); ++k) {
            const auto& l = net.loads[k];
            if (!l.in_service) continue;
            const SubstationSample* s = at.at(l.substation);
            const double n = load_share.at(l.substation);
            p.loads[k] = {s->p_load_mw / n, s->q_load_mvar / n};
        }
        for (std::size_t k = 0; k < net.generators.size(); ++k) {
            const auto& g = net.generators[k];
            if (!g.in_service) continue;
            const SubstationSample* s = at.at(g.substation);
            const double n = gen_share.at(g.substation);
            p.generators[k] = {s->p_gen_mw / n, s->q_gen_mvar / n};
        }
        out.points.push_back(std::move(p));
    }
    return out;
}

}  // namespace gridtwin
