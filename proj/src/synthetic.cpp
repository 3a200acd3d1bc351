#include "gridtwin/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace gridtwin::synthetic {

namespace {

constexpr double kPi = std::numbers::pi;

struct LineSpec {
    int from;
    int to;
    double length_km;
};

// 60 kV overhead lines between substation buses 1..16: a 12-node ring, six
// ties across it and four radial spurs (13..16).
constexpr LineSpec kOverhead[] = {
    {1, 2, 9.0},   {2, 3, 4.5},   {3, 4, 6.0},   {4, 5, 12.0},  {5, 6, 5.5},   {6, 7, 7.0},
    {7, 8, 6.5},   {8, 9, 8.0},   {9, 10, 9.5},  {10, 11, 7.5}, {11, 12, 8.5}, {12, 1, 11.0},
    {1, 7, 14.0},  {2, 4, 8.0},   {3, 12, 10.0}, {6, 9, 13.0},  {8, 11, 12.5}, {5, 12, 15.0},
    {2, 13, 6.0},  {5, 14, 7.5},  {9, 15, 5.0},  {11, 16, 9.0},
};

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

/// Relative load at hour-of-day h (0..24): a night trough between two daily peaks.
double daily_load(double h) {
    const double morning = std::exp(-0.5 * std::pow((h - 8.0) / 1.8, 2));
    const double evening = std::exp(-0.5 * std::pow((h - 18.5) / 2.2, 2));
    const double day = 0.5 * (1.0 - std::cos(2 * kPi * h / 24.0));
    return 0.42 + 0.18 * day + 0.22 * morning + 0.38 * evening;
}

/// Clear-sky solar output (0..1) for day-of-year d and hour h, 55 deg N.
double clear_sky(int d, double h) {
    const double decl = 23.44 * std::sin(2 * kPi * (284 + d) / 365.0) * kPi / 180.0;
    const double lat = 55.1 * kPi / 180.0;
    const double hour_angle = (h - 12.0) * 15.0 * kPi / 180.0;
    const double elev = std::sin(lat) * std::sin(decl) + std::cos(lat) * std::cos(decl) * std::cos(hour_angle);
    return elev > 0 ? std::pow(elev, 1.2) : 0.0;
}

/// Normalised wind turbine output for a hub-height speed in m/s.
double power_curve(double v) {
    if (v < 3.0 || v > 25.0) return 0.0;
    if (v >= 12.5) return 1.0;
    return std::pow((v - 3.0) / 9.5, 3);
}

}  // namespace

const std::vector<Substation>& substations() {
    static const std::vector<Substation> table = {
        {"S01", "Hasle", 4.0, 8.0, 3.0, 0.0},      {"S02", "RonneNord", 7.0, 0.0, 2.0, 6.0},
        {"S03", "RonneSyd", 6.0, 0.0, 2.0, 0.0},   {"S04", "Vesthavn", 3.0, 5.0, 0.0, 0.0},
        {"S05", "Allinge", 3.0, 4.0, 3.0, 0.0},    {"S06", "Olsker", 2.0, 6.0, 0.0, 0.0},
        {"S07", "Gudhjem", 2.0, 0.0, 2.0, 0.0},    {"S08", "Osterlars", 2.0, 5.0, 2.0, 0.0},
        {"S09", "Svaneke", 2.5, 0.0, 3.0, 0.0},    {"S10", "Nexo", 5.0, 6.0, 3.0, 2.0},
        {"S11", "Povlsker", 2.0, 0.0, 6.0, 0.0},   {"S12", "Aakirkeby", 4.0, 0.0, 2.0, 3.0},
        {"S13", "Bodilsker", 1.5, 4.0, 0.0, 0.0},  {"S14", "Klemensker", 2.0, 0.0, 4.0, 0.0},
        {"S15", "Viadukt", 3.0, 0.0, 1.0, 0.0},    {"S16", "Snorrebakken", 3.0, 0.0, 1.0, 0.0},
    };
    return table;
}

nlohmann::json mini_bornholm_network() {
    using nlohmann::json;
    json doc;
    doc["s_base_mva"] = 100.0;
    doc["f_hz"] = 50.0;
    doc["buses"] = json::array();
    doc["buses"].push_back({{"id", 0}, {"name", "Borrby"}, {"vn_kv", 60.0}, {"kind", "slack"}});
    const auto& subs = substations();
    for (std::size_t k = 0; k < subs.size(); ++k) {
        const int i = static_cast<int>(k) + 1;
        doc["buses"].push_back({{"id", i}, {"name", subs[k].name + "-60"}, {"vn_kv", 60.0}, {"kind", "pq"}});
    }
    for (std::size_t k = 0; k < subs.size(); ++k) {
        const int i = static_cast<int>(k) + 1;
        doc["buses"].push_back({{"id", 100 + i}, {"name", subs[k].name + "-10"}, {"vn_kv", 10.0}, {"kind", "pq"}});
    }

    doc["lines"] = json::array();
    // Subsea cable to the external grid.
    doc["lines"].push_back({{"id", 1}, {"from_bus", 0}, {"to_bus", 1}, {"r_ohm_per_km", 0.05}, {"x_ohm_per_km", 0.11},
                            {"c_nf_per_km", 230.0}, {"length_km", 43.0}, {"max_i_ka", 0.6}});
    int id = 2;
    for (const auto& l : kOverhead) {
        doc["lines"].push_back({{"id", id++}, {"from_bus", l.from}, {"to_bus", l.to}, {"r_ohm_per_km", 0.12},
                                {"x_ohm_per_km", 0.39}, {"c_nf_per_km", 9.5}, {"length_km", l.length_km},
                                {"max_i_ka", 0.35}});
    }

    doc["transformers"] = json::array();
    doc["generators"] = json::array();
    doc["loads"] = json::array();
    for (std::size_t k = 0; k < subs.size(); ++k) {
        const int i = static_cast<int>(k) + 1;
        const auto& s = subs[k];
        const double peak = std::max(s.peak_load_mw, s.wind_mw + s.solar_mw + s.chp_mw);
        // RonneSyd keeps an undersized unit: a winter-evening bottleneck once load grows.
        const double sn = s.id == "S03" ? 8.0 : peak > 12.0 ? 25.0 : 16.0;
        doc["transformers"].push_back({{"id", i}, {"hv_bus", i}, {"lv_bus", 100 + i}, {"sn_mva", sn},
                                       {"vk_percent", 10.0}, {"vkr_percent", 0.5}, {"vn_hv_kv", 60.0},
                                       {"vn_lv_kv", 10.0}});
        // Recorded maxima put the 85% redispatch bound at installed capacity.
        const double capacity = s.wind_mw + s.solar_mw + s.chp_mw;
        doc["generators"].push_back({{"id", i}, {"bus", 100 + i}, {"substation", s.id},
                                     {"p_hist_max_mw", std::round(capacity / 0.85 * 1000.0) / 1000.0}});
        doc["loads"].push_back({{"id", i}, {"bus", 100 + i}, {"substation", s.id}});
    }

    // Cable compensation reactor at the landing and one capacitor bank in the east.
    doc["shunts"] = json::array();
    doc["shunts"].push_back({{"id", 1}, {"bus", 1}, {"q_mvar", 8.0}, {"p_mw", 0.0}});
    doc["shunts"].push_back({{"id", 2}, {"bus", 10}, {"q_mvar", -2.0}, {"p_mw", 0.0}});

    doc["ext_grid"] = {{"bus", 0}, {"vm_pu", 1.02}};
    return doc;
}

void write_measurements(std::ostream& out, const MeasurementOptions& options) {
    std::mt19937_64 rng(options.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);

    const auto& subs = substations();
    const int steps_per_day = 96;
    const int steps = options.days * steps_per_day;

    // Island-wide weather: hourly wind speed as a mean-reverting process and a
    // daily cloud factor, both drawn before the per-substation noise.
    const int hours = options.days * 24 + 1;
    std::vector<double> wind(static_cast<std::size_t>(hours));
    double w = 7.0;
    for (auto& v : wind) {
        w += 0.08 * (7.5 - w) + 0.9 * normal(rng);
        w = std::max(0.0, w);
        v = w;
    }
    std::vector<double> cloud(static_cast<std::size_t>(options.days) + 1);
    for (auto& c : cloud) c = 0.25 + 0.75 * uniform(rng);

    out << "timestamp,substation_id,feeder_id,injected_kw,withdrawn_kw\n";
    const auto day0 = std::chrono::floor<std::chrono::days>(options.start);
    const auto ymd = std::chrono::year_month_day(day0);
    const auto jan1 = std::chrono::sys_days(ymd.year() / std::chrono::January / 1);
    for (int k = 0; k < steps; ++k) {
        const Timestamp t = options.start + k * std::chrono::duration_cast<std::chrono::seconds>(kInterval);
        const double hours_since = k / 4.0;
        const auto day = std::chrono::floor<std::chrono::days>(t);
        const int doy = static_cast<int>((day - jan1).count() % 365);
        const double h = static_cast<double>((t - day).count()) / 3600.0 + 0.125;  // interval midpoint
        const auto hour_index = static_cast<std::size_t>(hours_since);
        const double frac = hours_since - std::floor(hours_since);
        const double speed = (1 - frac) * wind[hour_index] + frac * wind[hour_index + 1];
        const double season = 0.5 * (1 + std::cos(2 * kPi * (doy - 15) / 365.0));  // 1 mid-January, 0 mid-July
        const bool weekend = (std::chrono::weekday(day).c_encoding() % 6) == 0;
        const double sun = clear_sky(doy, h) * cloud[static_cast<std::size_t>(k / steps_per_day)];
        const double load_level = (0.62 + 0.38 * season) * daily_load(h) * (weekend ? 0.9 : 1.0);

        const std::string ts = format_timestamp(t);
        for (const auto& s : subs) {
            const double load = s.peak_load_mw * load_level * (1.0 + 0.04 * normal(rng));
            const double wind_mw = s.wind_mw * power_curve(speed * (1.0 + 0.05 * normal(rng)));
            const double solar = s.solar_mw * clamp01(sun * (1.0 + 0.05 * normal(rng)));
            // Heat-led units run in the heating season, lower at night.
            const double chp = s.chp_mw * clamp01(season * 1.3 - 0.2) * (h > 6 && h < 22 ? 0.9 : 0.6);
            const double f1_load = 0.6 * std::max(load, 0.0);
            const double f2_load = 0.4 * std::max(load, 0.0);
            fmt::print(out, "{},{},F1,{:.3f},{:.3f}\n", ts, s.id, 1000.0 * (wind_mw + chp), 1000.0 * f1_load);
            fmt::print(out, "{},{},F2,{:.3f},{:.3f}\n", ts, s.id, 1000.0 * solar, 1000.0 * f2_load);
        }
    }
}

}  // namespace gridtwin::synthetic
