#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "gridtwin/network.hpp"
#include "gridtwin/powerflow.hpp"
#include "gridtwin/time.hpp"

namespace gridtwin {

/// Mean powers over one 15-minute interval of a 10 kV feeder.
struct FeederMeasurement {
    Timestamp timestamp{};
    std::string substation_id;
    std::string feeder_id;
    double injected_kw = 0.0;
    double withdrawn_kw = 0.0;
    std::size_t line = 0;  // source line number, 0 for streamed records
};

inline constexpr std::string_view kMeasurementHeader = "timestamp,substation_id,feeder_id,injected_kw,withdrawn_kw";

/// Incremental record parser for live replay. Each call validates one CSV
/// line (or one ready-made record) and rejects duplicates of any record seen
/// earlier on the same stream.
class MeasurementStream {
public:
    /// Returns nullopt for the header line and blank lines.
    std::optional<FeederMeasurement> feed_line(std::string_view text);
    FeederMeasurement feed(FeederMeasurement record);

    std::size_t lines_read() const { return line_; }

private:
    std::size_t line_ = 0;
    std::map<std::tuple<std::string, std::string, Timestamp>, std::size_t> seen_;  // -> line
};

/// Reads a whole CSV document and returns records sorted by
/// (timestamp, substation_id, feeder_id). Throws DataError with line numbers.
std::vector<FeederMeasurement> parse_measurements(std::istream& in);
std::vector<FeederMeasurement> parse_measurements_file(const std::filesystem::path& path);

enum class PowerRole { load, generation };

struct PowerFactors {
    double load = 0.95;
    double generation = 0.99;
};

/// Q = P * tan(arccos(pf)) for the role's power factor. Load Q is consumption,
/// generation Q is injection. Throws DataError for negative P.
double reconstruct_reactive(double p_mw, PowerRole role, const PowerFactors& factors = {});

enum class GapPolicy { skip, hold_last, zero };

GapPolicy parse_gap_policy(std::string_view text);
std::string_view to_string(GapPolicy policy);

struct SubstationSample {
    Timestamp timestamp{};
    double p_gen_mw = 0.0;
    double q_gen_mvar = 0.0;
    double p_load_mw = 0.0;
    double q_load_mvar = 0.0;
};

struct SubstationSeries {
    std::string substation_id;
    std::vector<SubstationSample> samples;  // ascending time

    const SubstationSample* at(Timestamp t) const;
};

struct GapEvent {
    std::string substation_id;
    std::string feeder_id;
    Timestamp timestamp{};
    bool filled = false;  // false: the substation sample was dropped
};

struct Aggregation {
    std::map<std::string, SubstationSeries> series;
    std::vector<GapEvent> gaps;
};

/// Sums feeders per substation and timestamp (kW -> MW), summing in sorted
/// feeder_id order. The time axis is the union of all record timestamps; a
/// feeder absent at a timestamp is handled per `policy`. Every name in
/// `expected_substations` must have at least one feeder (DataError otherwise).
Aggregation aggregate_to_substation(std::span<const FeederMeasurement> records, GapPolicy policy,
                                    const PowerFactors& factors = {},
                                    std::span<const std::string> expected_substations = {});

/// Maximum of an active-power series. Throws DataError when empty.
double historical_max(std::span<const double> p_gen_mw);

/// P_gen^hist,max per network generator (index-aligned), taken at the
/// generator's substation and split evenly when a substation hosts several units.
std::vector<double> historical_max(const Network& network, const Aggregation& aggregation);

/// Substation names referenced by in-service loads and generators.
std::vector<std::string> required_substations(const Network& network);

struct OperatingPointSet {
    std::vector<OperatingPoint> points;
    std::vector<Timestamp> dropped;  // timestamps missing at some required substation
};

/// One operating point per timestamp at which every required substation has
/// a sample. Substation totals are split evenly across its loads/units.
OperatingPointSet build_operating_points(const Network& network, const Aggregation& aggregation);

}  // namespace gridtwin
