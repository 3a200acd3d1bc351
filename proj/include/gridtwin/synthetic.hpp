#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gridtwin/time.hpp"

namespace gridtwin::synthetic {

/// One 60/10 kV substation of the synthetic island: peak load and installed
/// renewable and CHP capacity behind its transformer (MW).
struct Substation {
    std::string id;
    std::string name;
    double peak_load_mw = 0.0;
    double wind_mw = 0.0;
    double solar_mw = 0.0;
    double chp_mw = 0.0;
};

const std::vector<Substation>& substations();

/// Network document: external grid behind a subsea cable, 16 substations with
/// a 60 kV and a 10 kV bus each, 23 lines and 16 transformers.
nlohmann::json mini_bornholm_network();

struct MeasurementOptions {
    Timestamp start{};
    int days = 7;
    std::uint64_t seed = 7;
};

/// Two feeders per substation, 15-minute means in kW, deterministic in the seed.
void write_measurements(std::ostream& out, const MeasurementOptions& options);

}  // namespace gridtwin::synthetic
