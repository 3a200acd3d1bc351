#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

namespace gridtwin {

/// Markdown digest of a metrics.json document.
std::string render_summary(const nlohmann::json& metrics);

/// Rebuilds summary.md and the plot-ready CSVs from a finished run directory:
/// voltage_envelope.csv (all scenarios, before redispatch), one envelope per
/// scenario and stage, delta_distribution.csv and import_series.csv.
/// Reads persisted artifacts only.
void write_report(const std::filesystem::path& run_dir, const std::filesystem::path& out_dir);

}  // namespace gridtwin
