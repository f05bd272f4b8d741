#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "igaff/harness/runner.hpp"
#include "json.hpp"

namespace igaff {

nlohmann::ordered_json to_json(const AttackConfig& cfg);
nlohmann::ordered_json to_json(const AggregateStat& s);
nlohmann::ordered_json to_json(const RunReport& r);
nlohmann::ordered_json to_json(const std::vector<SweepPoint>& points);
nlohmann::ordered_json to_json(const TargetedReport& r);
nlohmann::ordered_json to_json(const EvalReport& r);

/// One row per repeat, then `mean` and `std` rows.
std::string report_csv(const RunReport& r);
/// Swept parameter columns, then sr_mean and sr_std; one row per grid point.
std::string sweep_csv(const std::vector<SweepPoint>& points);
/// One row per target with the shared untargeted SR.
std::string targeted_csv(const TargetedReport& r);
/// One row per class.
std::string eval_csv(const EvalReport& r);

/// Writes via a temporary file and rename so readers never see a partial file.
void write_text_atomic(const std::filesystem::path& path, const std::string& text);

}  // namespace igaff
