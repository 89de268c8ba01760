#pragma once

#include "gridcast/arima.hpp"
#include "gridcast/mle.hpp"
#include "gridcast/scenario.hpp"
#include "gridcast/timegrid.hpp"

#include "json.hpp"

#include <chrono>
#include <filesystem>
#include <string>
#include <string_view>
#include <variant>

namespace gridcast {

using Json = nlohmann::json;

// "YYYY-MM-DD" or "YYYY-MM-DDT00:00:00[Z]"; the time of day must be midnight.
std::chrono::sys_days parse_epoch(std::string_view text);
std::string format_epoch(std::chrono::sys_days epoch);

Json to_json(const GridConfig& config);
GridConfig grid_config_from_json(const Json& j);
GridConfig load_grid_config(const std::filesystem::path& path);

// {cell, beta:[5], sigma2, p}
Json to_json(const MleFit& fit);
MleFit mle_fit_from_json(const Json& j);

// {kind: "ar"|"diff_ar", a, phi:[...], mu?, sigma2}
Json to_json(const ArModel& model);
Json to_json(const DiffArModel& model);
using RealTimeModel = std::variant<ArModel, DiffArModel>;
RealTimeModel realtime_model_from_json(const Json& j);

Json to_json(const ProcessSpec& spec);
ProcessSpec process_spec_from_json(const Json& j);
Scenario scenario_from_json(const Json& j);
Json to_json(const Scenario& scenario);

Json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const Json& j);

}  // namespace gridcast
