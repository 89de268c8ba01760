#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gridcast {

enum class Quantity { demand, generation };

std::string_view to_string(Quantity q);
Quantity parse_quantity(std::string_view text);

inline constexpr std::int64_t kSecondsPerDay = 86400;

// Calendar partition settings. The epoch is the wall-clock instant of tau = 0
// and must fall on midnight. Year cycles are anchored at the epoch's
// anniversaries; day cycles at midnight.
struct GridConfig {
    std::chrono::sys_days epoch{std::chrono::year{2012} / std::chrono::January / 1};
    double step_seconds = 900.0;
    std::int64_t horizon_steps = 0;
    // Start day (0-based, counted from the cycle's anniversary) of each year part.
    std::vector<int> year_part_boundaries{0};
    // Start second-of-day of each day part.
    std::vector<int> day_part_boundaries{0};
    std::vector<std::string> weather_labels;
    // When false the week is not split into weekend and business days (week_part = 0).
    bool split_week = true;

    void validate() const;
    int year_parts() const { return static_cast<int>(year_part_boundaries.size()); }
    int day_parts() const { return static_cast<int>(day_part_boundaries.size()); }
    double horizon_seconds() const { return step_seconds * static_cast<double>(horizon_steps); }
    bool has_weather(std::string_view label) const;
};

struct Observation {
    std::int64_t tau = 0;
    int community = 0;
    double demand_kw = 0.0;
    double generation_kw = 0.0;
    double temperature_c = 0.0;
    std::string weather;

    double value(Quantity q) const { return q == Quantity::demand ? demand_kw : generation_kw; }
    bool operator==(const Observation&) const = default;
};

inline constexpr int kWeekend = 1;
inline constexpr int kBusinessDay = 2;
inline constexpr int kWholeWeek = 0;

// The (i, j, k, w, q) cell family a long-term model is fitted for.
struct CellFamily {
    int year_part = 1;
    int week_part = kBusinessDay;
    int day_part = 1;
    std::string weather;
    int community = 0;

    std::string id() const;
    auto operator<=>(const CellFamily&) const = default;
};

// One atomic cell: a family restricted to a single day. The calendar
// coordinates that feed the regression are functions of day_index.
struct CalendarKey {
    int year_part = 1;
    int week_part = kBusinessDay;
    int day_part = 1;
    std::string weather;
    int community = 0;
    std::int64_t day_index = 1;

    int years_elapsed = 0;
    int weeks_into_year_part = 0;
    int days_into_week_part = 0;

    CellFamily family() const { return {year_part, week_part, day_part, weather, community}; }
    auto operator<=>(const CalendarKey&) const = default;
};

struct Segment {
    CalendarKey key;
    // Distinguishes weather runs that share a key within one day part.
    int run = 0;
    std::vector<Observation> observations;
};

struct TrainingRow {
    double years_elapsed = 0.0;
    double weeks_into_year_part = 0.0;
    double days_into_week_part = 0.0;
    double temperature_c = 0.0;
    double y = 0.0;
};

CalendarKey partition_key(double timestamp_seconds, std::string_view weather, int community,
                          const GridConfig& config);

inline CalendarKey partition_key(const Observation& obs, const GridConfig& config) {
    return partition_key(static_cast<double>(obs.tau) * config.step_seconds, obs.weather,
                         obs.community, config);
}

Segment segment_observations(std::span<const Observation> dataset, const CalendarKey& key,
                             const GridConfig& config);

// Splits the dataset into segments: equal keys, further split into maximal runs
// of consecutive observations. Ordered by (community, tau of first sample).
std::vector<Segment> partition_dataset(std::span<const Observation> dataset, const GridConfig& config);

TrainingRow aggregate_segment(const Segment& segment, Quantity quantity);

// CSV ingestion; header `tau,community,demand_kw,generation_kw,temperature_c,weather`.
std::vector<Observation> parse_csv(std::istream& in, const GridConfig& config);
std::vector<Observation> load_csv(const std::filesystem::path& path, const GridConfig& config);
void write_csv(std::ostream& out, std::span<const Observation> dataset);

// Values of one quantity for one community, ordered by tau.
std::vector<double> community_series(std::span<const Observation> dataset, int community, Quantity quantity);
std::vector<int> communities(std::span<const Observation> dataset);

}  // namespace gridcast
