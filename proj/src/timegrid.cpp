#include "gridcast/timegrid.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

namespace gridcast {

namespace chr = std::chrono;

std::string_view to_string(Quantity q) {
    return q == Quantity::demand ? "demand" : "generation";
}

Quantity parse_quantity(std::string_view text) {
    if (text == "demand") return Quantity::demand;
    if (text == "generation") return Quantity::generation;
    throw std::invalid_argument("unknown quantity '" + std::string(text) + "'");
}

namespace {

void check_boundaries(const std::vector<int>& cuts, int period, const char* name) {
    if (cuts.empty()) throw std::invalid_argument(std::string(name) + " must not be empty");
    if (cuts.front() != 0) throw std::invalid_argument(std::string(name) + " must start at 0");
    for (std::size_t i = 1; i < cuts.size(); ++i) {
        if (cuts[i] <= cuts[i - 1])
            throw std::invalid_argument(std::string(name) + " must be strictly increasing");
    }
    if (cuts.back() >= period)
        throw std::invalid_argument(std::string(name) + " exceed the cycle length");
}

// Index (1-based) of the half-open interval [cuts[i-1], cuts[i]) containing value.
int part_of(const std::vector<int>& cuts, double value) {
    const auto it = std::upper_bound(cuts.begin(), cuts.end(), value,
                                     [](double v, int c) { return v < static_cast<double>(c); });
    return static_cast<int>(it - cuts.begin());
}

chr::sys_days anniversary(const chr::year_month_day& epoch, int years) {
    const chr::year_month_day date{epoch.year() + chr::years{years}, epoch.month(), epoch.day()};
    if (date.ok()) return chr::sys_days{date};
    // Feb 29 epoch in a non-leap year: the anniversary is Mar 1.
    return chr::sys_days{chr::year_month_day_last{date.year(), chr::month_day_last{date.month()}}} +
           chr::days{1};
}

}  // namespace

void GridConfig::validate() const {
    if (!(step_seconds > 0.0) || !std::isfinite(step_seconds))
        throw std::invalid_argument("step_seconds must be positive");
    if (horizon_steps < 1) throw std::invalid_argument("horizon_steps must be positive");
    check_boundaries(year_part_boundaries, 366, "year_part_boundaries");
    check_boundaries(day_part_boundaries, static_cast<int>(kSecondsPerDay), "day_part_boundaries");
    if (weather_labels.empty()) throw std::invalid_argument("weather_labels must not be empty");
    std::set<std::string> unique(weather_labels.begin(), weather_labels.end());
    if (unique.size() != weather_labels.size())
        throw std::invalid_argument("weather_labels contain duplicates");
}

bool GridConfig::has_weather(std::string_view label) const {
    return std::find(weather_labels.begin(), weather_labels.end(), label) != weather_labels.end();
}

std::string CellFamily::id() const {
    return "q" + std::to_string(community) + "_i" + std::to_string(year_part) + "_j" +
           std::to_string(week_part) + "_k" + std::to_string(day_part) + "_w" + weather;
}

CalendarKey partition_key(double timestamp_seconds, std::string_view weather, int community,
                          const GridConfig& config) {
    if (!(timestamp_seconds >= 0.0) || timestamp_seconds > config.horizon_seconds())
        throw std::out_of_range("timestamp " + std::to_string(timestamp_seconds) + " s outside [0, T*u]");
    if (!config.has_weather(weather))
        throw std::invalid_argument("unknown weather label '" + std::string(weather) + "'");

    const auto day_offset = static_cast<std::int64_t>(std::floor(timestamp_seconds / kSecondsPerDay));
    const double second_of_day = timestamp_seconds - static_cast<double>(day_offset * kSecondsPerDay);
    const chr::sys_days date = config.epoch + chr::days{day_offset};

    const chr::year_month_day epoch_ymd{config.epoch};
    const chr::year_month_day ymd{date};
    int years = static_cast<int>(ymd.year()) - static_cast<int>(epoch_ymd.year());
    if (anniversary(epoch_ymd, years) > date) --years;
    const int day_of_cycle = static_cast<int>((date - anniversary(epoch_ymd, years)).count());

    CalendarKey key;
    key.weather = std::string(weather);
    key.community = community;
    key.day_index = day_offset + 1;
    key.years_elapsed = years;
    key.year_part = part_of(config.year_part_boundaries, day_of_cycle);
    key.weeks_into_year_part = (day_of_cycle - config.year_part_boundaries[key.year_part - 1]) / 7;
    key.day_part = part_of(config.day_part_boundaries, second_of_day);

    // ISO numbering: Monday = 1 ... Sunday = 7.
    const unsigned iso = chr::weekday{date}.iso_encoding();
    if (!config.split_week) {
        key.week_part = kWholeWeek;
        key.days_into_week_part = static_cast<int>(iso) - 1;
    } else if (iso >= 6) {
        key.week_part = kWeekend;
        key.days_into_week_part = static_cast<int>(iso) - 6;
    } else {
        key.week_part = kBusinessDay;
        key.days_into_week_part = static_cast<int>(iso) - 1;
    }
    return key;
}

Segment segment_observations(std::span<const Observation> dataset, const CalendarKey& key,
                             const GridConfig& config) {
    Segment segment{key, 0, {}};
    for (const auto& obs : dataset) {
        if (obs.community != key.community || obs.weather != key.weather) continue;
        if (partition_key(obs, config) == key) segment.observations.push_back(obs);
    }
    std::sort(segment.observations.begin(), segment.observations.end(),
              [](const Observation& a, const Observation& b) { return a.tau < b.tau; });
    return segment;
}

std::vector<Segment> partition_dataset(std::span<const Observation> dataset, const GridConfig& config) {
    std::vector<const Observation*> order;
    order.reserve(dataset.size());
    for (const auto& obs : dataset) order.push_back(&obs);
    std::sort(order.begin(), order.end(), [](const Observation* a, const Observation* b) {
        return a->community != b->community ? a->community < b->community : a->tau < b->tau;
    });

    std::vector<Segment> segments;
    std::map<CalendarKey, int> runs;
    for (const Observation* obs : order) {
        CalendarKey key = partition_key(*obs, config);
        if (segments.empty() || segments.back().key != key) {
            const int run = runs[key]++;
            segments.push_back(Segment{std::move(key), run, {}});
        }
        segments.back().observations.push_back(*obs);
    }
    return segments;
}

TrainingRow aggregate_segment(const Segment& segment, Quantity quantity) {
    if (segment.observations.empty()) throw std::invalid_argument("cannot aggregate an empty segment");
    double value_sum = 0.0;
    double temperature_sum = 0.0;
    for (const auto& obs : segment.observations) {
        value_sum += obs.value(quantity);
        temperature_sum += obs.temperature_c;
    }
    const auto n = static_cast<double>(segment.observations.size());
    return TrainingRow{
        static_cast<double>(segment.key.years_elapsed),
        static_cast<double>(segment.key.weeks_into_year_part),
        static_cast<double>(segment.key.days_into_week_part),
        temperature_sum / n,
        value_sum / n,
    };
}

std::vector<double> community_series(std::span<const Observation> dataset, int community, Quantity quantity) {
    std::vector<const Observation*> rows;
    for (const auto& obs : dataset)
        if (obs.community == community) rows.push_back(&obs);
    std::sort(rows.begin(), rows.end(), [](const Observation* a, const Observation* b) { return a->tau < b->tau; });
    std::vector<double> out;
    out.reserve(rows.size());
    for (const Observation* obs : rows) out.push_back(obs->value(quantity));
    return out;
}

std::vector<int> communities(std::span<const Observation> dataset) {
    std::set<int> ids;
    for (const auto& obs : dataset) ids.insert(obs.community);
    return {ids.begin(), ids.end()};
}

}  // namespace gridcast
