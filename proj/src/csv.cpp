#include "gridcast/errors.hpp"
#include "gridcast/timegrid.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <utility>

namespace gridcast {

namespace {

constexpr std::string_view kHeader = "tau,community,demand_kw,generation_kw,temperature_c,weather";

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

template <typename T>
T parse_number(std::string_view field, std::size_t line, const char* column) {
    T value{};
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty())
        throw DataError(line, std::string("malformed ") + column + " '" + std::string(field) + "'");
    if constexpr (std::is_floating_point_v<T>) {
        if (!std::isfinite(value)) throw DataError(line, std::string(column) + " is not finite");
    }
    return value;
}

void write_double(std::ostream& out, double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    out.write(buf, ptr - buf);
}

}  // namespace

std::vector<Observation> parse_csv(std::istream& in, const GridConfig& config) {
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) throw DataError(0, "empty input: header required");
    ++line_no;
    if (trim(line) != kHeader) throw DataError(1, "expected header '" + std::string(kHeader) + "'");

    std::vector<Observation> rows;
    std::map<std::pair<int, std::int64_t>, std::size_t> seen;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split(line);
        if (fields.size() != 6)
            throw DataError(line_no, "expected 6 fields, found " + std::to_string(fields.size()));

        Observation obs;
        obs.tau = parse_number<std::int64_t>(fields[0], line_no, "tau");
        obs.community = parse_number<int>(fields[1], line_no, "community");
        obs.demand_kw = parse_number<double>(fields[2], line_no, "demand_kw");
        obs.generation_kw = parse_number<double>(fields[3], line_no, "generation_kw");
        obs.temperature_c = parse_number<double>(fields[4], line_no, "temperature_c");
        obs.weather = std::string(fields[5]);

        if (obs.tau < 0 || obs.tau > config.horizon_steps)
            throw DataError(line_no, "tau " + std::to_string(obs.tau) + " outside [0, " +
                                         std::to_string(config.horizon_steps) + "]");
        if (obs.demand_kw < 0.0) throw DataError(line_no, "negative demand_kw");
        if (obs.generation_kw < 0.0) throw DataError(line_no, "negative generation_kw");
        if (!config.has_weather(obs.weather))
            throw DataError(line_no, "weather label '" + obs.weather + "' not in config");

        const auto [it, inserted] = seen.emplace(std::pair{obs.community, obs.tau}, line_no);
        if (!inserted)
            throw DataError(line_no, "duplicate (community " + std::to_string(obs.community) + ", tau " +
                                         std::to_string(obs.tau) + "), first seen on line " +
                                         std::to_string(it->second));
        rows.push_back(std::move(obs));
    }

    std::stable_sort(rows.begin(), rows.end(), [](const Observation& a, const Observation& b) {
        return a.tau != b.tau ? a.tau < b.tau : a.community < b.community;
    });
    return rows;
}

std::vector<Observation> load_csv(const std::filesystem::path& path, const GridConfig& config) {
    std::ifstream in(path);
    if (!in) throw DataError(0, "cannot open " + path.string());
    return parse_csv(in, config);
}

void write_csv(std::ostream& out, std::span<const Observation> dataset) {
    out << kHeader << '\n';
    for (const auto& obs : dataset) {
        out << obs.tau << ',' << obs.community << ',';
        write_double(out, obs.demand_kw);
        out << ',';
        write_double(out, obs.generation_kw);
        out << ',';
        write_double(out, obs.temperature_c);
        out << ',' << obs.weather << '\n';
    }
}

}  // namespace gridcast
