#include "gridcast/serialize.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace gridcast {

namespace chr = std::chrono;

chr::sys_days parse_epoch(std::string_view text) {
    int y = 0, m = 0, d = 0, hh = 0, mm = 0, ss = 0;
    const std::string s(text);
    char tail = '\0';
    const int fields = std::sscanf(s.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%c", &y, &m, &d, &hh, &mm, &ss, &tail);
    const bool date_only = fields == 3 && s.size() == 10;
    const bool with_time = (fields == 6 && s.size() == 19) || (fields == 7 && tail == 'Z' && s.size() == 20);
    if (!date_only && !with_time) throw std::invalid_argument("malformed ISO-8601 epoch '" + s + "'");
    if (hh != 0 || mm != 0 || ss != 0) throw std::invalid_argument("epoch must be at midnight: '" + s + "'");
    const chr::year_month_day ymd{chr::year{y}, chr::month{static_cast<unsigned>(m)}, chr::day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) throw std::invalid_argument("invalid calendar date '" + s + "'");
    return chr::sys_days{ymd};
}

std::string format_epoch(chr::sys_days epoch) {
    const chr::year_month_day ymd{epoch};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT00:00:00Z", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

Json to_json(const GridConfig& c) {
    return Json{
        {"epoch", format_epoch(c.epoch)},
        {"step_seconds", c.step_seconds},
        {"horizon_steps", c.horizon_steps},
        {"year_part_boundaries", c.year_part_boundaries},
        {"day_part_boundaries", c.day_part_boundaries},
        {"weather_labels", c.weather_labels},
        {"split_week", c.split_week},
    };
}

GridConfig grid_config_from_json(const Json& j) {
    GridConfig c;
    c.epoch = parse_epoch(j.at("epoch").get<std::string>());
    c.step_seconds = j.at("step_seconds").get<double>();
    c.horizon_steps = j.at("horizon_steps").get<std::int64_t>();
    c.year_part_boundaries = j.at("year_part_boundaries").get<std::vector<int>>();
    c.day_part_boundaries = j.at("day_part_boundaries").get<std::vector<int>>();
    c.weather_labels = j.at("weather_labels").get<std::vector<std::string>>();
    c.split_week = j.value("split_week", true);
    c.validate();
    return c;
}

GridConfig load_grid_config(const std::filesystem::path& path) {
    return grid_config_from_json(read_json(path));
}

Json to_json(const MleFit& fit) {
    return Json{{"cell", fit.cell}, {"beta", fit.beta}, {"sigma2", fit.sigma2}, {"p", fit.p}};
}

MleFit mle_fit_from_json(const Json& j) {
    MleFit fit;
    fit.cell = j.at("cell").get<std::string>();
    const auto beta = j.at("beta").get<std::vector<double>>();
    if (beta.size() != fit.beta.size()) throw std::invalid_argument("beta must have 5 entries");
    std::copy(beta.begin(), beta.end(), fit.beta.begin());
    fit.sigma2 = j.at("sigma2").get<double>();
    fit.p = j.at("p").get<std::size_t>();
    if (fit.sigma2 < 0.0) throw std::invalid_argument("sigma2 must be non-negative");
    return fit;
}

Json to_json(const ArModel& model) {
    Json j{{"kind", "ar"}, {"a", model.order()}, {"phi", model.phi}, {"sigma2", model.sigma2}};
    if (model.mu) j["mu"] = *model.mu;
    return j;
}

Json to_json(const DiffArModel& model) {
    return Json{{"kind", "diff_ar"}, {"a", model.order()}, {"phi", model.phi}, {"sigma2", model.sigma2}};
}

RealTimeModel realtime_model_from_json(const Json& j) {
    const auto kind = j.at("kind").get<std::string>();
    const auto a = j.at("a").get<std::size_t>();
    auto phi = j.at("phi").get<std::vector<double>>();
    if (a < 1 || phi.size() != a) throw std::invalid_argument("model order does not match phi length");
    const double sigma2 = j.at("sigma2").get<double>();
    if (sigma2 < 0.0) throw std::invalid_argument("sigma2 must be non-negative");
    const bool stationary = is_stationary(phi);
    if (kind == "ar") {
        ArModel m{std::move(phi), std::nullopt, sigma2, stationary};
        if (j.contains("mu")) m.mu = j.at("mu").get<double>();
        return m;
    }
    if (kind == "diff_ar") return DiffArModel{std::move(phi), sigma2, stationary};
    throw std::invalid_argument("unknown model kind '" + kind + "'");
}

Json to_json(const ProcessSpec& s) {
    return Json{{"profile", to_string(s.profile)}, {"base_kw", s.base_kw},   {"amplitude_kw", s.amplitude_kw},
                {"ar_phi", s.ar_phi},              {"noise_sigma", s.noise_sigma}, {"steps_per_day", s.steps_per_day},
                {"peak_hour", s.peak_hour}};
}

ProcessSpec process_spec_from_json(const Json& j) {
    ProcessSpec s;
    s.profile = parse_profile(j.value("profile", std::string("flat")));
    s.base_kw = j.value("base_kw", 0.0);
    s.amplitude_kw = j.value("amplitude_kw", 0.0);
    s.ar_phi = j.value("ar_phi", 0.0);
    s.noise_sigma = j.value("noise_sigma", 0.0);
    s.steps_per_day = j.value("steps_per_day", 0.0);
    s.peak_hour = j.value("peak_hour", 19.0);
    return s;
}

Scenario scenario_from_json(const Json& j) {
    Scenario sc;
    sc.config.step_seconds = j.value("step_seconds", 900.0);
    sc.config.horizon_steps = j.at("horizon_steps").get<std::size_t>();
    sc.config.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("bulk")) {
        const auto& b = j.at("bulk");
        sc.config.bulk.kind = parse_bulk_policy(b.value("policy", std::string("unbounded")));
        sc.config.bulk.p_max_kw = b.value("p_max_kw", 0.0);
    }
    if (j.contains("storage_cap_kwh") && !j.at("storage_cap_kwh").is_null())
        sc.config.storage_cap_kwh = j.at("storage_cap_kwh").get<double>();
    sc.train_steps = j.value("train_steps", sc.train_steps);

    const double steps_per_day = 86400.0 / sc.config.step_seconds;
    for (const auto& cj : j.at("communities")) {
        CommunityScenario c;
        c.id = cj.at("id").get<int>();
        c.s_q = cj.at("s_q").get<double>();
        c.lambda = cj.at("lambda").get<double>();
        if (cj.contains("initial_storage_kwh")) c.initial_storage_kwh = cj.at("initial_storage_kwh").get<double>();
        c.demand = process_spec_from_json(cj.at("demand"));
        c.generation = process_spec_from_json(cj.at("generation"));
        if (c.demand.steps_per_day <= 0.0) c.demand.steps_per_day = steps_per_day;
        if (c.generation.steps_per_day <= 0.0) c.generation.steps_per_day = steps_per_day;
        c.demand_order = cj.value("a", c.demand_order);
        c.generation_order = cj.value("a_gen", c.generation_order);
        auto load_model = [](const Json& mj) {
            const auto model = realtime_model_from_json(mj);
            if (!std::holds_alternative<DiffArModel>(model))
                throw std::invalid_argument("community forecasters must be diff_ar models");
            return std::get<DiffArModel>(model);
        };
        if (cj.contains("demand_model")) c.demand_model = load_model(cj.at("demand_model"));
        if (cj.contains("generation_model")) c.generation_model = load_model(cj.at("generation_model"));
        sc.communities.push_back(std::move(c));
    }
    if (sc.communities.empty()) throw std::invalid_argument("scenario has no communities");
    sc.config.validate();
    return sc;
}

Json to_json(const Scenario& sc) {
    Json j{{"step_seconds", sc.config.step_seconds},
           {"horizon_steps", sc.config.horizon_steps},
           {"seed", sc.config.seed},
           {"bulk", {{"policy", to_string(sc.config.bulk.kind)}, {"p_max_kw", sc.config.bulk.p_max_kw}}},
           {"train_steps", sc.train_steps},
           {"communities", Json::array()}};
    if (sc.config.storage_cap_kwh) j["storage_cap_kwh"] = *sc.config.storage_cap_kwh;
    for (const auto& c : sc.communities) {
        Json cj{{"id", c.id},
                {"s_q", c.s_q},
                {"lambda", c.lambda},
                {"demand", to_json(c.demand)},
                {"generation", to_json(c.generation)},
                {"a", c.demand_order},
                {"a_gen", c.generation_order}};
        if (c.initial_storage_kwh) cj["initial_storage_kwh"] = *c.initial_storage_kwh;
        if (c.demand_model) cj["demand_model"] = to_json(*c.demand_model);
        if (c.generation_model) cj["generation_model"] = to_json(*c.generation_model);
        j["communities"].push_back(std::move(cj));
    }
    return j;
}

Json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return Json::parse(in);
}

void write_json(const std::filesystem::path& path, const Json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace gridcast
