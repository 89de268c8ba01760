#include "gridcast/cli.hpp"

#include "gridcast/adequacy.hpp"
#include "gridcast/arima.hpp"
#include "gridcast/errors.hpp"
#include "gridcast/mle.hpp"
#include "gridcast/scenario.hpp"
#include "gridcast/serialize.hpp"
#include "gridcast/timegrid.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

namespace gridcast::cli {

namespace fs = std::filesystem;

namespace {

struct GlobalOptions {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out_dir = ".";
};

struct RunManifest {
    std::string command;
    std::string config;
    std::vector<std::string> inputs;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> outputs;
    double wall_clock_seconds = 0.0;
};

std::string format_number(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

double parse_double(std::string_view text) {
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\r' || text.back() == '\t')) text.remove_suffix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty())
        throw std::invalid_argument("not a number: '" + std::string(text) + "'");
    return v;
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_double(item));
    if (out.empty()) throw std::invalid_argument("empty list");
    return out;
}

// "a,b,c" or "start:stop:step" (inclusive of stop within rounding).
std::vector<double> parse_grid(const std::string& text) {
    if (text.find(':') == std::string::npos) return parse_list(text);
    std::vector<double> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(parse_double(item));
    if (parts.size() != 3 || !(parts[2] > 0.0) || parts[1] < parts[0])
        throw std::invalid_argument("grid must be start:stop:step with step > 0");
    std::vector<double> out;
    const auto count = static_cast<long>(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9));
    for (long i = 0; i <= count; ++i) out.push_back(parts[0] + static_cast<double>(i) * parts[2]);
    return out;
}

std::vector<double> read_values(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::vector<double> out;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto field = line.substr(0, line.find(','));
        try {
            out.push_back(parse_double(field));
        } catch (const std::invalid_argument&) {
            if (!first) throw;  // a header line is allowed
        }
        first = false;
    }
    return out;
}

std::vector<FeatureVector> read_features(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::vector<FeatureVector> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::vector<double> values;
        try {
            values = parse_list(line);
        } catch (const std::invalid_argument&) {
            if (line_no == 1) continue;
            throw DataError(line_no, "malformed feature row");
        }
        if (values.size() != 4) throw DataError(line_no, "feature rows need 4 values");
        out.push_back({values[0], values[1], values[2], values[3]});
    }
    return out;
}

GridConfig require_config(const GlobalOptions& g) {
    if (g.config.empty()) throw std::invalid_argument("--config is required for this command");
    return load_grid_config(g.config);
}

void write_manifest(const GlobalOptions& g, RunManifest m) {
    Json j{{"command", m.command},
           {"config", m.config},
           {"inputs", m.inputs},
           {"seed", m.seed ? Json(*m.seed) : Json(nullptr)},
           {"outputs", m.outputs},
           {"tool_version", kToolVersion},
           {"wall_clock_seconds", m.wall_clock_seconds}};
    write_json(fs::path(g.out_dir) / (m.command + ".manifest.json"), j);
}

class Timer {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
}

std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

// ---- ingest ----------------------------------------------------------------

int cmd_ingest(const GlobalOptions& g, const std::string& csv, std::ostream& out) {
    Timer timer;
    const auto config = require_config(g);
    const auto dataset = load_csv(csv, config);

    std::set<CalendarKey> cells;
    for (const auto& obs : dataset) cells.insert(partition_key(obs, config));
    const auto ids = communities(dataset);

    ensure_dir(g.out_dir);
    const fs::path data_path = fs::path(g.out_dir) / "dataset.csv";
    {
        auto f = open_output(data_path);
        write_csv(f, dataset);
    }
    const fs::path summary_path = fs::path(g.out_dir) / "ingest_summary.json";
    const Json summary{{"rows", dataset.size()}, {"communities", ids.size()}, {"cells_populated", cells.size()}};
    write_json(summary_path, summary);
    out << "rows=" << dataset.size() << " communities=" << ids.size() << " cells_populated=" << cells.size()
        << '\n';
    write_manifest(g, {"ingest", g.config, {csv}, g.seed, {data_path.string(), summary_path.string()},
                       timer.seconds()});
    return 0;
}

// ---- fit-longterm ----------------------------------------------------------

int cmd_fit_longterm(const GlobalOptions& g, const std::string& csv, const std::string& which, std::ostream& out) {
    Timer timer;
    const auto config = require_config(g);
    const auto dataset = load_csv(csv, config);

    std::vector<Quantity> quantities;
    if (which == "both") quantities = {Quantity::demand, Quantity::generation};
    else quantities = {parse_quantity(which)};

    const fs::path root = fs::path(g.out_dir) / "longterm";
    std::vector<std::string> outputs;
    Json skipped = Json::array();
    for (Quantity q : quantities) {
        GridConfig cfg = config;
        // Generation does not follow the working week.
        if (q == Quantity::generation) cfg.split_week = false;
        const auto result = fit_long_term(dataset, cfg, q);
        const fs::path dir = root / std::string(to_string(q));
        ensure_dir(dir);
        for (const auto& fit : result.fits) {
            const fs::path path = dir / (fit.cell + ".json");
            write_json(path, to_json(fit));
            outputs.push_back(path.string());
        }
        for (const auto& s : result.skipped)
            skipped.push_back({{"quantity", to_string(q)}, {"cell", s.cell}, {"p", s.p}, {"reason", s.reason}});
        out << to_string(q) << ": fitted=" << result.fits.size() << " skipped=" << result.skipped.size() << '\n';
    }
    ensure_dir(root);
    const fs::path skipped_path = root / "skipped.json";
    write_json(skipped_path, skipped);
    outputs.push_back(skipped_path.string());
    write_manifest(g, {"fit-longterm", g.config, {csv}, g.seed, outputs, timer.seconds()});
    return 0;
}

// ---- fit-realtime ----------------------------------------------------------

int cmd_fit_realtime(const GlobalOptions& g, const std::string& csv, std::size_t a, std::size_t a_gen,
                     std::ostream& out) {
    Timer timer;
    const auto config = require_config(g);
    const auto dataset = load_csv(csv, config);
    const fs::path dir = fs::path(g.out_dir) / "realtime";
    ensure_dir(dir);

    std::vector<std::string> outputs;
    for (int q : communities(dataset)) {
        for (Quantity quantity : {Quantity::demand, Quantity::generation}) {
            const auto series = community_series(dataset, q, quantity);
            const auto model = fit_diff_ar(series, quantity == Quantity::demand ? a : a_gen);
            const fs::path path = dir / ("q" + std::to_string(q) + "_" + std::string(to_string(quantity)) + ".json");
            write_json(path, to_json(model));
            outputs.push_back(path.string());
            out << "q" << q << ' ' << to_string(quantity) << ": a=" << model.order()
                << " sigma2=" << format_number(model.sigma2) << (model.stationary ? "" : " (non-stationary)")
                << '\n';
        }
    }
    write_manifest(g, {"fit-realtime", g.config, {csv}, g.seed, outputs, timer.seconds()});
    return 0;
}

// ---- forecast --------------------------------------------------------------

struct ForecastArgs {
    std::vector<std::string> models;
    int horizon = 1;
    std::string history_file;
    std::string history_values;
    std::string drift_model;
    std::string features;
    std::string features_file;
};

int cmd_forecast(const GlobalOptions& g, const ForecastArgs& a, std::ostream& out) {
    Timer timer;
    if (a.models.empty()) throw std::invalid_argument("--model is required");
    if (a.horizon < 1) throw std::invalid_argument("--horizon must be at least 1");
    ensure_dir(g.out_dir);
    const fs::path csv_path = fs::path(g.out_dir) / "forecast.csv";
    std::vector<std::string> inputs = a.models;
    std::vector<std::string> outputs{csv_path.string()};

    auto history = [&]() -> std::vector<double> {
        if (!a.history_file.empty()) {
            inputs.push_back(a.history_file);
            return read_values(a.history_file);
        }
        if (!a.history_values.empty()) return parse_list(a.history_values);
        throw std::invalid_argument("--history or --history-values is required for real-time models");
    };

    std::ostringstream csv;
    csv << "step,mean,variance\n";
    auto emit = [&](int step, double mean, double variance) {
        csv << step << ',' << format_number(mean) << ',' << format_number(variance) << '\n';
    };

    const Json first = read_json(a.models.front());
    if (first.contains("beta")) {
        std::vector<MleFit> fits;
        for (const auto& path : a.models) fits.push_back(mle_fit_from_json(read_json(path)));
        std::vector<FeatureVector> xs;
        if (!a.features_file.empty()) {
            xs = read_features(a.features_file);
            inputs.push_back(a.features_file);
        } else if (!a.features.empty()) {
            const auto v = parse_list(a.features);
            if (v.size() != 4) throw std::invalid_argument("--features needs 4 values");
            xs.assign(static_cast<std::size_t>(a.horizon), FeatureVector{v[0], v[1], v[2], v[3]});
        } else {
            throw std::invalid_argument("long-term forecasts need --features or --features-file");
        }
        // A single model is reused for every cell of the horizon.
        if (fits.size() == 1 && xs.size() > 1) fits.assign(xs.size(), fits.front());
        for (std::size_t i = 0; i < xs.size() && i < fits.size(); ++i) {
            const auto p = predict(fits[i], xs[i]);
            emit(static_cast<int>(i + 1), p.mean, p.variance);
        }
        const auto total = forecast_horizon(fits, xs);
        const fs::path total_path = fs::path(g.out_dir) / "forecast_total.json";
        write_json(total_path, Json{{"cells", xs.size()}, {"mean", total.mean}, {"variance", total.variance}});
        outputs.push_back(total_path.string());
    } else {
        if (a.models.size() != 1) throw std::invalid_argument("real-time forecasts take exactly one --model");
        const auto model = realtime_model_from_json(first);
        const auto values = history();
        if (const auto* diff = std::get_if<DiffArModel>(&model)) {
            const std::size_t need = diff->order() + 1;
            if (values.size() < need)
                throw std::invalid_argument("history needs at least " + std::to_string(need) + " values");
            const std::span<const double> window(values.data() + values.size() - need, need);
            for (const auto& f : forecast_path(*diff, window, a.horizon)) emit(f.horizon, f.mean, f.variance);
        } else {
            const auto& ar = std::get<ArModel>(model);
            if (a.horizon != 1) throw std::invalid_argument("AR-with-drift forecasts support --horizon 1 only");
            if (a.drift_model.empty() || a.features.empty())
                throw std::invalid_argument("AR models need --drift-model and --features for the drift");
            inputs.push_back(a.drift_model);
            const auto drift_fit = mle_fit_from_json(read_json(a.drift_model));
            const auto v = parse_list(a.features);
            if (v.size() != 4) throw std::invalid_argument("--features needs 4 values");
            const auto drift = predict(drift_fit, {v[0], v[1], v[2], v[3]});
            if (values.size() < ar.order())
                throw std::invalid_argument("history needs at least " + std::to_string(ar.order()) + " values");
            const std::span<const double> window(values.data() + values.size() - ar.order(), ar.order());
            const auto f = forecast_ar_with_drift(ar, window, drift.mean, drift.variance);
            emit(1, f.mean, f.variance);
        }
    }

    {
        auto f = open_output(csv_path);
        f << csv.str();
    }
    out << csv.str();
    write_manifest(g, {"forecast", g.config, inputs, g.seed, outputs, timer.seconds()});
    return 0;
}

// ---- adequacy --------------------------------------------------------------

struct AdequacyArgs {
    std::string lambdas = "0.5,1,2";
    std::string sigma2s = "0.5,1,2";
    std::string t_grid = "0.5:48:0.5";
    bool monte_carlo = false;
    std::size_t paths = 10000;
    std::size_t steps = 1000;
    bool discrete = false;
};

int cmd_adequacy(const GlobalOptions& g, const AdequacyArgs& a, std::ostream& out) {
    Timer timer;
    const auto lambdas = parse_list(a.lambdas);
    const auto sigma2s = parse_list(a.sigma2s);
    const auto t_grid = parse_grid(a.t_grid);
    auto curves = curve_table(lambdas, sigma2s, t_grid);
    if (a.monte_carlo) {
        MonteCarloOptions mc;
        mc.n_paths = a.paths;
        mc.n_steps = a.steps;
        mc.seed = g.seed.value_or(0);
        mc.monitoring = a.discrete ? Monitoring::discrete : Monitoring::bridge;
        for (std::size_t i = 0; i < curves.size(); ++i) {
            // One independent stream per curve.
            mc.seed = derive_seed(g.seed.value_or(0), i);
            attach_monte_carlo(curves[i], mc);
        }
    }
    ensure_dir(g.out_dir);
    const fs::path path = fs::path(g.out_dir) / "adequacy.csv";
    {
        auto f = open_output(path);
        write_curve_csv(f, curves);
    }
    out << "curves=" << curves.size() << " points=" << t_grid.size() << " -> " << path.string() << '\n';
    write_manifest(g, {"adequacy", g.config, {}, g.seed, {path.string()}, timer.seconds()});
    return 0;
}

// ---- simulate --------------------------------------------------------------

int cmd_simulate(const GlobalOptions& g, const std::string& scenario_path, const std::string& bulk_override,
                 std::ostream& out) {
    Timer timer;
    auto scenario = scenario_from_json(read_json(scenario_path));
    if (g.seed) scenario.config.seed = *g.seed;
    if (!bulk_override.empty()) scenario.config.bulk.kind = parse_bulk_policy(bulk_override);

    const auto trace = run_scenario(scenario);
    ensure_dir(g.out_dir);
    const fs::path trace_path = fs::path(g.out_dir) / "trace.csv";
    {
        auto f = open_output(trace_path);
        write_trace_csv(f, trace);
    }
    Json summary = Json::array();
    for (const auto& s : summarize(trace)) {
        summary.push_back({{"q", s.q},
                           {"empirical_adequacy", s.empirical_adequacy},
                           {"adequate_fraction", s.adequate_fraction},
                           {"unmet_kwh", s.unmet_kwh},
                           {"bulk_kwh", s.bulk_kwh},
                           {"bulk_requests", s.bulk_requests}});
        out << "q" << s.q << ": adequacy=" << format_number(s.empirical_adequacy)
            << " adequate_fraction=" << format_number(s.adequate_fraction)
            << " unmet_kwh=" << format_number(s.unmet_kwh) << " bulk_kwh=" << format_number(s.bulk_kwh) << '\n';
    }
    const fs::path summary_path = fs::path(g.out_dir) / "simulation_summary.json";
    write_json(summary_path, Json{{"seed", scenario.config.seed},
                                  {"bulk_policy", to_string(scenario.config.bulk.kind)},
                                  {"communities", summary}});
    write_manifest(g, {"simulate", g.config, {scenario_path}, scenario.config.seed,
                       {trace_path.string(), summary_path.string()}, timer.seconds()});
    return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Two-tier demand/generation forecasting and storage adequacy toolkit", "gridcast"};
    app.require_subcommand(1);

    GlobalOptions g;
    std::uint64_t seed = 0;
    app.add_option("--config", g.config, "grid configuration JSON")->check(CLI::ExistingFile);
    auto* seed_opt = app.add_option("--seed", seed, "top-level random seed");
    app.add_option("--out-dir", g.out_dir, "directory for outputs and the run manifest");

    std::string csv;
    auto* ingest = app.add_subcommand("ingest", "validate a CSV dataset and summarise it");
    ingest->add_option("csv", csv, "input CSV")->required()->check(CLI::ExistingFile);

    std::string quantity = "both";
    auto* fit_long = app.add_subcommand("fit-longterm", "fit per-cell maximum-likelihood regressions");
    fit_long->add_option("dataset", csv, "dataset CSV")->required()->check(CLI::ExistingFile);
    fit_long->add_option("--quantity", quantity, "demand, generation or both")
        ->check(CLI::IsMember({"demand", "generation", "both"}));

    std::size_t a = kDefaultArOrder;
    std::size_t a_gen = kDefaultArOrder;
    auto* fit_rt = app.add_subcommand("fit-realtime", "fit ARIMA(a,1,0) forecasters per community");
    fit_rt->add_option("dataset", csv, "dataset CSV")->required()->check(CLI::ExistingFile);
    fit_rt->add_option("--a", a, "demand AR order")->check(CLI::PositiveNumber);
    fit_rt->add_option("--a-gen", a_gen, "generation AR order")->check(CLI::PositiveNumber);

    ForecastArgs fa;
    auto* forecast = app.add_subcommand("forecast", "forecast from fitted model files");
    forecast->add_option("--model", fa.models, "model JSON (repeat for consecutive long-term cells)")
        ->required()
        ->check(CLI::ExistingFile);
    forecast->add_option("--horizon", fa.horizon, "steps ahead");
    forecast->add_option("--history", fa.history_file, "file with recent values, oldest first")
        ->check(CLI::ExistingFile);
    forecast->add_option("--history-values", fa.history_values, "comma-separated recent values, oldest first");
    forecast->add_option("--drift-model", fa.drift_model, "long-term fit supplying the AR drift")
        ->check(CLI::ExistingFile);
    forecast->add_option("--features", fa.features, "x1,x2,x3,x4 for the long-term tier");
    forecast->add_option("--features-file", fa.features_file, "one x1,x2,x3,x4 row per cell")
        ->check(CLI::ExistingFile);

    AdequacyArgs aa;
    auto* adequacy = app.add_subcommand("adequacy", "adequacy-ratio lower-bound curves");
    adequacy->add_option("--lambdas", aa.lambdas, "comma-separated threshold margins (kWh)");
    adequacy->add_option("--sigma2s", aa.sigma2s, "comma-separated Wiener variances (kWh^2/h)");
    adequacy->add_option("--t-grid", aa.t_grid, "hours: list or start:stop:step");
    adequacy->add_flag("--monte-carlo", aa.monte_carlo, "add simulated empirical values");
    adequacy->add_option("--paths", aa.paths, "Monte Carlo paths")->check(CLI::PositiveNumber);
    adequacy->add_option("--steps", aa.steps, "time steps per path")->check(CLI::Range(100, 100000000));
    adequacy->add_flag("--discrete", aa.discrete, "monitor the threshold at grid points only");

    std::string scenario;
    std::string bulk;
    auto* simulate = app.add_subcommand("simulate", "simulate communities under the LLMU controller");
    simulate->add_option("scenario", scenario, "scenario JSON")->required()->check(CLI::ExistingFile);
    simulate->add_option("--bulk", bulk, "override bulk policy")
        ->check(CLI::IsMember({"unbounded", "capped", "disabled"}));

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }
    if (seed_opt->count() > 0) g.seed = seed;

    try {
        if (*ingest) return cmd_ingest(g, csv, out);
        if (*fit_long) return cmd_fit_longterm(g, csv, quantity, out);
        if (*fit_rt) return cmd_fit_realtime(g, csv, a, a_gen, out);
        if (*forecast) return cmd_forecast(g, fa, out);
        if (*adequacy) return cmd_adequacy(g, aa, out);
        if (*simulate) return cmd_simulate(g, scenario, bulk, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}

}  // namespace gridcast::cli
