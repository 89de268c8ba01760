#include "gridcast/simulator.hpp"

#include "gridcast/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>

namespace gridcast {

namespace {

void write_number(std::ostream& out, double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    out.write(buf, ptr - buf);
}

void push_bounded(std::vector<double>& history, double value, std::size_t keep) {
    history.push_back(value);
    if (history.size() > keep) history.erase(history.begin(), history.end() - static_cast<std::ptrdiff_t>(keep));
}

}  // namespace

double BulkPolicy::grant(double request_kwh, double step_hours) const {
    if (request_kwh <= 0.0) return 0.0;
    switch (kind) {
        case BulkPolicyKind::unbounded: return request_kwh;
        case BulkPolicyKind::capped: return std::min(request_kwh, p_max_kw * step_hours);
        case BulkPolicyKind::disabled: return 0.0;
    }
    return 0.0;
}

std::string_view to_string(BulkPolicyKind kind) {
    switch (kind) {
        case BulkPolicyKind::unbounded: return "unbounded";
        case BulkPolicyKind::capped: return "capped";
        case BulkPolicyKind::disabled: return "disabled";
    }
    return "unknown";
}

BulkPolicyKind parse_bulk_policy(std::string_view text) {
    if (text == "unbounded") return BulkPolicyKind::unbounded;
    if (text == "capped") return BulkPolicyKind::capped;
    if (text == "disabled") return BulkPolicyKind::disabled;
    throw std::invalid_argument("unknown bulk policy '" + std::string(text) + "'");
}

void SimConfig::validate() const {
    if (!(step_seconds > 0.0)) throw std::invalid_argument("step_seconds must be positive");
    if (horizon_steps < 1) throw std::invalid_argument("horizon must be at least one step");
    if (bulk.kind == BulkPolicyKind::capped && !(bulk.p_max_kw >= 0.0))
        throw std::invalid_argument("capped bulk policy needs p_max_kw >= 0");
    if (storage_cap_kwh && !(*storage_cap_kwh >= 0.0))
        throw std::invalid_argument("storage cap must be non-negative");
}

StepActions step_llmu(const Community& community, double demand_kw, double gen_kw, double shat_next_kwh,
                      const SimConfig& config) {
    const double u = config.step_hours();
    StepActions act;

    if (shat_next_kwh <= community.threshold())
        act.bulk_request_kwh = config.bulk.grant(community.s_q - shat_next_kwh, u);

    const double demand_kwh = demand_kw * u;
    if (demand_kw > gen_kw) {
        const double shortfall = (demand_kw - gen_kw) * u;
        act.discharge_kwh = std::min(shortfall, std::max(community.storage_kwh, 0.0));
        act.unmet_kwh = shortfall - act.discharge_kwh;
        act.delivered_kwh = demand_kwh - act.unmet_kwh;
    } else {
        const double surplus = (gen_kw - demand_kw) * u;
        act.delivered_kwh = demand_kwh;
        act.charge_kwh = surplus;
        if (config.storage_cap_kwh) {
            const double room = std::max(*config.storage_cap_kwh - community.storage_kwh, 0.0);
            act.charge_kwh = std::min(surplus, room);
            act.spilled_kwh = surplus - act.charge_kwh;
        }
    }
    return act;
}

double one_step_forecast(const DiffArModel& model, std::span<const double> history) {
    if (history.empty()) return 0.0;
    if (history.size() < model.order() + 1) return history.back();
    return forecast_diff_ar(model, history.last(model.order() + 1)).mean;
}

SimTrace run_simulation(const SimConfig& config, std::vector<Community> communities,
                        std::span<const CommunitySeries> series) {
    config.validate();
    if (series.size() != communities.size())
        throw std::invalid_argument("one demand/generation series pair is required per community");
    for (const auto& s : series) {
        if (s.demand_kw.size() < config.horizon_steps || s.generation_kw.size() < config.horizon_steps)
            throw std::invalid_argument("series shorter than the simulation horizon");
    }

    const double u = config.step_hours();
    SimTrace trace;
    trace.rows.reserve(communities.size() * config.horizon_steps);
    for (std::size_t tau = 0; tau < config.horizon_steps; ++tau) {
        for (std::size_t c = 0; c < communities.size(); ++c) {
            Community& com = communities[c];
            TraceRow row;
            row.q = com.id;
            row.tau = tau;
            row.demand_kw = series[c].demand_kw[tau];
            row.gen_kw = series[c].generation_kw[tau];

            // Bulk energy requested last step arrives first.
            row.bulk_kwh = com.pending_bulk_kwh;
            com.pending_bulk_kwh = 0.0;
            double bulk_stored = row.bulk_kwh;
            if (config.storage_cap_kwh)
                bulk_stored = std::min(bulk_stored, std::max(*config.storage_cap_kwh - com.storage_kwh, 0.0));
            com.storage_kwh += bulk_stored;
            row.storage_before_kwh = com.storage_kwh;

            const double d_hat = one_step_forecast(com.demand_model, com.demand_history);
            const double g_hat = one_step_forecast(com.generation_model, com.generation_history);
            row.shat_next_kwh = com.storage_kwh + u * (g_hat - d_hat);

            const StepActions act = step_llmu(com, row.demand_kw, row.gen_kw, row.shat_next_kwh, config);
            com.pending_bulk_kwh = act.bulk_request_kwh;
            com.storage_kwh = com.storage_kwh + act.charge_kwh - act.discharge_kwh;

            row.bulk_request_kwh = act.bulk_request_kwh;
            row.discharge_kwh = act.discharge_kwh;
            row.charge_kwh = act.charge_kwh + bulk_stored;
            row.spilled_kwh = act.spilled_kwh + (row.bulk_kwh - bulk_stored);
            row.delivered_kwh = act.delivered_kwh;
            row.unmet_kwh = act.unmet_kwh;
            row.storage_kwh = com.storage_kwh;
            row.adequate = com.storage_kwh > com.threshold();

            push_bounded(com.demand_history, row.demand_kw, com.demand_model.order() + 1);
            push_bounded(com.generation_history, row.gen_kw, com.generation_model.order() + 1);
            trace.rows.push_back(row);
        }
    }
    return trace;
}

std::vector<TraceRow> SimTrace::for_community(int q) const {
    std::vector<TraceRow> out;
    for (const auto& row : rows)
        if (row.q == q) out.push_back(row);
    std::sort(out.begin(), out.end(), [](const TraceRow& a, const TraceRow& b) { return a.tau < b.tau; });
    return out;
}

std::optional<std::size_t> first_breach(const SimTrace& trace, int q) {
    const auto rows = trace.for_community(q);
    if (rows.empty()) throw std::invalid_argument("community " + std::to_string(q) + " not in trace");
    for (std::size_t i = 0; i < rows.size(); ++i)
        if (!rows[i].adequate) return i;
    return std::nullopt;
}

double empirical_adequacy(const SimTrace& trace, int q) {
    const auto rows = trace.for_community(q);
    if (rows.empty()) throw std::invalid_argument("community " + std::to_string(q) + " not in trace");
    std::size_t prefix = 0;
    while (prefix < rows.size() && rows[prefix].adequate) ++prefix;
    return static_cast<double>(prefix) / static_cast<double>(rows.size());
}

void write_trace_csv(std::ostream& out, const SimTrace& trace) {
    out << "q,tau,demand_kw,gen_kw,storage_kwh,bulk_kwh,unmet_kwh,shat_next_kwh,adequate\n";
    for (const auto& row : trace.rows) {
        out << row.q << ',' << row.tau << ',';
        write_number(out, row.demand_kw);
        out << ',';
        write_number(out, row.gen_kw);
        out << ',';
        write_number(out, row.storage_kwh);
        out << ',';
        write_number(out, row.bulk_kwh);
        out << ',';
        write_number(out, row.unmet_kwh);
        out << ',';
        write_number(out, row.shat_next_kwh);
        out << ',' << (row.adequate ? 1 : 0) << '\n';
    }
}

std::string_view to_string(Profile profile) {
    return profile == Profile::flat ? "flat" : "daily-sinusoid";
}

Profile parse_profile(std::string_view text) {
    if (text == "flat") return Profile::flat;
    if (text == "daily-sinusoid") return Profile::daily_sinusoid;
    throw std::invalid_argument("unknown profile '" + std::string(text) + "'");
}

std::vector<double> synth_process(const ProcessSpec& spec, std::size_t steps, std::uint64_t seed) {
    if (!(spec.steps_per_day > 0.0)) throw std::invalid_argument("steps_per_day must be positive");
    if (!(spec.noise_sigma >= 0.0)) throw std::invalid_argument("noise_sigma must be non-negative");
    if (!(std::abs(spec.ar_phi) < 1.0)) throw std::invalid_argument("ar_phi must lie in (-1, 1)");

    Engine engine = make_engine(seed, streams::kSynthetic);
    std::normal_distribution<double> standard(0.0, 1.0);
    auto innovation = [&] { return spec.noise_sigma > 0.0 ? spec.noise_sigma * standard(engine) : 0.0; };

    std::vector<double> out(steps);
    // Start the noise in its stationary distribution.
    double noise = innovation() / std::sqrt(1.0 - spec.ar_phi * spec.ar_phi);
    for (std::size_t t = 0; t < steps; ++t) {
        if (t > 0) noise = spec.ar_phi * noise + innovation();
        double level = spec.base_kw;
        if (spec.profile == Profile::daily_sinusoid) {
            const double hour = 24.0 * std::fmod(static_cast<double>(t), spec.steps_per_day) / spec.steps_per_day;
            level += spec.amplitude_kw * std::cos(2.0 * std::numbers::pi * (hour - spec.peak_hour) / 24.0);
        }
        out[t] = std::max(level + noise, 0.0);
    }
    return out;
}

void TraceStore::append(std::uint64_t run, SimTrace trace) {
    std::lock_guard lock(mutex_);
    runs_.insert_or_assign(run, std::move(trace));
}

std::map<std::uint64_t, SimTrace> TraceStore::snapshot() const {
    std::lock_guard lock(mutex_);
    return runs_;
}

std::size_t TraceStore::size() const {
    std::lock_guard lock(mutex_);
    return runs_.size();
}

}  // namespace gridcast
