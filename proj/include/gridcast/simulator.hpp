#pragma once

#include "gridcast/arima.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace gridcast {

enum class BulkPolicyKind { unbounded, capped, disabled };

struct BulkPolicy {
    BulkPolicyKind kind = BulkPolicyKind::unbounded;
    double p_max_kw = 0.0;  // capped only

    // Energy the bulk generators actually commit for a request of request_kwh.
    double grant(double request_kwh, double step_hours) const;
};

std::string_view to_string(BulkPolicyKind kind);
BulkPolicyKind parse_bulk_policy(std::string_view text);

struct SimConfig {
    double step_seconds = 900.0;
    std::size_t horizon_steps = 1;
    BulkPolicy bulk;
    std::uint64_t seed = 0;
    std::optional<double> storage_cap_kwh;  // unbounded when unset

    double step_hours() const { return step_seconds / 3600.0; }
    void validate() const;
};

struct Community {
    int id = 0;
    double s_q = 0.0;
    double lambda = 0.0;
    double storage_kwh = 0.0;
    DiffArModel demand_model{{0.0}, 0.0, true};
    DiffArModel generation_model{{0.0}, 0.0, true};
    // Most recent observations, oldest first; at most order + 1 kept.
    std::vector<double> demand_history;
    std::vector<double> generation_history;
    // Bulk energy requested last step, delivered at the start of this one.
    double pending_bulk_kwh = 0.0;

    double threshold() const { return s_q - lambda; }
};

struct StepActions {
    double bulk_request_kwh = 0.0;  // granted request, delivered next step
    double discharge_kwh = 0.0;
    double charge_kwh = 0.0;        // DRR surplus into storage
    double spilled_kwh = 0.0;       // DRR surplus rejected by a full storage
    double delivered_kwh = 0.0;
    double unmet_kwh = 0.0;
};

// One LocalLoadManagementUnit decision for the coming step. Pure: the
// caller applies the flows to the community.
StepActions step_llmu(const Community& community, double demand_kw, double gen_kw, double shat_next_kwh,
                      const SimConfig& config);

struct TraceRow {
    int q = 0;
    std::size_t tau = 0;
    double demand_kw = 0.0;
    double gen_kw = 0.0;
    double storage_before_kwh = 0.0;  // after bulk delivery, before this step's flows
    double storage_kwh = 0.0;         // end of step
    double bulk_kwh = 0.0;            // delivered this step
    double bulk_request_kwh = 0.0;    // requested for next step
    double discharge_kwh = 0.0;
    double charge_kwh = 0.0;          // DRR surplus plus bulk energy stored
    double spilled_kwh = 0.0;
    double delivered_kwh = 0.0;
    double unmet_kwh = 0.0;
    double shat_next_kwh = 0.0;
    bool adequate = true;             // storage_kwh > s_q - lambda

    bool operator==(const TraceRow&) const = default;
};

struct SimTrace {
    std::vector<TraceRow> rows;

    std::vector<TraceRow> for_community(int q) const;
    bool operator==(const SimTrace&) const = default;
};

struct CommunitySeries {
    std::vector<double> demand_kw;
    std::vector<double> generation_kw;
};

// Forecast of the next value from a community history; persistence when the
// history is shorter than order + 1, zero when empty.
double one_step_forecast(const DiffArModel& model, std::span<const double> history);

SimTrace run_simulation(const SimConfig& config, std::vector<Community> communities,
                        std::span<const CommunitySeries> series);

// Fraction of the community's steps before its first inadequate step.
double empirical_adequacy(const SimTrace& trace, int q);
// Index (0-based, in tau order) of the first inadequate step, if any.
std::optional<std::size_t> first_breach(const SimTrace& trace, int q);

// CSV: q,tau,demand_kw,gen_kw,storage_kwh,bulk_kwh,unmet_kwh,shat_next_kwh,adequate
void write_trace_csv(std::ostream& out, const SimTrace& trace);

enum class Profile { flat, daily_sinusoid };

std::string_view to_string(Profile profile);
Profile parse_profile(std::string_view text);

struct ProcessSpec {
    Profile profile = Profile::flat;
    double base_kw = 0.0;
    double amplitude_kw = 0.0;
    double ar_phi = 0.0;       // AR(1) colouring of the noise
    double noise_sigma = 0.0;  // innovation standard deviation, kW
    double steps_per_day = 96.0;
    double peak_hour = 19.0;
};

// profile(t) + AR(1) noise, clamped at zero.
std::vector<double> synth_process(const ProcessSpec& spec, std::size_t steps, std::uint64_t seed);

// Collects traces from independent runs; safe for concurrent appends.
class TraceStore {
public:
    void append(std::uint64_t run, SimTrace trace);
    std::map<std::uint64_t, SimTrace> snapshot() const;
    std::size_t size() const;

private:
    mutable std::mutex mutex_;
    std::map<std::uint64_t, SimTrace> runs_;
};

}  // namespace gridcast
