#pragma once

#include "gridcast/simulator.hpp"

#include <optional>
#include <vector>

namespace gridcast {

struct CommunityScenario {
    int id = 0;
    double s_q = 0.0;
    double lambda = 0.0;
    std::optional<double> initial_storage_kwh;  // defaults to s_q
    ProcessSpec demand;
    ProcessSpec generation;
    std::size_t demand_order = kDefaultArOrder;
    std::size_t generation_order = kDefaultArOrder;
    // Fitted on the training prefix when not given.
    std::optional<DiffArModel> demand_model;
    std::optional<DiffArModel> generation_model;
};

struct Scenario {
    SimConfig config;
    // Steps generated before tau = 0 for model fitting and forecaster warm-up.
    std::size_t train_steps = 2880;
    std::vector<CommunityScenario> communities;
};

struct PreparedScenario {
    std::vector<Community> communities;
    std::vector<CommunitySeries> series;
};

// Generates every community's demand and generation series from the scenario
// seed, fits the real-time forecasters on the training prefix, and seeds the
// forecaster histories with its tail.
PreparedScenario prepare_scenario(const Scenario& scenario);

SimTrace run_scenario(const Scenario& scenario);

struct CommunitySummary {
    int q = 0;
    double empirical_adequacy = 0.0;
    double adequate_fraction = 0.0;  // steps with the adequacy flag set
    double unmet_kwh = 0.0;
    double bulk_kwh = 0.0;
    std::size_t bulk_requests = 0;
};

std::vector<CommunitySummary> summarize(const SimTrace& trace);

}  // namespace gridcast
