#include "gridcast/scenario.hpp"

#include "gridcast/errors.hpp"
#include "gridcast/rng.hpp"

#include <set>
#include <stdexcept>
#include <string>

namespace gridcast {

namespace {

// A training prefix without variation cannot identify coefficients; fall
// back to a persistence forecaster.
DiffArModel fit_or_persist(std::span<const double> training, std::size_t order) {
    try {
        return fit_diff_ar(training, order);
    } catch (const DegenerateSeriesError&) {
        return DiffArModel{std::vector<double>(order, 0.0), 0.0, true};
    }
}

std::vector<double> tail(std::span<const double> xs, std::size_t n) {
    n = std::min(n, xs.size());
    return {xs.end() - static_cast<std::ptrdiff_t>(n), xs.end()};
}

}  // namespace

PreparedScenario prepare_scenario(const Scenario& scenario) {
    scenario.config.validate();
    std::set<int> ids;
    for (const auto& c : scenario.communities)
        if (!ids.insert(c.id).second) throw std::invalid_argument("duplicate community id " + std::to_string(c.id));

    const std::size_t train = scenario.train_steps;
    const std::size_t total = train + scenario.config.horizon_steps;
    const std::uint64_t base = derive_seed(scenario.config.seed, streams::kScenario);

    PreparedScenario out;
    for (std::size_t index = 0; index < scenario.communities.size(); ++index) {
        const auto& spec = scenario.communities[index];
        if (!(spec.lambda >= 0.0) || spec.lambda > spec.s_q)
            throw std::invalid_argument("community " + std::to_string(spec.id) + ": lambda must lie in [0, s_q]");

        const auto demand = synth_process(spec.demand, total, derive_seed(base, 2 * index));
        const auto generation = synth_process(spec.generation, total, derive_seed(base, 2 * index + 1));
        const std::span<const double> demand_train(demand.data(), train);
        const std::span<const double> generation_train(generation.data(), train);

        Community com;
        com.id = spec.id;
        com.s_q = spec.s_q;
        com.lambda = spec.lambda;
        com.storage_kwh = spec.initial_storage_kwh.value_or(spec.s_q);
        if (spec.demand_model) {
            com.demand_model = *spec.demand_model;
        } else {
            if (train < 10 * spec.demand_order) throw std::invalid_argument("train_steps too short to fit demand model");
            com.demand_model = fit_or_persist(demand_train, spec.demand_order);
        }
        if (spec.generation_model) {
            com.generation_model = *spec.generation_model;
        } else {
            if (train < 10 * spec.generation_order)
                throw std::invalid_argument("train_steps too short to fit generation model");
            com.generation_model = fit_or_persist(generation_train, spec.generation_order);
        }
        com.demand_history = tail(demand_train, com.demand_model.order() + 1);
        com.generation_history = tail(generation_train, com.generation_model.order() + 1);

        out.communities.push_back(std::move(com));
        out.series.push_back({{demand.begin() + static_cast<std::ptrdiff_t>(train), demand.end()},
                              {generation.begin() + static_cast<std::ptrdiff_t>(train), generation.end()}});
    }
    return out;
}

SimTrace run_scenario(const Scenario& scenario) {
    auto prepared = prepare_scenario(scenario);
    return run_simulation(scenario.config, std::move(prepared.communities), prepared.series);
}

std::vector<CommunitySummary> summarize(const SimTrace& trace) {
    std::set<int> ids;
    for (const auto& row : trace.rows) ids.insert(row.q);
    std::vector<CommunitySummary> out;
    for (int q : ids) {
        CommunitySummary s;
        s.q = q;
        s.empirical_adequacy = empirical_adequacy(trace, q);
        std::size_t steps = 0;
        std::size_t adequate = 0;
        for (const auto& row : trace.rows) {
            if (row.q != q) continue;
            ++steps;
            if (row.adequate) ++adequate;
            s.unmet_kwh += row.unmet_kwh;
            s.bulk_kwh += row.bulk_kwh;
            if (row.bulk_request_kwh > 0.0) ++s.bulk_requests;
        }
        s.adequate_fraction = static_cast<double>(adequate) / static_cast<double>(steps);
        out.push_back(s);
    }
    return out;
}

}  // namespace gridcast
