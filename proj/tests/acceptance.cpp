// Acceptance runner: one PASS/FAIL line per criterion, non-zero exit on any
// failure. Tolerances and runtime limits are fixed here.

#include "oracles.hpp"

#include "gridcast/adequacy.hpp"
#include "gridcast/arima.hpp"
#include "gridcast/mle.hpp"
#include "gridcast/scenario.hpp"
#include "gridcast/timegrid.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace gridcast;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
    void note(const std::string& text) {
        if (pass) detail += (detail.empty() ? "" : "; ") + text;
    }
};

std::string num(double v, int precision = 4) {
    std::ostringstream s;
    s.precision(precision);
    s << v;
    return s.str();
}

// ---- 1 ---------------------------------------------------------------------

// Strict order, except that both values may sit at 1.0 where erf saturates in
// double precision.
bool strictly_below(double lo, double hi) {
    return lo < hi || (lo == 1.0 && hi == 1.0);
}

Outcome erf_bound_reproduction() {
    Outcome o;
    const std::vector<double> lambdas{0.5, 1.0, 2.0};
    const std::vector<double> sigma2s{0.5, 1.0, 2.0};
    std::vector<double> t_grid;
    for (int i = 1; i <= 960; ++i) t_grid.push_back(0.05 * i);

    const auto start = Clock::now();
    const auto curves = curve_table(lambdas, sigma2s, t_grid);
    const double elapsed = seconds_since(start);

    double worst = 0.0;
    for (const auto& c : curves)
        for (std::size_t i = 0; i < c.t.size(); ++i) {
            const double ref = oracle::erf_reference(c.lambda / std::sqrt(2.0 * c.t[i] * c.sigma2));
            worst = std::max(worst, std::abs(c.bound[i] - ref));
        }
    o.require(worst < 1e-9, "max |bound - oracle| = " + num(worst));

    bool decreasing_t = true;
    for (const auto& c : curves)
        for (std::size_t i = 1; i < c.t.size(); ++i) decreasing_t &= strictly_below(c.bound[i], c.bound[i - 1]);
    o.require(decreasing_t, "not decreasing in t");

    // curves are lambda-major: index = li * 3 + si
    bool increasing_lambda = true, decreasing_sigma = true;
    for (std::size_t li = 0; li < 3; ++li)
        for (std::size_t si = 0; si < 3; ++si)
            for (std::size_t i = 0; i < t_grid.size(); ++i) {
                const double b = curves[li * 3 + si].bound[i];
                if (li > 0) increasing_lambda &= strictly_below(curves[(li - 1) * 3 + si].bound[i], b);
                if (si > 0) decreasing_sigma &= strictly_below(b, curves[li * 3 + si - 1].bound[i]);
            }
    o.require(increasing_lambda, "not increasing in lambda");
    o.require(decreasing_sigma, "not decreasing in sigma2");
    o.require(elapsed < 1.0, "runtime " + num(elapsed) + " s");
    o.note("max |err| " + num(worst, 3) + " over " + std::to_string(curves.size() * t_grid.size()) +
           " points, " + num(elapsed * 1e3, 3) + " ms");
    return o;
}

// ---- 2 ---------------------------------------------------------------------

Outcome reflection_principle() {
    Outcome o;
    struct Combo {
        double lambda, sigma2, t;
    };
    // The last combination sets lambda = s_q.
    const Combo combos[] = {{1.0, 1.0, 1.0}, {2.0, 1.0, 2.0}, {3.0, 1.0, 1.0}};
    const auto start = Clock::now();
    std::string values;
    for (const auto& c : combos) {
        const auto spec = StorageSpec::flat(c.lambda, c.lambda);
        const NoiseParams noise{c.sigma2 / 2.0, c.sigma2 / 2.0};
        const double empirical = simulate_storage_paths(spec, noise, c.t, 1000, 100000, 20240101);
        const double bound = adequacy_lower_bound(c.lambda, c.sigma2, c.t);
        const double diff = std::abs(empirical - bound);
        o.require(diff < 0.01, "combo (" + num(c.lambda) + "," + num(c.sigma2) + "," + num(c.t) + ") diff " + num(diff));
        values += (values.empty() ? "" : ", ") + num(empirical) + " vs " + num(bound);
    }
    const double elapsed = seconds_since(start);
    o.require(elapsed < 60.0, "runtime " + num(elapsed) + " s");
    o.note(values + ", " + num(elapsed, 3) + " s");
    return o;
}

// ---- 3 ---------------------------------------------------------------------

Outcome mle_recovery() {
    Outcome o;
    const std::array<double, 5> truth{10.0, 1.0, -2.0, 0.5, 0.3};
    std::mt19937_64 rng(20240315);
    std::uniform_int_distribution<int> years(0, 3), weeks(0, 25), days(0, 4);
    std::uniform_real_distribution<double> temperature(-10.0, 35.0);
    std::normal_distribution<double> noise(0.0, 0.5);
    std::vector<TrainingRow> rows;
    for (int i = 0; i < 200; ++i) {
        TrainingRow r;
        r.years_elapsed = years(rng);
        r.weeks_into_year_part = weeks(rng);
        r.days_into_week_part = days(rng);
        r.temperature_c = temperature(rng);
        r.y = truth[0] + truth[1] * r.years_elapsed + truth[2] * r.weeks_into_year_part +
              truth[3] * r.days_into_week_part + truth[4] * r.temperature_c + noise(rng);
        rows.push_back(r);
    }

    const auto start = Clock::now();
    const auto design = build_design(rows);
    const auto fit = fit_mle(design);
    const double elapsed = seconds_since(start);

    double err = 0.0;
    for (std::size_t i = 0; i < 5; ++i) err = std::max(err, std::abs(fit.beta[i] - truth[i]));
    const Eigen::VectorXd xtr = design.x.transpose() * residuals(fit, design);
    const double ortho = xtr.cwiseAbs().maxCoeff();
    const double ortho_limit = 1e-6 * design.y.norm();

    o.require(err < 0.15, "||beta - beta*||inf = " + num(err));
    o.require(fit.sigma2 >= 0.2 && fit.sigma2 <= 0.3, "sigma2 = " + num(fit.sigma2));
    o.require(ortho < ortho_limit, "|X'r|inf = " + num(ortho));
    o.require(elapsed < 1.0, "runtime " + num(elapsed) + " s");
    o.note("||beta - beta*||inf " + num(err) + ", sigma2 " + num(fit.sigma2) + ", |X'r|inf " + num(ortho, 3) +
           ", " + num(elapsed * 1e3, 3) + " ms");
    return o;
}

// ---- 4 ---------------------------------------------------------------------

Outcome ar_recovery() {
    Outcome o;
    const auto start = Clock::now();

    const std::vector<double> ar_truth{0.5, -0.3};
    const auto ar_series = oracle::simulate_ar(ar_truth, 1.0, 10000, 4242);
    const auto ar_fit = fit_ar(ar_series, 2);
    const auto ar_yw = oracle::yule_walker(ar_series, 2);

    const auto e = oracle::innovations(10000, 1.0, 4343);
    const auto level = oracle::simulate_arima_operator({0.5}, e, 100.0);
    const auto diff_fit = fit_diff_ar(level, 1);
    const auto diff_yw = oracle::yule_walker(oracle::diff(level), 1);
    const double elapsed = seconds_since(start);

    for (std::size_t l = 0; l < 2; ++l) {
        o.require(std::abs(ar_fit.phi[l] - ar_yw[l]) <= 0.05, "AR phi" + std::to_string(l + 1) + " vs Yule-Walker");
        o.require(std::abs(ar_fit.phi[l] - ar_truth[l]) <= 0.05, "AR phi" + std::to_string(l + 1) + " vs truth");
    }
    o.require(std::abs(diff_fit.phi[0] - diff_yw[0]) <= 0.05, "ARIMA phi vs Yule-Walker");
    o.require(std::abs(diff_fit.phi[0] - 0.5) <= 0.05, "ARIMA phi vs truth");
    o.require(elapsed < 5.0, "runtime " + num(elapsed) + " s");
    o.note("AR(2) phi (" + num(ar_fit.phi[0]) + ", " + num(ar_fit.phi[1]) + ") YW (" + num(ar_yw[0]) + ", " +
           num(ar_yw[1]) + "); ARIMA(1,1,0) phi " + num(diff_fit.phi[0]) + " YW " + num(diff_yw[0]) + ", " +
           num(elapsed * 1e3, 3) + " ms");
    return o;
}

// ---- 5 ---------------------------------------------------------------------

Outcome recursion_properties() {
    Outcome o;
    const auto start = Clock::now();
    std::mt19937_64 rng(5150);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    std::uniform_real_distribution<double> level(-1e4, 1e4);
    std::uniform_int_distribution<int> order(1, 6);

    // Constant preservation, exact equality.
    std::size_t violations = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        DiffArModel m;
        m.phi.resize(static_cast<std::size_t>(order(rng)));
        for (auto& p : m.phi) p = coef(rng);
        m.sigma2 = 1.0;
        const double c = level(rng);
        const std::vector<double> history(m.order() + 1, c);
        for (const auto& f : forecast_path(m, history, 10))
            if (f.mean != c) ++violations;
    }
    o.require(violations == 0, std::to_string(violations) + " constant-preservation violations");

    // Difference form (operator simulation) vs expanded level recursion.
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        DiffArModel m;
        m.phi.resize(static_cast<std::size_t>(1 + trial % 4));
        for (;;) {
            for (auto& p : m.phi) p = coef(rng) / static_cast<double>(m.order());
            if (is_stationary(m.phi)) break;
        }
        const auto e = oracle::innovations(1000, 1.0, 6000 + static_cast<std::uint64_t>(trial));
        const auto operator_form = oracle::simulate_arima_operator(m.phi, e);
        const auto c = level_coefficients(m);
        std::vector<double> expanded(e.size());
        for (std::size_t t = 0; t < e.size(); ++t) {
            double v = e[t];
            for (std::size_t l = 1; l <= c.size() && l <= t; ++l) v += c[l - 1] * expanded[t - l];
            expanded[t] = v;
        }
        for (std::size_t t = 0; t < e.size(); ++t)
            worst = std::max(worst, std::abs(operator_form[t] - expanded[t]) / std::max(1.0, std::abs(operator_form[t])));

        // Forecast path in increment form vs expanded recursion over 1000 steps.
        const std::vector<double> window(operator_form.end() - static_cast<std::ptrdiff_t>(m.order() + 1),
                                         operator_form.end());
        const auto path = forecast_path(m, window, 1000);
        std::vector<double> w = window;
        for (const auto& f : path) {
            double v = 0.0;
            for (std::size_t l = 1; l <= c.size(); ++l) v += c[l - 1] * w[w.size() - l];
            w.push_back(v);
            worst = std::max(worst, std::abs(f.mean - v) / std::max(1.0, std::abs(v)));
        }
    }
    o.require(worst <= 1e-9, "difference vs expanded form " + num(worst));

    // Random-walk h-step variance.
    const DiffArModel walk{{0.0}, 1.0, true};
    const int horizons[] = {1, 5, 10, 50};
    const std::size_t paths = 100000;
    std::vector<double> sum(4, 0.0), sum_sq(4, 0.0);
    std::normal_distribution<double> n01(0.0, 1.0);
    for (std::size_t p = 0; p < paths; ++p) {
        double x = 0.0;
        std::size_t k = 0;
        for (int s = 1; s <= 50; ++s) {
            x += n01(rng);
            if (s == horizons[k]) {
                sum[k] += x;
                sum_sq[k] += x * x;
                ++k;
            }
        }
    }
    double worst_rel = 0.0;
    const std::vector<double> zeros{0.0, 0.0};
    for (std::size_t k = 0; k < 4; ++k) {
        const double mean = sum[k] / paths;
        const double var = sum_sq[k] / paths - mean * mean;
        const double predicted = multi_step(walk, zeros, horizons[k]).variance;
        o.require(predicted == horizons[k] * walk.sigma2, "closed-form variance at h=" + std::to_string(horizons[k]));
        worst_rel = std::max(worst_rel, std::abs(var - predicted) / predicted);
    }
    o.require(worst_rel < 0.10, "random-walk variance off by " + num(worst_rel));
    const double elapsed = seconds_since(start);
    o.note("1000 constant checks exact, form gap " + num(worst, 3) + ", variance rel err " + num(worst_rel) + ", " +
           num(elapsed, 3) + " s");
    return o;
}

// ---- 6 ---------------------------------------------------------------------

Scenario balanced(std::uint64_t seed, BulkPolicyKind policy) {
    Scenario s;
    s.config.step_seconds = 900.0;
    s.config.horizon_steps = 7 * 96;
    s.config.seed = seed;
    s.config.bulk.kind = policy;
    s.train_steps = 2880;
    CommunityScenario c;
    c.id = 1;
    c.s_q = 20.0;
    c.lambda = 10.0;
    c.demand = {Profile::flat, 10.0, 0.0, 0.0, 1.0};
    c.generation = {Profile::flat, 10.0, 0.0, 0.0, 1.0};
    s.communities.push_back(c);
    return s;
}

bool balance_holds(const SimTrace& trace, double u) {
    for (const auto& r : trace.rows) {
        const double supply = r.gen_kw * u + r.bulk_kwh + r.discharge_kwh;
        const double use = r.delivered_kwh + r.charge_kwh + r.spilled_kwh;
        if (std::abs(supply - use) > 1e-9 * std::max({1.0, supply, use})) return false;
        if (std::abs(r.delivered_kwh + r.unmet_kwh - r.demand_kw * u) > 1e-9 * std::max(1.0, r.demand_kw * u))
            return false;
        if (r.storage_kwh < 0.0) return false;
    }
    return true;
}

Outcome simulator_adequacy() {
    Outcome o;
    const auto start = Clock::now();
    const std::size_t seeds = 200;
    const std::size_t steps = 7 * 96;
    const double u = 0.25;
    // Per-step white noise of variance 1 kW^2 on both series.
    const auto noise = noise_from_step_variances(1.0, 1.0, u);
    const double lambda = 10.0;

    std::vector<std::size_t> survivors(steps, 0);
    double mean_prefix = 0.0;
    double unmet_bulk = 0.0;
    std::size_t adequate_steps = 0, total_steps = 0;
    bool balance = true;
    for (std::size_t seed = 0; seed < seeds; ++seed) {
        const auto off = run_scenario(balanced(1000 + seed, BulkPolicyKind::disabled));
        balance &= balance_holds(off, u);
        const auto breach = first_breach(off, 1);
        const std::size_t last = breach ? *breach : steps;
        for (std::size_t k = 0; k < last; ++k) ++survivors[k];
        mean_prefix += empirical_adequacy(off, 1) / seeds;

        const auto on = run_scenario(balanced(1000 + seed, BulkPolicyKind::unbounded));
        balance &= balance_holds(on, u);
        for (const auto& r : on.rows) {
            unmet_bulk += r.unmet_kwh;
            adequate_steps += r.adequate ? 1 : 0;
            ++total_steps;
        }
    }

    // Seed-averaged survival up to each step vs the bound at that time.
    double worst_gap = 1.0;
    double mean_bound = 0.0;
    for (std::size_t k = 0; k < steps; ++k) {
        const double t = u * static_cast<double>(k + 1);
        const double bound = adequacy_lower_bound(lambda, noise.sigma2(), t);
        worst_gap = std::min(worst_gap, static_cast<double>(survivors[k]) / seeds - bound);
        mean_bound += bound / steps;
    }
    const double end_survival = static_cast<double>(survivors.back()) / seeds;
    const double end_bound = adequacy_lower_bound(lambda, noise.sigma2(), u * static_cast<double>(steps));
    const double adequate_fraction = static_cast<double>(adequate_steps) / static_cast<double>(total_steps);
    const double elapsed = seconds_since(start);

    o.require(mean_prefix >= mean_bound - 0.02, "prefix adequacy " + num(mean_prefix) + " < bound " + num(mean_bound));
    o.require(unmet_bulk == 0.0, "unmet demand with bulk " + num(unmet_bulk) + " kWh");
    o.require(adequate_fraction >= 0.99, "adequate fraction " + num(adequate_fraction));
    o.require(balance, "energy balance violated");
    o.require(elapsed < 120.0, "runtime " + num(elapsed) + " s");
    o.note("prefix adequacy " + num(mean_prefix) + " vs bound " +
           num(mean_bound) + ", unmet with bulk " + num(unmet_bulk) + " kWh, adequate fraction " +
           num(adequate_fraction) + ", survival at 7 d " + num(end_survival) + " vs bound " + num(end_bound) +
           ", min pointwise gap " + num(worst_gap) + ", " + num(elapsed, 3) + " s");
    return o;
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<Outcome()> run;
    };
    const Criterion criteria[] = {
        {"1 erf-bound reproduction", erf_bound_reproduction},
        {"2 reflection-principle consistency", reflection_principle},
        {"3 MLE recovery", mle_recovery},
        {"4 AR/ARIMA recovery", ar_recovery},
        {"5 ARIMA recursion properties", recursion_properties},
        {"6 simulator adequacy", simulator_adequacy},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        Outcome outcome;
        try {
            outcome = c.run();
        } catch (const std::exception& e) {
            outcome.pass = false;
            outcome.detail = std::string("exception: ") + e.what();
        }
        if (!outcome.pass) ++failures;
        std::printf("[%s] %s: %s\n", outcome.pass ? "PASS" : "FAIL", c.name, outcome.detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
