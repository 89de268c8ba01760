#pragma once

#include "gridcast/rng.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace gridcast {

// Forecast-error noise of one community. Variances are per hour of
// integration (kWh^2/h) so that W_t has variance sigma2() * t for t in hours.
struct NoiseParams {
    double sigma_d2 = 0.0;
    double sigma_g2 = 0.0;

    double sigma2() const { return sigma_d2 + sigma_g2; }
    void validate() const;
};

// Converts per-step white-noise variances (kW^2) at a step of step_hours into
// the Wiener variance rate of the integrated error.
NoiseParams noise_from_step_variances(double demand_var_kw2, double generation_var_kw2, double step_hours);

struct StorageSpec {
    double s_q = 0.0;     // initial stored energy, kWh
    double lambda = 0.0;  // threshold margin, kWh; breach when S <= s_q - lambda
    std::function<double(double)> expected_storage;  // S-hat(t), t in hours

    static StorageSpec flat(double s_q, double lambda);
    double threshold() const { return s_q - lambda; }
    void validate() const;
};

// Long-term sufficiency: S-hat(t) >= s_q at every sampled time.
bool satisfies_sufficiency(const StorageSpec& spec, std::span<const double> times);

// erf(lambda / sqrt(2 t sigma2)): probability that the running maximum of a
// Wiener process of variance sigma2 stays below lambda up to time t.
double adequacy_lower_bound(double lambda, double sigma2, double t);

enum class Monitoring {
    // Breach only when a grid point falls at or below the threshold. Biased
    // towards survival because crossings between grid points are missed.
    discrete,
    // Additionally samples a Brownian-bridge crossing between grid points,
    // which monitors the piecewise-linear S-hat continuously.
    bridge,
};

struct MonteCarloOptions {
    std::size_t n_steps = 1000;
    std::size_t n_paths = 100000;
    std::uint64_t seed = 1;
    Monitoring monitoring = Monitoring::bridge;
    unsigned threads = 0;  // 0: hardware concurrency
};

// W sampled at dt, 2dt, ..., n_steps*dt (W_0 = 0 omitted).
std::vector<double> sample_wiener_path(double sigma2, double dt, std::size_t n_steps, Engine& engine);

// Fraction of paths with S(t') > s_q - lambda for every t' <= checkpoint, per
// checkpoint. S = S-hat - W. Checkpoints are snapped to the step grid spanning
// (0, max checkpoint]. Each path draws from generators derived from
// (seed, path index), so results do not depend on the thread count.
std::vector<double> simulate_survival_curve(const StorageSpec& spec, const NoiseParams& noise,
                                            std::span<const double> checkpoints, const MonteCarloOptions& options);

double simulate_storage_paths(const StorageSpec& spec, const NoiseParams& noise, double t_end,
                              std::size_t n_steps, std::size_t n_paths, std::uint64_t seed,
                              Monitoring monitoring = Monitoring::bridge);

struct AdequacyCurve {
    double lambda = 0.0;
    double sigma2 = 0.0;
    std::vector<double> t;
    std::vector<double> bound;
    std::vector<std::optional<double>> empirical;
    std::size_t n_paths = 0;
};

// One curve per (lambda, sigma2) combination, lambdas outermost.
std::vector<AdequacyCurve> curve_table(std::span<const double> lambdas, std::span<const double> sigma2s,
                                       std::span<const double> t_grid);

// Fills curve.empirical from a flat-expectation Monte Carlo run.
void attach_monte_carlo(AdequacyCurve& curve, const MonteCarloOptions& options);

// CSV: lambda,sigma2,t,bound,empirical,n_paths
void write_curve_csv(std::ostream& out, std::span<const AdequacyCurve> curves);

}  // namespace gridcast
