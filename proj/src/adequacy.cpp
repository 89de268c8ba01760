#include "gridcast/adequacy.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>

namespace gridcast {

namespace {

void write_number(std::ostream& out, double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    out.write(buf, ptr - buf);
}

}  // namespace

void NoiseParams::validate() const {
    if (!(sigma_d2 >= 0.0) || !(sigma_g2 >= 0.0))
        throw std::invalid_argument("noise variances must be non-negative");
}

NoiseParams noise_from_step_variances(double demand_var_kw2, double generation_var_kw2, double step_hours) {
    if (!(step_hours > 0.0)) throw std::invalid_argument("step_hours must be positive");
    NoiseParams noise{demand_var_kw2 * step_hours, generation_var_kw2 * step_hours};
    noise.validate();
    return noise;
}

StorageSpec StorageSpec::flat(double s_q, double lambda) {
    return StorageSpec{s_q, lambda, [s_q](double) { return s_q; }};
}

void StorageSpec::validate() const {
    if (!(s_q >= 0.0)) throw std::invalid_argument("s_q must be non-negative");
    if (!(lambda >= 0.0) || lambda > s_q) throw std::invalid_argument("lambda must lie in [0, s_q]");
    if (!expected_storage) throw std::invalid_argument("expected storage trajectory is not set");
}

bool satisfies_sufficiency(const StorageSpec& spec, std::span<const double> times) {
    return std::all_of(times.begin(), times.end(),
                       [&](double t) { return spec.expected_storage(t) >= spec.s_q; });
}

double adequacy_lower_bound(double lambda, double sigma2, double t) {
    if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be non-negative");
    if (!(sigma2 > 0.0)) throw std::invalid_argument("sigma2 must be positive");
    if (!(t > 0.0)) throw std::invalid_argument("t must be positive");
    return std::erf(lambda / std::sqrt(2.0 * t * sigma2));
}

std::vector<double> sample_wiener_path(double sigma2, double dt, std::size_t n_steps, Engine& engine) {
    if (!(sigma2 >= 0.0) || !(dt > 0.0)) throw std::invalid_argument("invalid Wiener parameters");
    const double sd = std::sqrt(sigma2 * dt);
    std::normal_distribution<double> standard(0.0, 1.0);
    std::vector<double> w(n_steps);
    double level = 0.0;
    for (auto& v : w) {
        if (sd > 0.0) level += sd * standard(engine);
        v = level;
    }
    return w;
}

std::vector<double> simulate_survival_curve(const StorageSpec& spec, const NoiseParams& noise,
                                            std::span<const double> checkpoints, const MonteCarloOptions& options) {
    spec.validate();
    noise.validate();
    if (options.n_steps < 100) throw std::invalid_argument("n_steps must be at least 100");
    if (options.n_paths < 1) throw std::invalid_argument("n_paths must be at least 1");
    if (checkpoints.empty()) throw std::invalid_argument("no checkpoints");
    for (double t : checkpoints)
        if (!(t > 0.0)) throw std::invalid_argument("checkpoints must be positive");

    const double t_max = *std::max_element(checkpoints.begin(), checkpoints.end());
    const std::size_t n = options.n_steps;
    const double dt = t_max / static_cast<double>(n);
    const double sigma2 = noise.sigma2();
    const double barrier = spec.threshold();
    const double step_sd = std::sqrt(sigma2 * dt);

    // Step index whose end time represents each checkpoint.
    std::vector<std::size_t> check_index(checkpoints.size());
    for (std::size_t c = 0; c < checkpoints.size(); ++c) {
        const auto idx = static_cast<std::size_t>(std::llround(checkpoints[c] / dt));
        check_index[c] = std::clamp<std::size_t>(idx, 1, n);
    }

    std::vector<double> s_hat(n + 1);
    for (std::size_t i = 0; i <= n; ++i) s_hat[i] = spec.expected_storage(dt * static_cast<double>(i));

    // First step at which a path breached; n + 1 means it survived.
    auto first_breach = [&](std::size_t path) -> std::size_t {
        if (!(s_hat[0] > barrier)) return 0;
        const std::uint64_t base = derive_seed(options.seed, streams::kAdequacyPaths);
        Engine normals{derive_seed(base, 2 * path)};
        Engine uniforms{derive_seed(base, 2 * path + 1)};
        std::normal_distribution<double> standard(0.0, 1.0);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        double w = 0.0;
        double gap_prev = s_hat[0] - barrier;
        for (std::size_t i = 1; i <= n; ++i) {
            if (step_sd > 0.0) w += step_sd * standard(normals);
            const double gap = s_hat[i] - w - barrier;
            if (gap <= 0.0) return i;
            if (options.monitoring == Monitoring::bridge && sigma2 > 0.0) {
                const double p_cross = std::exp(-2.0 * gap_prev * gap / (sigma2 * dt));
                if (unit(uniforms) < p_cross) return i;
            }
            gap_prev = gap;
        }
        return n + 1;
    };

    unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, options.n_paths));
    std::vector<std::vector<std::size_t>> survivors(threads, std::vector<std::size_t>(checkpoints.size(), 0));
    auto work = [&](unsigned worker) {
        for (std::size_t path = worker; path < options.n_paths; path += threads) {
            const std::size_t breach = first_breach(path);
            for (std::size_t c = 0; c < check_index.size(); ++c)
                if (breach > check_index[c]) ++survivors[worker][c];
        }
    };
    if (threads == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
        for (auto& th : pool) th.join();
    }

    std::vector<double> out(checkpoints.size(), 0.0);
    for (std::size_t c = 0; c < checkpoints.size(); ++c) {
        std::size_t total = 0;
        for (const auto& counts : survivors) total += counts[c];
        out[c] = static_cast<double>(total) / static_cast<double>(options.n_paths);
    }
    return out;
}

double simulate_storage_paths(const StorageSpec& spec, const NoiseParams& noise, double t_end,
                              std::size_t n_steps, std::size_t n_paths, std::uint64_t seed,
                              Monitoring monitoring) {
    MonteCarloOptions options;
    options.n_steps = n_steps;
    options.n_paths = n_paths;
    options.seed = seed;
    options.monitoring = monitoring;
    const double checkpoints[] = {t_end};
    return simulate_survival_curve(spec, noise, checkpoints, options).front();
}

std::vector<AdequacyCurve> curve_table(std::span<const double> lambdas, std::span<const double> sigma2s,
                                       std::span<const double> t_grid) {
    if (lambdas.empty() || sigma2s.empty() || t_grid.empty())
        throw std::invalid_argument("curve_table needs non-empty lambdas, sigma2s and t grid");
    std::vector<AdequacyCurve> curves;
    for (double lambda : lambdas) {
        for (double sigma2 : sigma2s) {
            AdequacyCurve curve;
            curve.lambda = lambda;
            curve.sigma2 = sigma2;
            curve.t.assign(t_grid.begin(), t_grid.end());
            for (double t : t_grid) curve.bound.push_back(adequacy_lower_bound(lambda, sigma2, t));
            curve.empirical.assign(t_grid.size(), std::nullopt);
            curves.push_back(std::move(curve));
        }
    }
    return curves;
}

void attach_monte_carlo(AdequacyCurve& curve, const MonteCarloOptions& options) {
    const auto spec = StorageSpec::flat(curve.lambda, curve.lambda);
    const NoiseParams noise{curve.sigma2 / 2.0, curve.sigma2 / 2.0};
    const auto survival = simulate_survival_curve(spec, noise, curve.t, options);
    curve.empirical.assign(survival.begin(), survival.end());
    curve.n_paths = options.n_paths;
}

void write_curve_csv(std::ostream& out, std::span<const AdequacyCurve> curves) {
    out << "lambda,sigma2,t,bound,empirical,n_paths\n";
    for (const auto& curve : curves) {
        for (std::size_t i = 0; i < curve.t.size(); ++i) {
            write_number(out, curve.lambda);
            out << ',';
            write_number(out, curve.sigma2);
            out << ',';
            write_number(out, curve.t[i]);
            out << ',';
            write_number(out, curve.bound[i]);
            out << ',';
            if (curve.empirical[i]) write_number(out, *curve.empirical[i]);
            out << ',' << (curve.empirical[i] ? curve.n_paths : 0) << '\n';
        }
    }
}

}  // namespace gridcast
