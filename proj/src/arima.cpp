#include "gridcast/arima.hpp"

#include "gridcast/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace gridcast {

namespace {

constexpr std::size_t kWhitenessLags = 20;

double mean_of(std::span<const double> xs) {
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double max_abs_autocorrelation(std::span<const double> e) {
    const std::size_t n = e.size();
    if (n < 2) return 0.0;
    const double m = mean_of(e);
    double c0 = 0.0;
    for (double v : e) c0 += (v - m) * (v - m);
    if (c0 == 0.0) return 0.0;
    double worst = 0.0;
    for (std::size_t lag = 1; lag <= std::min(kWhitenessLags, n - 1); ++lag) {
        double c = 0.0;
        for (std::size_t t = lag; t < n; ++t) c += (e[t] - m) * (e[t - lag] - m);
        worst = std::max(worst, std::abs(c / c0));
    }
    return std::min(worst, 1.0);
}

struct ClsResult {
    std::vector<double> phi;
    double sigma2;
};

// Regress x_t on x_{t-1} .. x_{t-a} (no intercept).
ClsResult conditional_least_squares(std::span<const double> x, std::size_t order) {
    const auto a = static_cast<Eigen::Index>(order);
    const std::size_t n = x.size();
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(a, a);
    Eigen::VectorXd moment = Eigen::VectorXd::Zero(a);
    Eigen::VectorXd lags(a);
    for (std::size_t t = order; t < n; ++t) {
        for (Eigen::Index l = 0; l < a; ++l) lags(l) = x[t - 1 - static_cast<std::size_t>(l)];
        gram.selfadjointView<Eigen::Lower>().rankUpdate(lags);
        moment += lags * x[t];
    }
    gram = gram.selfadjointView<Eigen::Lower>();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigen(gram, Eigen::EigenvaluesOnly);
    const double lo = eigen.eigenvalues().minCoeff();
    const double hi = eigen.eigenvalues().maxCoeff();
    if (!(lo > 1e-12 * hi))
        throw DegenerateSeriesError("lagged autocovariance matrix is singular");

    const Eigen::VectorXd beta = gram.ldlt().solve(moment);
    double rss = 0.0;
    for (std::size_t t = order; t < n; ++t) {
        double fitted = 0.0;
        for (Eigen::Index l = 0; l < a; ++l) fitted += beta(l) * x[t - 1 - static_cast<std::size_t>(l)];
        rss += (x[t] - fitted) * (x[t] - fitted);
    }
    return {std::vector<double>(beta.data(), beta.data() + a), rss / static_cast<double>(n - order)};
}

void check_fit_input(std::span<const double> series, std::size_t order) {
    if (order < 1) throw std::invalid_argument("AR order must be at least 1");
    if (series.size() < 10 * order)
        throw std::invalid_argument("series of length " + std::to_string(series.size()) +
                                    " too short for AR order " + std::to_string(order) + " (need 10*a)");
}

std::vector<double> centred(std::span<const double> series) {
    const double m = mean_of(series);
    double ss = 0.0;
    std::vector<double> out(series.size());
    for (std::size_t i = 0; i < series.size(); ++i) {
        out[i] = series[i] - m;
        ss += out[i] * out[i];
    }
    const double scale = std::max(1.0, m * m);
    if (ss <= 1e-24 * scale * static_cast<double>(series.size()))
        throw DegenerateSeriesError("series is constant; AR coefficients are not identifiable");
    return out;
}

void check_history(std::span<const double> history, std::size_t expected) {
    if (history.size() != expected)
        throw std::invalid_argument("history must hold exactly " + std::to_string(expected) + " values, got " +
                                    std::to_string(history.size()));
}

}  // namespace

bool is_stationary(std::span<const double> phi) {
    const auto a = static_cast<Eigen::Index>(phi.size());
    if (a == 0) return true;
    // Roots of 1 - sum phi z^l outside the unit disk <=> companion eigenvalues inside it.
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(a, a);
    for (Eigen::Index l = 0; l < a; ++l) companion(0, l) = phi[static_cast<std::size_t>(l)];
    for (Eigen::Index r = 1; r < a; ++r) companion(r, r - 1) = 1.0;
    const Eigen::VectorXcd roots = companion.eigenvalues();
    return roots.cwiseAbs().maxCoeff() < 1.0;
}

std::vector<double> difference(std::span<const double> series) {
    std::vector<double> out;
    if (series.size() < 2) return out;
    out.reserve(series.size() - 1);
    for (std::size_t i = 1; i < series.size(); ++i) out.push_back(series[i] - series[i - 1]);
    return out;
}

ArModel fit_ar(std::span<const double> series, std::size_t order) {
    check_fit_input(series, order);
    const auto x = centred(series);
    auto cls = conditional_least_squares(x, order);
    ArModel model;
    model.phi = std::move(cls.phi);
    model.sigma2 = cls.sigma2;
    model.stationary = is_stationary(model.phi);
    return model;
}

DiffArModel fit_diff_ar(std::span<const double> series, std::size_t order) {
    check_fit_input(series, order);
    const auto increments = difference(series);
    const auto x = centred(increments);
    auto cls = conditional_least_squares(x, order);
    DiffArModel model;
    model.phi = std::move(cls.phi);
    model.sigma2 = cls.sigma2;
    model.stationary = is_stationary(model.phi);
    return model;
}

Forecast forecast_ar_with_drift(const ArModel& model, std::span<const double> history, double mu_hat,
                                double mu_var) {
    const std::size_t a = model.order();
    check_history(history, a);
    double phi_sum = 0.0;
    double ar_term = 0.0;
    for (std::size_t l = 1; l <= a; ++l) {
        phi_sum += model.phi[l - 1];
        ar_term += model.phi[l - 1] * history[a - l];
    }
    const double drift_weight = 1.0 - phi_sum;
    return {drift_weight * mu_hat + ar_term, model.sigma2 + drift_weight * drift_weight * mu_var, 1};
}

std::vector<double> level_coefficients(const DiffArModel& model) {
    const std::size_t a = model.order();
    if (a == 0) throw std::invalid_argument("DiffArModel has no coefficients");
    std::vector<double> c(a + 1);
    c[0] = model.phi[0] + 1.0;
    for (std::size_t l = 2; l <= a; ++l) c[l - 1] = model.phi[l - 1] - model.phi[l - 2];
    c[a] = -model.phi[a - 1];
    return c;
}

std::vector<double> impulse_weights(const DiffArModel& model, std::size_t count) {
    const auto c = level_coefficients(model);
    std::vector<double> psi(count, 0.0);
    if (count == 0) return psi;
    psi[0] = 1.0;
    for (std::size_t s = 1; s < count; ++s) {
        double v = 0.0;
        for (std::size_t l = 1; l <= std::min(s, c.size()); ++l) v += c[l - 1] * psi[s - l];
        psi[s] = v;
    }
    return psi;
}

Forecast forecast_diff_ar(const DiffArModel& model, std::span<const double> history) {
    return multi_step(model, history, 1);
}

std::vector<Forecast> forecast_path(const DiffArModel& model, std::span<const double> history, int h) {
    if (h < 1) throw std::invalid_argument("forecast horizon must be at least 1");
    const std::size_t a = model.order();
    if (a == 0) throw std::invalid_argument("DiffArModel has no coefficients");
    check_history(history, a + 1);

    std::vector<double> window(history.begin(), history.end());
    const auto psi = impulse_weights(model, static_cast<std::size_t>(h));
    std::vector<Forecast> out;
    out.reserve(static_cast<std::size_t>(h));
    double psi_sq = 0.0;
    for (int step = 1; step <= h; ++step) {
        // Increment form of the level recursion; a flat window yields its level exactly.
        const std::size_t n = window.size();
        double next = window[n - 1];
        for (std::size_t l = 1; l <= a; ++l) next += model.phi[l - 1] * (window[n - l] - window[n - l - 1]);
        psi_sq += psi[static_cast<std::size_t>(step - 1)] * psi[static_cast<std::size_t>(step - 1)];
        out.push_back({next, model.sigma2 * psi_sq, step});
        window.push_back(next);
    }
    return out;
}

Forecast multi_step(const DiffArModel& model, std::span<const double> history, int h) {
    return forecast_path(model, history, h).back();
}

double residual_whiteness(const ArModel& model, std::span<const double> series) {
    const std::size_t a = model.order();
    if (series.size() <= a) throw std::invalid_argument("series shorter than model order");
    const double mu = model.mu.value_or(mean_of(series));
    std::vector<double> e;
    e.reserve(series.size() - a);
    for (std::size_t t = a; t < series.size(); ++t) {
        double fitted = mu;
        for (std::size_t l = 1; l <= a; ++l) fitted += model.phi[l - 1] * (series[t - l] - mu);
        e.push_back(series[t] - fitted);
    }
    return max_abs_autocorrelation(e);
}

double residual_whiteness(const DiffArModel& model, std::span<const double> series) {
    const auto c = level_coefficients(model);
    if (series.size() <= c.size()) throw std::invalid_argument("series shorter than model order + 1");
    std::vector<double> e;
    e.reserve(series.size() - c.size());
    for (std::size_t t = c.size(); t < series.size(); ++t) {
        double fitted = 0.0;
        for (std::size_t l = 1; l <= c.size(); ++l) fitted += c[l - 1] * series[t - l];
        e.push_back(series[t] - fitted);
    }
    return max_abs_autocorrelation(e);
}

}  // namespace gridcast
