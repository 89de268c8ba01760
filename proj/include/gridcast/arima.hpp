#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace gridcast {

inline constexpr std::size_t kDefaultArOrder = 4;

// Stationary AR(a) around a drift mu:
//   (1 - sum_l phi_l L^l)(D_tau - mu) = eps_tau,  eps ~ N(0, sigma2).
struct ArModel {
    std::vector<double> phi;
    std::optional<double> mu;  // unset after fitting; supplied by the long-term tier
    double sigma2 = 0.0;
    bool stationary = true;

    std::size_t order() const { return phi.size(); }
};

// AR(a) on the first difference, i.e. ARIMA(a,1,0) without constant.
struct DiffArModel {
    std::vector<double> phi;
    double sigma2 = 0.0;
    bool stationary = true;

    std::size_t order() const { return phi.size(); }
};

struct Forecast {
    double mean = 0.0;
    double variance = 0.0;
    int horizon = 1;
};

// True when every root of 1 - sum phi_l z^l lies outside the unit disk.
bool is_stationary(std::span<const double> phi);

std::vector<double> difference(std::span<const double> series);

// Conditional least squares on the mean-centred series. Requires
// series.size() >= 10 * order. Throws DegenerateSeriesError on constant input.
ArModel fit_ar(std::span<const double> series, std::size_t order);
DiffArModel fit_diff_ar(std::span<const double> series, std::size_t order);

// history holds the last a values, oldest first.
Forecast forecast_ar_with_drift(const ArModel& model, std::span<const double> history, double mu_hat,
                                double mu_var);

// Coefficients of the level recursion
//   D_tau = (phi_1 + 1) D_{tau-1} + sum_{l=2..a} (phi_l - phi_{l-1}) D_{tau-l} - phi_a D_{tau-a-1}.
// Element l-1 multiplies D_{tau-l}; a + 1 entries.
std::vector<double> level_coefficients(const DiffArModel& model);

// Impulse-response weights psi_0 .. psi_{count-1} of the level recursion.
std::vector<double> impulse_weights(const DiffArModel& model, std::size_t count);

// history holds the last a + 1 values, oldest first.
Forecast forecast_diff_ar(const DiffArModel& model, std::span<const double> history);
Forecast multi_step(const DiffArModel& model, std::span<const double> history, int h);
// Forecasts for horizons 1..h.
std::vector<Forecast> forecast_path(const DiffArModel& model, std::span<const double> history, int h);

// Largest |sample autocorrelation| of the one-step residuals over lags 1..20.
double residual_whiteness(const ArModel& model, std::span<const double> series);
double residual_whiteness(const DiffArModel& model, std::span<const double> series);

}  // namespace gridcast
