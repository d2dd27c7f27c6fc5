#pragma once

#include "aircast/dataset.hpp"
#include "aircast/date.hpp"
#include "aircast/forecast.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace aircast::additive {

enum class SeasonalityMode { Additive, Multiplicative };

std::string_view to_string(SeasonalityMode mode);
SeasonalityMode seasonality_mode_from_string(std::string_view text);

inline constexpr double kYearDays = 365.25;
inline constexpr double kWeekDays = 7.0;

struct AdditiveConfig {
    std::size_t n_changepoints = 25;
    double changepoint_range = 0.8;
    /// Inverse penalty on changepoint slope adjustments; +inf removes the penalty.
    double trend_flexibility = 0.05;
    /// Inverse penalty on Fourier (and holiday) coefficients; +inf removes the penalty.
    double seasonality_strength = 10.0;
    SeasonalityMode mode = SeasonalityMode::Additive;
    std::size_t yearly_order = 10;
    std::size_t weekly_order = 3;
    double interval_width = 0.95;

    /// Compact description used in reports, e.g. "cp=25 flex=0.05 ...".
    std::string label() const;
    /// Throws ConfigError when a field is out of range.
    void validate() const;
};

/// A named set of dates that share one additive effect.
struct Holiday {
    std::string name;
    std::vector<Date> dates;
};

struct AdditiveFit {
    AdditiveConfig config;
    Date origin;                     // t = 0 of the trend
    double base_slope = 0.0;         // k, target units per day
    double offset = 0.0;             // m, target units at the origin
    std::vector<Date> changepoint_times;
    std::vector<double> changepoint_deltas;  // slope changes, target units per day
    std::vector<double> yearly_coefficients;  // sin/cos pairs
    std::vector<double> weekly_coefficients;
    std::vector<Holiday> holidays;
    std::vector<double> holiday_effects;
    std::vector<std::string> regressor_names;
    std::vector<double> regressor_coefficients;  // target units per regressor unit
    std::vector<double> regressor_means;         // regressor effects are centred on these
    double residual_std = 0.0;
};

/// Components of a prediction; point == trend + seasonal + regressors + holidays.
struct Decomposition {
    std::vector<double> trend;
    std::vector<double> seasonal;
    std::vector<double> regressors;
    std::vector<double> holidays;
    std::vector<double> point;
};

/// n changepoints at indices floor(h * j / (n + 1)), j = 1..n, where
/// h = floor(size * range). Throws ConfigError unless n < size * range.
std::vector<Date> place_changepoints(std::span<const Date> train_dates, std::size_t n_changepoints,
                                     double changepoint_range);

/// [n x 2*order]: sin(2 pi k t / P), cos(2 pi k t / P) for k = 1..order,
/// t in days since 1970-01-01.
Eigen::MatrixXd fourier_basis(std::span<const Date> dates, double period_days, std::size_t order);

/// Trend value at fractional day offsets from the fit origin.
double trend_at(const AdditiveFit& fit, double t_days);

AdditiveFit fit_additive(const dataset::DailyDataset& train, const AdditiveConfig& config,
                         std::span<const Holiday> holidays = {});

/// Same as above from raw arrays; regressors may have zero columns.
AdditiveFit fit_additive(std::span<const Date> dates, std::span<const double> target,
                         const Eigen::MatrixXd& regressors, std::span<const std::string> regressor_names,
                         const AdditiveConfig& config, std::span<const Holiday> holidays = {});

Decomposition decompose(const AdditiveFit& fit, std::span<const Date> dates, const Eigen::MatrixXd& regressors);

/// Point forecast plus point -/+ z * residual_std with z the two-sided
/// normal quantile for config.interval_width.
ForecastResult predict_additive(const AdditiveFit& fit, std::span<const Date> dates,
                                const Eigen::MatrixXd& regressors);

/// z such that P(|Z| <= z) = width.
double interval_z(double width);

/// 4 flexibilities x 4 strengths x 3 changepoint counts x 3 seasonality
/// variants (additive, multiplicative, additive without weekly) = 144.
std::vector<AdditiveConfig> hyperparameter_grid();

} // namespace aircast::additive
