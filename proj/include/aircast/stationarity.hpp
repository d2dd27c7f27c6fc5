#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace aircast::stationarity {

/// d-th difference; d == 0 returns the input. Throws LengthError when d >= size.
std::vector<double> difference(std::span<const double> series, std::size_t order);

struct OlsFit {
    Eigen::VectorXd coefficients;
    Eigen::VectorXd residuals;
    Eigen::VectorXd standard_errors;
    double residual_variance = 0.0;  // RSS / (n - k)
    double rss = 0.0;
    std::size_t n_obs = 0;
    std::size_t n_params = 0;

    /// Gaussian log-likelihood at the ML variance RSS / n.
    double log_likelihood() const;
    double aic() const;
};

/// Least squares via column-pivoted QR. Throws SingularityError on a
/// rank-deficient design and LengthError unless rows > cols.
OlsFit ols(const Eigen::MatrixXd& design, const Eigen::VectorXd& response);

enum class RegressionKind { Constant, ConstantTrend };

std::string_view to_string(RegressionKind kind);
RegressionKind regression_kind_from_string(std::string_view text);

struct AdfOptions {
    /// nullopt selects floor(12 * (n / 100)^(1/4)).
    std::optional<std::size_t> max_lag;
    RegressionKind kind = RegressionKind::ConstantTrend;
};

struct AdfResult {
    double statistic = 0.0;  // (alpha - 1) / se(alpha)
    std::size_t lag_order = 0;
    std::size_t max_lag = 0;
    RegressionKind kind = RegressionKind::ConstantTrend;
    /// Coefficient on y_{t-1} in levels form; a unit root means alpha == 1.
    double coefficient_alpha = 0.0;
    double constant = 0.0;
    std::optional<double> trend;
    std::vector<double> lag_coefficients;  // on dy_{t-1} .. dy_{t-p}
    Eigen::VectorXd residuals;
    std::size_t n_obs = 0;
    double aic = 0.0;
    double p_value = 1.0;
    bool reject_unit_root_at_5pct = false;
};

std::size_t schwert_max_lag(std::size_t n);

AdfResult adf_test(std::span<const double> series, const AdfOptions& options = {});

/// Asymptotic p-value of a single-series Dickey-Fuller t statistic.
double mackinnon_p_value(double statistic, RegressionKind kind);

} // namespace aircast::stationarity
