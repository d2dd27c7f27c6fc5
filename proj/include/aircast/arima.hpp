#pragma once

#include "aircast/error.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace aircast::arima {

struct ArimaSpec {
    std::size_t p = 0;
    std::size_t d = 0;
    std::size_t q = 0;
    bool include_intercept = true;

    /// e.g. "ARIMA(1,0,3)".
    std::string label() const;
    bool operator==(const ArimaSpec&) const = default;
};

/// Coefficients of one model, unpacked.
struct ArimaCoefficients {
    double intercept = 0.0;
    std::vector<double> ar;    // beta_1 .. beta_p on y_{t-i}
    std::vector<double> ma;    // phi_1 .. phi_q on e_{t-j}
    std::vector<double> exog;  // one per exogenous column
};

/// Parameter vector layout: [intercept (if any), ar..., ma..., exog...].
std::vector<double> pack(const ArimaCoefficients& c, const ArimaSpec& spec);
ArimaCoefficients unpack(std::span<const double> params, const ArimaSpec& spec, std::size_t n_exog);
std::size_t parameter_count(const ArimaSpec& spec, std::size_t n_exog);

struct CssEvaluation {
    std::vector<double> residuals;  // e_t for t in [start, n)
    std::size_t start = 0;          // first conditioned index
    double rss = 0.0;
    double sigma2 = 0.0;            // rss / residual count
    double negative_loglik = 0.0;   // +inf when the recursion blows up
};

/// CSS residual recursion on an already differenced series:
/// e_t = w_t - a - sum beta_i w_{t-i} - sum phi_j e_{t-j} - gamma' x_t,
/// with presample residuals 0 and the first max(p, condition_on) values
/// conditioned on.
CssEvaluation css_evaluate(std::span<const double> params, std::span<const double> series,
                           const Eigen::MatrixXd& exog, const ArimaSpec& spec, std::size_t condition_on = 0);

/// n/2 * (log(2 pi sigma2) + 1) with sigma2 = RSS / n over the residuals.
double css_negative_loglik(std::span<const double> params, std::span<const double> series,
                           const Eigen::MatrixXd& exog, const ArimaSpec& spec, std::size_t condition_on = 0);

struct ArimaFit {
    ArimaSpec spec;
    ArimaCoefficients coefficients;
    double sigma2 = 0.0;
    double log_likelihood = 0.0;
    double aic = 0.0;
    std::size_t n_train = 0;       // undifferenced training length
    std::size_t n_exog = 0;
    std::size_t condition_on = 0;  // conditioned values at the head of the differenced series
    std::vector<double> residuals;

    // Tail state for forecasting.
    std::vector<double> differenced_tail;  // last p values of the differenced series
    std::vector<double> residual_tail;     // last q residuals
    std::vector<double> level_tail;        // last value of each difference order 0..d-1

    std::vector<std::string> warnings;
    std::size_t evaluations = 0;
    bool converged = true;

    /// k = p + q + n_exog + intercept + 1 (the innovation variance).
    std::size_t parameter_count() const;
};

struct FitOptions {
    /// Values at the head of the differenced series to condition on; the
    /// effective count is max(p, condition_on). auto_arima uses p_max so
    /// that every grid cell is scored on the same observations.
    std::size_t condition_on = 0;
    std::size_t max_evaluations = 40000;
    double tolerance = 1e-11;
};

/// Raised when the optimiser exhausts its budget; carries the best point found.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& message, ArimaFit best) : Error(message), best_(std::move(best)) {}
    const ArimaFit& best() const { return best_; }

private:
    ArimaFit best_;
};

/// exog may have zero columns; otherwise it is row-aligned with train.
ArimaFit fit_arima(std::span<const double> train, const Eigen::MatrixXd& exog, const ArimaSpec& spec,
                   const FitOptions& options = {});

struct GridCell {
    std::size_t p = 0;
    std::size_t q = 0;
    std::optional<double> aic;  // empty when the cell failed
    std::string error;
};

struct AutoArimaResult {
    ArimaFit best;
    std::vector<GridCell> cells;  // row-major over (p, q)
};

struct AutoArimaOptions {
    std::size_t workers = 1;
    bool include_intercept = true;
    FitOptions fit;
};

/// Exhaustive (p, q) grid; minimum AIC wins, ties to smaller p+q then smaller p.
AutoArimaResult auto_arima(std::span<const double> train, const Eigen::MatrixXd& exog, std::size_t p_max,
                           std::size_t q_max, std::size_t d, const AutoArimaOptions& options = {});

/// Iterated forecast with future errors at zero, undifferenced d times.
std::vector<double> forecast_arima(const ArimaFit& fit, std::size_t horizon, const Eigen::MatrixXd& exog_future);

} // namespace aircast::arima
