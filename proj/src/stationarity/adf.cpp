#include "aircast/stationarity.hpp"

#include "aircast/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

namespace aircast::stationarity {

namespace {

// Single-series (N = 1) response-surface coefficients from MacKinnon (1994),
// "Approximate asymptotic distribution functions for unit-root and
// cointegration tests", JBES 12(2), Table 3, as tabulated in statsmodels'
// adfvalues module. The p-value is Phi(poly(tau)) with the small-p quadratic
// for tau <= tau_star and the large-p cubic above it.
struct ResponseSurface {
    double tau_max;
    double tau_min;
    double tau_star;
    std::array<double, 3> small_p;
    std::array<double, 4> large_p;
};

constexpr ResponseSurface kConstant{2.74, -18.83, -1.61,
                                    {2.1659, 1.4412, 3.8269e-2},
                                    {1.7339, 9.3202e-1, -1.2745e-1, -1.0368e-2}};
constexpr ResponseSurface kConstantTrend{0.7, -16.18, -2.89,
                                         {3.2512, 1.6047, 4.9588e-2},
                                         {2.5261, 6.1654e-1, -3.7956e-1, -6.0285e-2}};

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// The tabulated tau_max is the cubic's stationary point rounded to two
// digits; clamp to the exact turning point so the p-value stays monotone.
double large_p_ceiling(const ResponseSurface& s) {
    const double a = 3.0 * s.large_p[3];
    const double b = 2.0 * s.large_p[2];
    const double c = s.large_p[1];
    const double disc = b * b - 4.0 * a * c;
    double ceiling = s.tau_max;
    if (disc >= 0.0) {
        for (const double sign : {-1.0, 1.0}) {
            const double root = (-b + sign * std::sqrt(disc)) / (2.0 * a);
            if (root > s.tau_star && root < ceiling) {
                ceiling = root;
            }
        }
    }
    return ceiling;
}

struct LagDesign {
    Eigen::MatrixXd design;
    Eigen::VectorXd response;
    Eigen::Index level_column = 0;
};

// Rows for dy[i], i in [first, dy.size()): deterministic terms, y_{t-1}, then lags.
LagDesign build_design(std::span<const double> y, const std::vector<double>& dy, std::size_t first,
                       std::size_t lags, RegressionKind kind) {
    const auto nobs = static_cast<Eigen::Index>(dy.size() - first);
    const Eigen::Index deterministic = kind == RegressionKind::ConstantTrend ? 2 : 1;
    LagDesign out;
    out.level_column = deterministic;
    out.design.resize(nobs, deterministic + 1 + static_cast<Eigen::Index>(lags));
    out.response.resize(nobs);
    for (Eigen::Index r = 0; r < nobs; ++r) {
        const auto i = first + static_cast<std::size_t>(r);
        out.response(r) = dy[i];
        out.design(r, 0) = 1.0;
        if (kind == RegressionKind::ConstantTrend) {
            out.design(r, 1) = static_cast<double>(r + 1);
        }
        out.design(r, deterministic) = y[i];
        for (std::size_t l = 1; l <= lags; ++l) {
            out.design(r, deterministic + static_cast<Eigen::Index>(l)) = dy[i - l];
        }
    }
    return out;
}

} // namespace

std::string_view to_string(RegressionKind kind) {
    return kind == RegressionKind::Constant ? "c" : "ct";
}

RegressionKind regression_kind_from_string(std::string_view text) {
    if (text == "c" || text == "constant") {
        return RegressionKind::Constant;
    }
    if (text == "ct" || text == "constant+trend" || text == "trend") {
        return RegressionKind::ConstantTrend;
    }
    throw ConfigError("unknown regression kind '" + std::string(text) + "'");
}

std::size_t schwert_max_lag(std::size_t n) {
    return static_cast<std::size_t>(std::floor(12.0 * std::pow(static_cast<double>(n) / 100.0, 0.25)));
}

double mackinnon_p_value(double statistic, RegressionKind kind) {
    const ResponseSurface& s = kind == RegressionKind::Constant ? kConstant : kConstantTrend;
    if (std::isnan(statistic)) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    if (statistic > s.tau_max) {
        return 1.0;
    }
    if (statistic < s.tau_min) {
        return 0.0;
    }
    if (statistic <= s.tau_star) {
        const double x = statistic;
        return normal_cdf(s.small_p[0] + x * (s.small_p[1] + x * s.small_p[2]));
    }
    const double x = std::min(statistic, large_p_ceiling(s));
    return normal_cdf(s.large_p[0] + x * (s.large_p[1] + x * (s.large_p[2] + x * s.large_p[3])));
}

AdfResult adf_test(std::span<const double> series, const AdfOptions& options) {
    const std::size_t n = series.size();
    for (const double v : series) {
        if (!std::isfinite(v)) {
            throw ValidationError("adf_test: series contains non-finite values");
        }
    }
    const std::size_t max_lag = options.max_lag.value_or(schwert_max_lag(n));
    if (n < 20 + max_lag) {
        throw LengthError("adf_test needs at least " + std::to_string(20 + max_lag) + " observations, got " +
                          std::to_string(n));
    }
    if (std::all_of(series.begin(), series.end(), [&](double v) { return v == series.front(); })) {
        throw DegenerateSeriesError("adf_test: series is constant");
    }

    const std::vector<double> dy = difference(series, 1);

    // Lag selection on the common sample that the longest lag allows.
    std::size_t best_lag = 0;
    double best_aic = std::numeric_limits<double>::infinity();
    for (std::size_t lag = 0; lag <= max_lag; ++lag) {
        const LagDesign d = build_design(series, dy, max_lag, lag, options.kind);
        const double aic = ols(d.design, d.response).aic();
        if (aic < best_aic) {
            best_aic = aic;
            best_lag = lag;
        }
    }

    // Refit at the chosen lag on the longest available sample.
    const LagDesign d = build_design(series, dy, best_lag, best_lag, options.kind);
    const OlsFit fit = ols(d.design, d.response);

    AdfResult result;
    result.kind = options.kind;
    result.max_lag = max_lag;
    result.lag_order = best_lag;
    result.n_obs = fit.n_obs;
    result.aic = fit.aic();
    result.constant = fit.coefficients(0);
    if (options.kind == RegressionKind::ConstantTrend) {
        result.trend = fit.coefficients(1);
    }
    const double gamma = fit.coefficients(d.level_column);
    result.coefficient_alpha = gamma + 1.0;
    result.statistic = gamma / fit.standard_errors(d.level_column);
    for (std::size_t l = 1; l <= best_lag; ++l) {
        result.lag_coefficients.push_back(fit.coefficients(d.level_column + static_cast<Eigen::Index>(l)));
    }
    result.residuals = fit.residuals;
    result.p_value = mackinnon_p_value(result.statistic, options.kind);
    result.reject_unit_root_at_5pct = result.p_value < 0.05;
    return result;
}

} // namespace aircast::stationarity
