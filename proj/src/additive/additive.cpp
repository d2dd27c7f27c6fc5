#include "aircast/additive.hpp"

#include "aircast/error.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>

namespace aircast::additive {

namespace {

double day_offset(Date date, Date origin) {
    return static_cast<double>((date - origin).count());
}

struct Layout {
    Eigen::Index trend = 0;       // offset, slope
    Eigen::Index changepoints = 0;
    Eigen::Index yearly = 0;
    Eigen::Index weekly = 0;
    Eigen::Index holidays = 0;
    Eigen::Index regressors = 0;  // active (non-constant) regressors only

    Eigen::Index cp_begin() const { return 2; }
    Eigen::Index yearly_begin() const { return cp_begin() + changepoints; }
    Eigen::Index weekly_begin() const { return yearly_begin() + yearly; }
    Eigen::Index holiday_begin() const { return weekly_begin() + weekly; }
    Eigen::Index regressor_begin() const { return holiday_begin() + holidays; }
    Eigen::Index columns() const { return regressor_begin() + regressors; }
};

// Penalised least squares: min |X b - y|^2 + sum penalty_j b_j^2.
Eigen::VectorXd solve_penalized(const Eigen::MatrixXd& design, const Eigen::VectorXd& response,
                                const Eigen::VectorXd& penalty) {
    std::vector<Eigen::Index> penalized;
    for (Eigen::Index j = 0; j < penalty.size(); ++j) {
        if (penalty(j) > 0.0) {
            penalized.push_back(j);
        }
    }
    const auto n = design.rows();
    const auto extra = static_cast<Eigen::Index>(penalized.size());
    Eigen::MatrixXd augmented = Eigen::MatrixXd::Zero(n + extra, design.cols());
    augmented.topRows(n) = design;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + extra);
    rhs.head(n) = response;
    for (Eigen::Index r = 0; r < extra; ++r) {
        const auto j = penalized[static_cast<std::size_t>(r)];
        augmented(n + r, j) = std::sqrt(penalty(j));
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(augmented);
    qr.setThreshold(1e-12);
    if (qr.rank() < design.cols()) {
        throw SingularityError("additive fit: penalised system is singular (rank " + std::to_string(qr.rank()) +
                               " of " + std::to_string(design.cols()) + ")");
    }
    return qr.solve(rhs);
}

double inverse_or_zero(double scale) {
    return std::isinf(scale) ? 0.0 : 1.0 / scale;
}

std::vector<double> to_vector(const Eigen::VectorXd& v, Eigen::Index begin, Eigen::Index count, double factor) {
    std::vector<double> out(static_cast<std::size_t>(count));
    for (Eigen::Index i = 0; i < count; ++i) {
        out[static_cast<std::size_t>(i)] = factor * v(begin + i);
    }
    return out;
}

double dot_row(const Eigen::MatrixXd& basis, Eigen::Index row, const std::vector<double>& coef) {
    double s = 0.0;
    for (std::size_t k = 0; k < coef.size(); ++k) {
        s += basis(row, static_cast<Eigen::Index>(k)) * coef[k];
    }
    return s;
}

} // namespace

std::string_view to_string(SeasonalityMode mode) {
    return mode == SeasonalityMode::Additive ? "additive" : "multiplicative";
}

SeasonalityMode seasonality_mode_from_string(std::string_view text) {
    if (text == "additive") {
        return SeasonalityMode::Additive;
    }
    if (text == "multiplicative") {
        return SeasonalityMode::Multiplicative;
    }
    throw ConfigError("unknown seasonality mode '" + std::string(text) + "'");
}

std::string AdditiveConfig::label() const {
    std::ostringstream out;
    out << "cp=" << n_changepoints << " range=" << changepoint_range << " flex=" << trend_flexibility
        << " season=" << seasonality_strength << " mode=" << to_string(mode) << " yearly=" << yearly_order
        << " weekly=" << weekly_order;
    return out.str();
}

void AdditiveConfig::validate() const {
    if (!(changepoint_range > 0.0 && changepoint_range <= 1.0)) {
        throw ConfigError("changepoint_range must lie in (0,1]");
    }
    if (!(trend_flexibility > 0.0)) {
        throw ConfigError("trend_flexibility must be positive");
    }
    if (!(seasonality_strength > 0.0)) {
        throw ConfigError("seasonality_strength must be positive");
    }
    if (!(interval_width > 0.0 && interval_width < 1.0)) {
        throw ConfigError("interval_width must lie in (0,1)");
    }
}

std::vector<Date> place_changepoints(std::span<const Date> train_dates, std::size_t n_changepoints,
                                     double changepoint_range) {
    if (n_changepoints == 0) {
        return {};
    }
    const double window = static_cast<double>(train_dates.size()) * changepoint_range;
    if (!(static_cast<double>(n_changepoints) < window)) {
        throw ConfigError(std::to_string(n_changepoints) + " changepoints do not fit in a window of " +
                          std::to_string(window) + " days");
    }
    const auto history = static_cast<std::size_t>(std::floor(window));
    std::vector<Date> out;
    out.reserve(n_changepoints);
    for (std::size_t j = 1; j <= n_changepoints; ++j) {
        out.push_back(train_dates[history * j / (n_changepoints + 1)]);
    }
    return out;
}

Eigen::MatrixXd fourier_basis(std::span<const Date> dates, double period_days, std::size_t order) {
    const auto n = static_cast<Eigen::Index>(dates.size());
    Eigen::MatrixXd basis(n, static_cast<Eigen::Index>(2 * order));
    for (Eigen::Index i = 0; i < n; ++i) {
        const double t = static_cast<double>(days_since_epoch(dates[static_cast<std::size_t>(i)]));
        for (std::size_t k = 1; k <= order; ++k) {
            const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) * t / period_days;
            basis(i, static_cast<Eigen::Index>(2 * (k - 1))) = std::sin(angle);
            basis(i, static_cast<Eigen::Index>(2 * (k - 1) + 1)) = std::cos(angle);
        }
    }
    return basis;
}

double trend_at(const AdditiveFit& fit, double t_days) {
    double g = fit.offset + fit.base_slope * t_days;
    for (std::size_t j = 0; j < fit.changepoint_times.size(); ++j) {
        const double s = day_offset(fit.changepoint_times[j], fit.origin);
        if (t_days > s) {
            g += fit.changepoint_deltas[j] * (t_days - s);
        }
    }
    return g;
}

double interval_z(double width) {
    const boost::math::normal_distribution<double> standard;
    return boost::math::quantile(standard, 0.5 + 0.5 * width);
}

AdditiveFit fit_additive(const dataset::DailyDataset& train, const AdditiveConfig& config,
                         std::span<const Holiday> holidays) {
    return fit_additive(train.dates, train.target, train.features, train.feature_names, config, holidays);
}

AdditiveFit fit_additive(std::span<const Date> dates, std::span<const double> target,
                         const Eigen::MatrixXd& regressors, std::span<const std::string> regressor_names,
                         const AdditiveConfig& config, std::span<const Holiday> holidays) {
    config.validate();
    const auto n = static_cast<Eigen::Index>(dates.size());
    if (n == 0) {
        throw LengthError("additive fit needs at least one observation");
    }
    if (static_cast<std::size_t>(n) != target.size()) {
        throw LengthError("dates and target differ in length");
    }
    if (regressors.cols() > 0 && regressors.rows() != n) {
        throw FeatureMismatchError("regressor rows do not match the training length");
    }
    if (static_cast<std::size_t>(regressors.cols()) != regressor_names.size()) {
        throw FeatureMismatchError("regressor names do not match regressor columns");
    }
    for (const double v : target) {
        if (!std::isfinite(v)) {
            throw ValidationError("additive fit: non-finite target");
        }
    }
    if (!regressors.allFinite()) {
        throw ValidationError("additive fit: non-finite regressor");
    }

    AdditiveFit fit;
    fit.config = config;
    fit.origin = dates.front();
    fit.changepoint_times = place_changepoints(dates, config.n_changepoints, config.changepoint_range);
    fit.holidays.assign(holidays.begin(), holidays.end());
    fit.regressor_names.assign(regressor_names.begin(), regressor_names.end());

    const double t_scale = std::max(day_offset(dates.back(), fit.origin), 1.0);
    double y_scale = 0.0;
    for (const double v : target) {
        y_scale = std::max(y_scale, std::abs(v));
    }
    if (y_scale == 0.0) {
        y_scale = 1.0;
    }

    // Regressor standardisation; constant columns carry no information and are dropped.
    std::vector<Eigen::Index> active;
    std::vector<double> means(static_cast<std::size_t>(regressors.cols()), 0.0);
    std::vector<double> sds(static_cast<std::size_t>(regressors.cols()), 0.0);
    for (Eigen::Index j = 0; j < regressors.cols(); ++j) {
        const double mean = regressors.col(j).mean();
        const double sd = std::sqrt((regressors.col(j).array() - mean).square().sum() / static_cast<double>(n));
        means[static_cast<std::size_t>(j)] = mean;
        sds[static_cast<std::size_t>(j)] = sd;
        if (sd > 1e-12 * std::max(1.0, std::abs(mean))) {
            active.push_back(j);
        }
    }

    Layout layout;
    layout.changepoints = static_cast<Eigen::Index>(fit.changepoint_times.size());
    layout.yearly = static_cast<Eigen::Index>(2 * config.yearly_order);
    layout.weekly = static_cast<Eigen::Index>(2 * config.weekly_order);
    layout.holidays = static_cast<Eigen::Index>(holidays.size());
    layout.regressors = static_cast<Eigen::Index>(active.size());

    Eigen::MatrixXd design(n, layout.columns());
    for (Eigen::Index i = 0; i < n; ++i) {
        const double t = day_offset(dates[static_cast<std::size_t>(i)], fit.origin);
        design(i, 0) = 1.0;
        design(i, 1) = t / t_scale;
        for (Eigen::Index j = 0; j < layout.changepoints; ++j) {
            const double s = day_offset(fit.changepoint_times[static_cast<std::size_t>(j)], fit.origin);
            design(i, layout.cp_begin() + j) = std::max(0.0, t - s) / t_scale;
        }
    }
    if (layout.yearly > 0) {
        design.middleCols(layout.yearly_begin(), layout.yearly) = fourier_basis(dates, kYearDays, config.yearly_order);
    }
    if (layout.weekly > 0) {
        design.middleCols(layout.weekly_begin(), layout.weekly) = fourier_basis(dates, kWeekDays, config.weekly_order);
    }
    for (Eigen::Index h = 0; h < layout.holidays; ++h) {
        const std::set<Date> on(holidays[static_cast<std::size_t>(h)].dates.begin(),
                                holidays[static_cast<std::size_t>(h)].dates.end());
        for (Eigen::Index i = 0; i < n; ++i) {
            design(i, layout.holiday_begin() + h) = on.count(dates[static_cast<std::size_t>(i)]) ? 1.0 : 0.0;
        }
    }
    for (Eigen::Index r = 0; r < layout.regressors; ++r) {
        const auto j = active[static_cast<std::size_t>(r)];
        design.col(layout.regressor_begin() + r) =
            (regressors.col(j).array() - means[static_cast<std::size_t>(j)]) / sds[static_cast<std::size_t>(j)];
    }

    Eigen::VectorXd penalty = Eigen::VectorXd::Zero(layout.columns());
    penalty.segment(layout.cp_begin(), layout.changepoints).setConstant(inverse_or_zero(config.trend_flexibility));
    penalty.segment(layout.yearly_begin(), layout.yearly + layout.weekly + layout.holidays)
        .setConstant(inverse_or_zero(config.seasonality_strength));

    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        y(i) = target[static_cast<std::size_t>(i)] / y_scale;
    }

    Eigen::VectorXd beta = solve_penalized(design, y, penalty);

    const Eigen::Index seasonal_cols = layout.yearly + layout.weekly;
    if (config.mode == SeasonalityMode::Multiplicative && seasonal_cols > 0) {
        // Second pass: seasonal columns scaled by the first-pass trend.
        const Eigen::Index trend_cols = 2 + layout.changepoints;
        const Eigen::VectorXd trend = design.leftCols(trend_cols) * beta.head(trend_cols);
        Eigen::MatrixXd linearized = design;
        for (Eigen::Index j = layout.yearly_begin(); j < layout.yearly_begin() + seasonal_cols; ++j) {
            linearized.col(j) = design.col(j).cwiseProduct(trend);
        }
        beta = solve_penalized(linearized, y, penalty);
    }

    fit.offset = y_scale * beta(0);
    fit.base_slope = y_scale * beta(1) / t_scale;
    fit.changepoint_deltas = to_vector(beta, layout.cp_begin(), layout.changepoints, y_scale / t_scale);
    const double seasonal_factor = config.mode == SeasonalityMode::Additive ? y_scale : 1.0;
    fit.yearly_coefficients = to_vector(beta, layout.yearly_begin(), layout.yearly, seasonal_factor);
    fit.weekly_coefficients = to_vector(beta, layout.weekly_begin(), layout.weekly, seasonal_factor);
    fit.holiday_effects = to_vector(beta, layout.holiday_begin(), layout.holidays, y_scale);
    fit.regressor_coefficients.assign(static_cast<std::size_t>(regressors.cols()), 0.0);
    fit.regressor_means = means;
    for (Eigen::Index r = 0; r < layout.regressors; ++r) {
        const auto j = static_cast<std::size_t>(active[static_cast<std::size_t>(r)]);
        fit.regressor_coefficients[j] = y_scale * beta(layout.regressor_begin() + r) / sds[j];
    }

    const Decomposition in_sample = decompose(fit, dates, regressors);
    double rss = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double e = target[static_cast<std::size_t>(i)] - in_sample.point[static_cast<std::size_t>(i)];
        rss += e * e;
    }
    fit.residual_std = std::sqrt(rss / static_cast<double>(n));
    return fit;
}

Decomposition decompose(const AdditiveFit& fit, std::span<const Date> dates, const Eigen::MatrixXd& regressors) {
    const auto n = static_cast<Eigen::Index>(dates.size());
    const auto n_reg = static_cast<Eigen::Index>(fit.regressor_coefficients.size());
    if (regressors.cols() != n_reg || (n_reg > 0 && regressors.rows() != n)) {
        throw FeatureMismatchError("predict needs " + std::to_string(n_reg) + " regressor columns and " +
                                   std::to_string(n) + " rows");
    }
    const Eigen::MatrixXd yearly = fourier_basis(dates, kYearDays, fit.yearly_coefficients.size() / 2);
    const Eigen::MatrixXd weekly = fourier_basis(dates, kWeekDays, fit.weekly_coefficients.size() / 2);

    std::vector<std::set<Date>> holiday_sets;
    for (const auto& h : fit.holidays) {
        holiday_sets.emplace_back(h.dates.begin(), h.dates.end());
    }

    Decomposition out;
    for (Eigen::Index i = 0; i < n; ++i) {
        const Date date = dates[static_cast<std::size_t>(i)];
        const double g = trend_at(fit, day_offset(date, fit.origin));
        const double s = dot_row(yearly, i, fit.yearly_coefficients) + dot_row(weekly, i, fit.weekly_coefficients);
        const double seasonal = fit.config.mode == SeasonalityMode::Additive ? s : g * s;
        double reg = 0.0;
        for (Eigen::Index j = 0; j < n_reg; ++j) {
            const auto k = static_cast<std::size_t>(j);
            reg += fit.regressor_coefficients[k] * (regressors(i, j) - fit.regressor_means[k]);
        }
        double hol = 0.0;
        for (std::size_t h = 0; h < holiday_sets.size(); ++h) {
            if (holiday_sets[h].count(date)) {
                hol += fit.holiday_effects[h];
            }
        }
        out.trend.push_back(g);
        out.seasonal.push_back(seasonal);
        out.regressors.push_back(reg);
        out.holidays.push_back(hol);
        out.point.push_back(g + seasonal + reg + hol);
    }
    return out;
}

ForecastResult predict_additive(const AdditiveFit& fit, std::span<const Date> dates,
                                const Eigen::MatrixXd& regressors) {
    Decomposition parts = decompose(fit, dates, regressors);
    ForecastResult out;
    out.dates.assign(dates.begin(), dates.end());
    out.point = std::move(parts.point);
    const double half_width = interval_z(fit.config.interval_width) * fit.residual_std;
    for (const double p : out.point) {
        out.lower.push_back(p - half_width);
        out.upper.push_back(p + half_width);
    }
    return out;
}

std::vector<AdditiveConfig> hyperparameter_grid() {
    std::vector<AdditiveConfig> grid;
    for (const double flexibility : {0.001, 0.01, 0.1, 0.5}) {
        for (const double strength : {0.01, 0.1, 1.0, 10.0}) {
            for (const std::size_t changepoints : {15u, 25u, 35u}) {
                for (int variant = 0; variant < 3; ++variant) {
                    AdditiveConfig c;
                    c.trend_flexibility = flexibility;
                    c.seasonality_strength = strength;
                    c.n_changepoints = changepoints;
                    c.mode = variant == 1 ? SeasonalityMode::Multiplicative : SeasonalityMode::Additive;
                    if (variant == 2) {
                        c.weekly_order = 0;
                    }
                    c.interval_width = 0.95;
                    grid.push_back(c);
                }
            }
        }
    }
    return grid;
}

} // namespace aircast::additive
