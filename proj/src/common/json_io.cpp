#include "aircast/json_io.hpp"

#include "aircast/error.hpp"

#include <cmath>
#include <limits>

namespace aircast {

namespace {

Json number(double v) {
    if (std::isfinite(v)) {
        return v;
    }
    if (std::isnan(v)) {
        return "nan";
    }
    return v > 0 ? "inf" : "-inf";
}

double read_number(const Json& j) {
    if (j.is_number()) {
        return j.get<double>();
    }
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf") {
            return std::numeric_limits<double>::infinity();
        }
        if (s == "-inf") {
            return -std::numeric_limits<double>::infinity();
        }
    }
    throw ConfigError("expected a number, got " + j.dump());
}

template <typename T>
void read_count(const Json& j, const char* key, T& out) {
    if (const auto it = j.find(key); it != j.end()) {
        if (!it->is_number_unsigned() && !(it->is_number_integer() && it->get<long long>() >= 0)) {
            throw ConfigError(std::string("'") + key + "' must be a non-negative integer");
        }
        out = it->get<T>();
    }
}

void read_real(const Json& j, const char* key, double& out) {
    if (const auto it = j.find(key); it != j.end()) {
        out = read_number(*it);
    }
}

Json numbers(std::span<const double> values) {
    Json out = Json::array();
    for (double v : values) {
        out.push_back(number(v));
    }
    return out;
}

} // namespace

void to_json(Json& j, const ForecastResult& f) {
    Json dates = Json::array();
    for (Date d : f.dates) {
        dates.push_back(to_iso(d));
    }
    j = Json{{"dates", std::move(dates)}, {"point", numbers(f.point)}};
    if (f.has_interval()) {
        j["lower"] = numbers(f.lower);
        j["upper"] = numbers(f.upper);
    }
}

namespace dataset {

void to_json(Json& j, const ScalerState& s) {
    j = Json{{"labels", s.labels}, {"min", numbers(s.min)}, {"max", numbers(s.max)}};
}

void from_json(const Json& j, ScalerState& s) {
    s.labels = j.at("labels").get<std::vector<std::string>>();
    s.min.clear();
    s.max.clear();
    for (const auto& v : j.at("min")) {
        s.min.push_back(read_number(v));
    }
    for (const auto& v : j.at("max")) {
        s.max.push_back(read_number(v));
    }
    if (s.min.size() != s.labels.size() || s.max.size() != s.labels.size()) {
        throw ConfigError("scaler state has inconsistent column counts");
    }
}

void to_json(Json& j, const WindEncoding& w) {
    j = Json::object();
    for (std::size_t i = 0; i < w.categories.size(); ++i) {
        j[w.categories[i]] = i;
    }
}

void from_json(const Json& j, WindEncoding& w) {
    w.categories.assign(j.size(), {});
    for (const auto& [name, code] : j.items()) {
        const auto c = code.get<std::size_t>();
        if (c >= w.categories.size()) {
            throw ConfigError("wind direction code out of range");
        }
        w.categories[c] = name;
    }
}

} // namespace dataset

namespace neural {

void to_json(Json& j, const NetworkSpec& s) {
    j = Json{{"kind", to_string(s.kind)},
             {"lstm_units", s.lstm_units},
             {"lstm_activation", to_string(s.lstm_activation)},
             {"conv_filters", s.conv_filters},
             {"conv_kernel", s.conv_kernel},
             {"pool_size", s.pool_size},
             {"dense_hidden", s.dense_hidden},
             {"lookback", s.lookback},
             {"seed", s.seed},
             {"batch_size", s.batch_size},
             {"epochs", s.epochs},
             {"learning_rate", s.adam.learning_rate},
             {"beta1", s.adam.beta1},
             {"beta2", s.adam.beta2},
             {"epsilon", s.adam.epsilon},
             {"forget_bias_one", s.forget_bias_one},
             {"cell_clip", s.cell_clip}};
}

void from_json(const Json& j, NetworkSpec& s) {
    if (const auto it = j.find("kind"); it != j.end()) {
        s.kind = network_kind_from_string(it->get<std::string>());
    }
    if (const auto it = j.find("lstm_activation"); it != j.end()) {
        s.lstm_activation = activation_from_string(it->get<std::string>());
    }
    read_count(j, "lstm_units", s.lstm_units);
    read_count(j, "conv_filters", s.conv_filters);
    read_count(j, "conv_kernel", s.conv_kernel);
    read_count(j, "pool_size", s.pool_size);
    read_count(j, "dense_hidden", s.dense_hidden);
    read_count(j, "lookback", s.lookback);
    read_count(j, "seed", s.seed);
    read_count(j, "batch_size", s.batch_size);
    read_count(j, "epochs", s.epochs);
    read_real(j, "learning_rate", s.adam.learning_rate);
    read_real(j, "beta1", s.adam.beta1);
    read_real(j, "beta2", s.adam.beta2);
    read_real(j, "epsilon", s.adam.epsilon);
    read_real(j, "cell_clip", s.cell_clip);
    if (const auto it = j.find("forget_bias_one"); it != j.end()) {
        s.forget_bias_one = it->get<bool>();
    }
}

} // namespace neural

namespace additive {

void to_json(Json& j, const AdditiveConfig& c) {
    j = Json{{"n_changepoints", c.n_changepoints},
             {"changepoint_range", c.changepoint_range},
             {"trend_flexibility", number(c.trend_flexibility)},
             {"seasonality_strength", number(c.seasonality_strength)},
             {"seasonality_mode", to_string(c.mode)},
             {"yearly_order", c.yearly_order},
             {"weekly_order", c.weekly_order},
             {"interval_width", c.interval_width}};
}

void from_json(const Json& j, AdditiveConfig& c) {
    if (!j.is_object()) {
        throw ConfigError("additive config must be a JSON object");
    }
    read_count(j, "n_changepoints", c.n_changepoints);
    read_real(j, "changepoint_range", c.changepoint_range);
    read_real(j, "trend_flexibility", c.trend_flexibility);
    read_real(j, "seasonality_strength", c.seasonality_strength);
    if (const auto it = j.find("seasonality_mode"); it != j.end()) {
        c.mode = seasonality_mode_from_string(it->get<std::string>());
    }
    read_count(j, "yearly_order", c.yearly_order);
    read_count(j, "weekly_order", c.weekly_order);
    read_real(j, "interval_width", c.interval_width);
    c.validate();
}

void to_json(Json& j, const AdditiveFit& f) {
    Json changepoints = Json::array();
    for (Date d : f.changepoint_times) {
        changepoints.push_back(to_iso(d));
    }
    Json regressors = Json::object();
    for (std::size_t i = 0; i < f.regressor_names.size(); ++i) {
        regressors[f.regressor_names[i]] = number(f.regressor_coefficients[i]);
    }
    j = Json{{"config", f.config},
             {"origin", to_iso(f.origin)},
             {"base_slope", number(f.base_slope)},
             {"offset", number(f.offset)},
             {"changepoints", std::move(changepoints)},
             {"changepoint_deltas", numbers(f.changepoint_deltas)},
             {"yearly_coefficients", numbers(f.yearly_coefficients)},
             {"weekly_coefficients", numbers(f.weekly_coefficients)},
             {"holiday_effects", numbers(f.holiday_effects)},
             {"regressor_coefficients", std::move(regressors)},
             {"residual_std", number(f.residual_std)}};
}

} // namespace additive

namespace metrics {

void to_json(Json& j, const MetricRow& m) {
    j = Json{{"rmse", number(m.rmse)}, {"mae", number(m.mae)}, {"mape", number(m.mape)}, {"rrse", number(m.rrse)}};
}

} // namespace metrics

namespace stationarity {

void to_json(Json& j, const AdfResult& r) {
    j = Json{{"statistic", number(r.statistic)},
             {"lag_order", r.lag_order},
             {"max_lag", r.max_lag},
             {"regression", to_string(r.kind)},
             {"alpha", number(r.coefficient_alpha)},
             {"constant", number(r.constant)}};
    if (r.trend) {
        j["trend"] = number(*r.trend);
    }
    j["lag_coefficients"] = numbers(r.lag_coefficients);
    j["n_obs"] = r.n_obs;
    j["aic"] = number(r.aic);
    j["p_value"] = number(r.p_value);
    j["stationary"] = r.reject_unit_root_at_5pct;
}

} // namespace stationarity

namespace arima {

void to_json(Json& j, const ArimaSpec& s) {
    j = Json{{"p", s.p}, {"d", s.d}, {"q", s.q}, {"intercept", s.include_intercept}};
}

void to_json(Json& j, const ArimaFit& f) {
    j = Json{{"order", f.spec},
             {"label", f.spec.label()},
             {"intercept", number(f.coefficients.intercept)},
             {"ar", numbers(f.coefficients.ar)},
             {"ma", numbers(f.coefficients.ma)},
             {"exog", numbers(f.coefficients.exog)},
             {"sigma2", number(f.sigma2)},
             {"log_likelihood", number(f.log_likelihood)},
             {"aic", number(f.aic)},
             {"n_train", f.n_train},
             {"evaluations", f.evaluations},
             {"converged", f.converged},
             {"warnings", f.warnings}};
}

} // namespace arima

} // namespace aircast
