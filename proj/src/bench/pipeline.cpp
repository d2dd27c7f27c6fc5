#include "aircast/bench.hpp"

#include "aircast/error.hpp"
#include "aircast/parallel.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <cstdio>

namespace aircast::bench {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

metrics::MetricRow score(std::span<const double> actual, std::span<const double> predicted) {
    return metrics::evaluate(metrics::EvalInputs(actual, predicted));
}

ReportRow base_row(const std::string& station, ModelFamily family, std::size_t index, std::string label) {
    ReportRow row;
    row.station = station;
    row.family = family;
    row.grid_index = index;
    row.hyperparameters = std::move(label);
    return row;
}

struct Context {
    const RunConfig& config;
    const dataset::DailyDataset& data;
    dataset::SplitBundle split;
    dataset::DailyDataset block;  // train + validation
    StationReport& report;
};

void mark_selected(std::vector<ReportRow>& rows, ModelFamily family, std::size_t index) {
    rows[index].selected = true;
    spdlog::info("{}: {} selected '{}'", rows[index].station, to_string(family), rows[index].hyperparameters);
}

// ---------------------------------------------------------------------------

std::vector<ReportRow> run_additive(Context& ctx) {
    const auto& grid = ctx.config.additive_grid;
    const auto& train = ctx.split.train;
    const auto& validation = ctx.split.validation;
    const auto& test = ctx.split.test;
    std::vector<ReportRow> rows(grid.size());
    std::vector<std::optional<ForecastResult>> forecasts(grid.size());

    ctx.report.fit_digests["additive.select.target"] = digest(train.target);
    ctx.report.fit_digests["additive.select.regressors"] = digest(train.features);
    ctx.report.fit_digests["additive.refit.target"] = digest(ctx.block.target);
    ctx.report.fit_digests["additive.refit.regressors"] = digest(ctx.block.features);

    parallel_for(grid.size(), ctx.config.workers, [&](std::size_t i) {
        ReportRow row = base_row(ctx.data.station, ModelFamily::Additive, i, grid[i].label());
        try {
            if (!validation.empty()) {
                const auto carve = additive::fit_additive(train, grid[i]);
                const auto val = additive::predict_additive(carve, validation.dates, validation.features);
                row.selection_score = metrics::rmse(metrics::EvalInputs(validation.target, val.point));
            } else {
                const auto fit = additive::fit_additive(train, grid[i]);
                const auto in_sample = additive::predict_additive(fit, train.dates, train.features);
                row.selection_score = metrics::rmse(metrics::EvalInputs(train.target, in_sample.point));
            }
            const auto fit = additive::fit_additive(ctx.block, grid[i]);
            auto forecast = additive::predict_additive(fit, test.dates, test.features);
            row.test_metrics = score(test.target, forecast.point);
            forecasts[i] = std::move(forecast);
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        rows[i] = std::move(row);
    });

    const std::size_t best = select_best(rows);
    mark_selected(rows, ModelFamily::Additive, best);
    ctx.report.forecasts[ModelFamily::Additive] = std::move(*forecasts[best]);
    return rows;
}

std::vector<ReportRow> run_arima(Context& ctx) {
    const auto& block = ctx.block;
    const auto& test = ctx.split.test;
    ctx.report.fit_digests["arima.target"] = digest(block.target);
    ctx.report.fit_digests["arima.exog"] = digest(block.features);

    arima::AutoArimaOptions options;
    options.workers = ctx.config.workers;
    ReportRow row = base_row(ctx.data.station, ModelFamily::Arima, 0, "auto");
    try {
        auto result = arima::auto_arima(block.target, block.features, ctx.config.arima_p_max, ctx.config.arima_q_max,
                                        0, options);
        ctx.report.arima_cells = result.cells;
        row.hyperparameters = result.best.spec.label();
        row.selection_score = result.best.aic;
        ForecastResult forecast;
        forecast.dates = test.dates;
        forecast.point = arima::forecast_arima(result.best, test.size(), test.features);
        row.test_metrics = score(test.target, forecast.point);
        row.selected = true;
        ctx.report.forecasts[ModelFamily::Arima] = std::move(forecast);
        spdlog::info("{}: arima selected {} (AIC {:.3f})", ctx.data.station, row.hyperparameters, result.best.aic);
    } catch (const std::exception& e) {
        row.error = e.what();
    }
    if (!row.ok()) {
        throw SelectionError("arima: " + row.error);
    }
    return {row};
}

/// Scaled features/targets for rows [begin - lookback + 1, end) of the full
/// series, so that the windows produce one sample per day in [begin, end).
neural::TrainingSet window_set(const neural::TrainingSet& all, std::size_t begin, std::size_t end,
                               std::size_t lookback) {
    const std::size_t first = begin + 1 >= lookback ? begin + 1 - lookback : 0;
    neural::TrainingSet out;
    out.features.scaler = all.features.scaler;
    out.target.scaler = all.target.scaler;
    out.features.values = all.features.values.middleRows(static_cast<Eigen::Index>(first),
                                                         static_cast<Eigen::Index>(end - first));
    out.target.values.assign(all.target.values.begin() + static_cast<long>(first),
                             all.target.values.begin() + static_cast<long>(end));
    return out;
}

std::vector<ReportRow> run_network(Context& ctx, ModelFamily family) {
    const bool is_lstm = family == ModelFamily::Lstm;
    const auto& cfg = ctx.config;
    const auto& block = ctx.block;
    const auto& test = ctx.split.test;
    const std::size_t n_train = ctx.split.train.size();
    const std::size_t n_block = block.size();

    const dataset::ScalerState feature_scaler = dataset::fit_minmax(block.features, block.feature_names);
    const dataset::ScalerState target_scaler = dataset::fit_minmax(block.target, std::string(dataset::kTargetColumn));
    const std::string tag(to_string(family));
    ctx.report.fit_digests[tag + ".scaler.features"] = digest(block.features);
    ctx.report.fit_digests[tag + ".scaler.target"] = digest(block.target);

    // Scale the whole series with the pre-test state; only windows ending
    // before the test period reach the trainer.
    const neural::TrainingSet all = neural::scale_training_set(ctx.data, feature_scaler, target_scaler);
    neural::NetworkSpec base = is_lstm ? cfg.lstm_template : cfg.cnn_template;
    base.kind = is_lstm ? neural::NetworkKind::Lstm : neural::NetworkKind::Cnn1d;
    base.seed = cfg.seed;
    const std::size_t lookback = base.lookback;

    const neural::TrainingSet train = window_set(all, lookback - 1, n_train, lookback);
    std::optional<neural::TrainingSet> validation;
    if (n_block > n_train) {
        validation = window_set(all, n_train, n_block, lookback);
    }
    ctx.report.fit_digests[tag + ".train.features"] = digest(train.features.values);
    ctx.report.fit_digests[tag + ".train.target"] = digest(train.target.values);
    if (validation) {
        ctx.report.fit_digests[tag + ".validation.features"] = digest(validation->features.values);
        ctx.report.fit_digests[tag + ".validation.target"] = digest(validation->target.values);
    }
    const neural::TrainingSet test_set = window_set(all, n_block, ctx.data.size(), lookback);

    std::vector<neural::Activation> activations = cfg.activations;
    if (!is_lstm) {
        activations = {neural::Activation::Relu};
    }
    const std::size_t n_epochs = cfg.epochs_sweep.size();
    std::vector<ReportRow> rows(activations.size() * n_epochs);
    std::vector<std::optional<ForecastResult>> forecasts(rows.size());

    parallel_for(activations.size(), cfg.workers, [&](std::size_t a) {
        neural::NetworkSpec spec = base;
        spec.lstm_activation = activations[a];
        std::vector<neural::NetworkFit> fits;
        std::string failure;
        try {
            fits = neural::train_checkpoints(spec, train, validation, cfg.epochs_sweep);
        } catch (const std::exception& e) {
            failure = e.what();
        }
        for (std::size_t k = 0; k < n_epochs; ++k) {
            const std::size_t index = a * n_epochs + k;
            spec.epochs = cfg.epochs_sweep[k];
            ReportRow row = base_row(ctx.data.station, family, index, spec.label());
            if (is_lstm) {
                row.activation = activations[a];
            }
            if (!failure.empty()) {
                row.error = failure;
                rows[index] = std::move(row);
                continue;
            }
            try {
                const neural::NetworkFit& fit = fits[k];
                const auto& history = fit.validation_loss_history.empty() ? fit.train_loss_history
                                                                          : fit.validation_loss_history;
                row.selection_score = history.back();
                ForecastResult forecast;
                forecast.dates = test.dates;
                forecast.point = neural::predict_network(fit, test_set.features);
                row.test_metrics = score(test.target, forecast.point);
                forecasts[index] = std::move(forecast);
                if (fit.clip_events > 0) {
                    spdlog::debug("{}: {} clipped {} cell entries", ctx.data.station, row.hyperparameters,
                                  fit.clip_events);
                }
            } catch (const std::exception& e) {
                row.error = e.what();
            }
            rows[index] = std::move(row);
        }
    });

    const std::size_t best = select_best(rows);
    mark_selected(rows, family, best);
    ctx.report.forecasts[family] = std::move(*forecasts[best]);
    return rows;
}

} // namespace

std::string_view to_string(ModelFamily family) {
    switch (family) {
    case ModelFamily::Additive: return "additive";
    case ModelFamily::Arima: return "arima";
    case ModelFamily::Lstm: return "lstm";
    case ModelFamily::Cnn: return "cnn";
    }
    return "unknown";
}

ModelFamily family_from_string(std::string_view text) {
    for (ModelFamily f : kAllFamilies) {
        if (text == to_string(f)) {
            return f;
        }
    }
    if (text == "prophet" || text == "fbprophet") {
        return ModelFamily::Additive;
    }
    if (text == "cnn1d") {
        return ModelFamily::Cnn;
    }
    throw ConfigError("unknown model family '" + std::string(text) + "'");
}

std::string_view display_name(ModelFamily family) {
    switch (family) {
    case ModelFamily::Additive: return "Additive";
    case ModelFamily::Arima: return "ARIMA";
    case ModelFamily::Lstm: return "LSTM";
    case ModelFamily::Cnn: return "CNN";
    }
    return "unknown";
}

std::vector<std::string> default_stations() {
    return {"Aotizhongxin", "Changping", "Dingling", "Dongsi",  "Guanyuan", "Gucheng",
            "Huairou",      "Nongzhanguan", "Shunyi", "Tiantan", "Wanliu",   "Wanshouxigong"};
}

RunConfig::RunConfig() {
    lstm_template.kind = neural::NetworkKind::Lstm;
    cnn_template.kind = neural::NetworkKind::Cnn1d;
}

void RunConfig::validate() const {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw ConfigError("train fraction must lie in (0, 1)");
    }
    if (!(validation_fraction >= 0.0 && validation_fraction < 1.0)) {
        throw ConfigError("validation fraction must lie in [0, 1)");
    }
    if (!(train_fraction + validation_fraction < 1.0)) {
        throw ConfigError("train and validation fractions leave no test period");
    }
    if (epochs_sweep.empty() || std::find(epochs_sweep.begin(), epochs_sweep.end(), 0) != epochs_sweep.end()) {
        throw ConfigError("epoch sweep must be non-empty with positive budgets");
    }
    if (activations.empty()) {
        throw ConfigError("at least one LSTM activation is required");
    }
    if (models.empty()) {
        throw ConfigError("no model families selected");
    }
    if (additive_grid.empty()) {
        throw ConfigError("additive grid is empty");
    }
    for (const auto& c : additive_grid) {
        c.validate();
    }
    if (workers == 0) {
        throw ConfigError("workers must be at least 1");
    }
}

std::size_t select_best(std::span<const ReportRow> rows) {
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!rows[i].ok()) {
            continue;
        }
        if (!best || *rows[i].selection_score < *rows[*best].selection_score) {
            best = i;
        }
    }
    if (!best) {
        std::string detail = rows.empty() ? "no candidate rows" : "every candidate failed";
        if (!rows.empty() && !rows.front().error.empty()) {
            detail += " (first error: " + rows.front().error + ")";
        }
        throw SelectionError(detail);
    }
    return *best;
}

std::string_view selection_policy(ModelFamily family) {
    switch (family) {
    case ModelFamily::Additive: return "min-validation-rmse-then-refit-on-train-block";
    case ModelFamily::Arima: return "min-aic";
    case ModelFamily::Lstm:
    case ModelFamily::Cnn: return "min-final-validation-mae";
    }
    return "unknown";
}

StationReport run_dataset(const dataset::DailyDataset& data, const RunConfig& config) {
    config.validate();
    data.validate();
    StationReport report;
    report.station = data.station;
    report.n_days = data.size();

    Context ctx{config, data, dataset::chronological_split(data, config.train_fraction, config.validation_fraction),
                {}, report};
    ctx.block = ctx.split.training_block();
    report.n_train = ctx.split.train.size();
    report.n_validation = ctx.split.validation.size();
    report.n_test = ctx.split.test.size();
    report.test_dates = ctx.split.test.dates;
    report.test_actual = ctx.split.test.target;

    try {
        stationarity::AdfOptions adf;
        adf.kind = config.adf_kind;
        report.adf = stationarity::adf_test(ctx.block.target, adf);
        spdlog::info("{}: ADF statistic {:.3f}, p-value {:.4f}, lag {} -> {}", data.station, report.adf->statistic,
                     report.adf->p_value, report.adf->lag_order,
                     report.adf->reject_unit_root_at_5pct ? "stationary" : "unit root not rejected");
    } catch (const std::exception& e) {
        report.adf_error = e.what();
        spdlog::warn("{}: ADF failed: {}", data.station, e.what());
    }

    for (ModelFamily family : config.models) {
        const auto start = Clock::now();
        std::vector<ReportRow> rows;
        try {
            switch (family) {
            case ModelFamily::Additive: rows = run_additive(ctx); break;
            case ModelFamily::Arima: rows = run_arima(ctx); break;
            case ModelFamily::Lstm:
            case ModelFamily::Cnn: rows = run_network(ctx, family); break;
            }
        } catch (const Error& e) {
            throw Error(data.station + ": " + std::string(to_string(family)) + ": " + e.what());
        }
        const std::string tag(to_string(family));
        report.sweep_cells[tag] = family == ModelFamily::Arima ? report.arima_cells.size() : rows.size();
        report.seconds[tag] = seconds_since(start);
        spdlog::info("{}: {} finished in {:.1f}s", data.station, tag, report.seconds[tag]);
        report.rows.insert(report.rows.end(), std::make_move_iterator(rows.begin()),
                           std::make_move_iterator(rows.end()));
    }
    return report;
}

std::filesystem::path find_station_file(const std::filesystem::path& data_dir, const std::string& station,
                                        const std::string& prefix) {
    namespace fs = std::filesystem;
    std::error_code ec;
    if (!fs::is_directory(data_dir, ec)) {
        throw IoError("data directory '" + data_dir.string() + "' does not exist");
    }
    const std::string stem = prefix + station + "_";
    std::vector<fs::path> matches;
    for (const auto& entry : fs::directory_iterator(data_dir)) {
        const std::string name = entry.path().filename().string();
        if (entry.is_regular_file() && name.starts_with(stem) && name.ends_with(".csv")) {
            matches.push_back(entry.path());
        }
    }
    if (matches.empty()) {
        throw IoError("no file matching " + stem + "*.csv in '" + data_dir.string() + "'");
    }
    std::sort(matches.begin(), matches.end());
    return matches.front();
}

StationReport run_station(const std::string& station, const RunConfig& config) {
    const auto path = find_station_file(config.data_dir, station, config.file_prefix);
    spdlog::info("{}: loading {}", station, path.string());
    dataset::DailyDataset data;
    try {
        data = dataset::load_station_daily(path);
    } catch (const Error& e) {
        throw Error(station + ": " + e.what());
    }
    return run_dataset(data, config);
}

std::string digest(std::span<const double> values) {
    std::uint64_t h = 14695981039346656037ULL;
    const auto* bytes = reinterpret_cast<const unsigned char*>(values.data());
    for (std::size_t i = 0; i < values.size_bytes(); ++i) {
        h ^= bytes[i];
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string digest(const Eigen::MatrixXd& values) {
    return digest(std::span<const double>(values.data(), static_cast<std::size_t>(values.size())));
}

} // namespace aircast::bench
