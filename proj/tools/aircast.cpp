// aircast command-line front end.

#include "aircast/additive.hpp"
#include "aircast/arima.hpp"
#include "aircast/bench.hpp"
#include "aircast/dataset.hpp"
#include "aircast/error.hpp"
#include "aircast/json_io.hpp"
#include "aircast/metrics.hpp"
#include "aircast/neural.hpp"
#include "aircast/stationarity.hpp"
#include "aircast/synthetic.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using aircast::Json;

namespace {

std::ifstream open_input(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw aircast::IoError("cannot open '" + path.string() + "'");
    }
    return in;
}

void emit(const Json& j, const std::string& output) {
    if (output.empty() || output == "-") {
        std::cout << j.dump(2) << '\n';
        return;
    }
    std::ofstream out(output, std::ios::binary);
    if (!out) {
        throw aircast::IoError("cannot write '" + output + "'");
    }
    out << j.dump(2) << '\n';
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

/// Two numeric columns (actual, predicted); a non-numeric first line is a header.
std::pair<std::vector<double>, std::vector<double>> read_pairs(std::istream& in) {
    std::vector<double> actual, predicted;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw aircast::ParseError("row " + std::to_string(row) + ": expected two columns");
        }
        char* end = nullptr;
        const std::string a = line.substr(0, comma);
        const std::string p = line.substr(comma + 1);
        const double x = std::strtod(a.c_str(), &end);
        if (end == a.c_str()) {
            if (row == 1) {
                continue;
            }
            throw aircast::ParseError("row " + std::to_string(row) + ": unparsable actual value '" + a + "'");
        }
        const double y = std::strtod(p.c_str(), &end);
        if (end == p.c_str()) {
            throw aircast::ParseError("row " + std::to_string(row) + ": unparsable predicted value '" + p + "'");
        }
        actual.push_back(x);
        predicted.push_back(y);
    }
    return {actual, predicted};
}

Json dates_json(std::span<const aircast::Date> dates) {
    Json out = Json::array();
    for (auto d : dates) {
        out.push_back(aircast::to_iso(d));
    }
    return out;
}

std::string default_data_dir() {
    const char* env = std::getenv("AIRCAST_DATA_DIR");
    return env ? env : "";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Daily PM2.5 forecasting: preprocessing, unit-root tests, ARIMA, additive and neural models, "
                 "and the station benchmark."};
    app.require_subcommand(1);
    app.fallthrough();
    std::string log_level = "info";
    app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off")->capture_default_str();

    // prepare -----------------------------------------------------------
    auto* prepare = app.add_subcommand("prepare", "Clean and aggregate a raw station file to a daily CSV");
    std::string prep_input, prep_output, prep_sidecar;
    double prep_train = 0.75, prep_validation = 0.20;
    prepare->add_option("--input", prep_input, "Raw hourly station CSV")->required();
    prepare->add_option("--out", prep_output, "Daily CSV to write")->required();
    prepare->add_option("--sidecar", prep_sidecar, "Sidecar JSON (default: <out>.json)");
    prepare->add_option("--train-fraction", prep_train, "Pre-test share used to fit the scaler")->capture_default_str();
    prepare->add_option("--validation-fraction", prep_validation)->capture_default_str();

    // synth -------------------------------------------------------------
    auto* synth = app.add_subcommand("synth", "Write a synthetic hourly station file in the raw layout");
    aircast::dataset::SyntheticStationOptions synth_options;
    std::string synth_output, synth_first = "2013-03-01", synth_last = "2017-02-28";
    synth->add_option("--out", synth_output, "File to write")->required();
    synth->add_option("--station", synth_options.station)->capture_default_str();
    synth->add_option("--seed", synth_options.seed)->capture_default_str();
    synth->add_option("--missing-rate", synth_options.missing_rate)->capture_default_str();
    synth->add_option("--first-day", synth_first)->capture_default_str();
    synth->add_option("--last-day", synth_last)->capture_default_str();

    // adf ---------------------------------------------------------------
    auto* adf = app.add_subcommand("adf", "Augmented Dickey-Fuller test on a single-column CSV");
    std::string adf_input, adf_regression = "ct", adf_output;
    std::optional<std::size_t> adf_max_lag;
    adf->add_option("--input", adf_input, "Single-column CSV, optional header")->required();
    adf->add_option("--max-lag", adf_max_lag, "Largest lag considered (default: Schwert rule)");
    adf->add_option("--regression", adf_regression, "c or ct")->capture_default_str();
    adf->add_option("--output", adf_output, "JSON output file (default: stdout)");

    // arima -------------------------------------------------------------
    auto* arima = app.add_subcommand("arima", "Automatic ARIMA order search and forecast");
    std::string arima_input, arima_output;
    std::size_t p_max = 5, q_max = 5, arima_d = 0, arima_workers = 1;
    std::optional<std::size_t> horizon;
    double arima_train = 0.75;
    bool no_exog = false, no_intercept = false;
    arima->add_option("--input", arima_input, "Daily CSV, raw station file or single-column series")->required();
    arima->add_option("--p-max", p_max)->capture_default_str();
    arima->add_option("--q-max", q_max)->capture_default_str();
    arima->add_option("--d", arima_d)->capture_default_str();
    arima->add_option("--horizon", horizon,
                      "Days held out and forecast (default: the test share implied by --train-fraction)");
    arima->add_option("--train-fraction", arima_train)->capture_default_str();
    arima->add_flag("--no-exog", no_exog, "Ignore the feature columns");
    arima->add_flag("--no-intercept", no_intercept);
    arima->add_option("--workers", arima_workers)->capture_default_str();
    arima->add_option("--output", arima_output);

    // additive ----------------------------------------------------------
    auto* add = app.add_subcommand("additive", "Fit additive trend/seasonality models and forecast");
    std::string add_input, add_grid, add_config, add_output;
    double add_train = 0.75;
    bool add_default_grid = false;
    add->add_option("--input", add_input, "Daily CSV or raw station file")->required();
    add->add_option("--grid", add_grid, "JSON file holding a list of configs");
    add->add_flag("--default-grid", add_default_grid, "Use the built-in 144-config grid");
    add->add_option("--config", add_config, "JSON object of overrides applied to every config");
    add->add_option("--train-fraction", add_train)->capture_default_str();
    add->add_option("--output", add_output);

    // nn ----------------------------------------------------------------
    auto* nn = app.add_subcommand("nn", "Train an LSTM or 1D-CNN regressor and forecast the test period");
    std::string nn_input, nn_kind = "lstm", nn_activation = "tanh", nn_output, nn_save, nn_load;
    aircast::neural::NetworkSpec nn_spec;
    double nn_train = 0.75, nn_validation = 0.20;
    nn->add_option("--input", nn_input, "Daily CSV or raw station file")->required();
    nn->add_option("--kind", nn_kind, "lstm or cnn")->capture_default_str();
    nn->add_option("--epochs", nn_spec.epochs)->capture_default_str();
    nn->add_option("--activation", nn_activation, "LSTM activation: tanh or relu")->capture_default_str();
    nn->add_option("--lookback", nn_spec.lookback)->capture_default_str();
    nn->add_option("--seed", nn_spec.seed)->capture_default_str();
    nn->add_option("--batch", nn_spec.batch_size)->capture_default_str();
    nn->add_option("--units", nn_spec.lstm_units)->capture_default_str();
    nn->add_option("--filters", nn_spec.conv_filters)->capture_default_str();
    nn->add_option("--train-fraction", nn_train)->capture_default_str();
    nn->add_option("--validation-fraction", nn_validation)->capture_default_str();
    nn->add_option("--save", nn_save, "Write the trained model to this file");
    nn->add_option("--load", nn_load, "Skip training and use a saved model");
    nn->add_option("--output", nn_output);

    // eval --------------------------------------------------------------
    auto* eval = app.add_subcommand("eval", "RMSE, MAE, MAPE and RRSE from an actual,predicted CSV");
    std::string eval_input, eval_policy = "error", eval_output;
    double eval_epsilon = 1e-9;
    eval->add_option("--input", eval_input)->required();
    eval->add_option("--mape-zero", eval_policy, "error or exclude")->capture_default_str();
    eval->add_option("--epsilon", eval_epsilon)->capture_default_str();
    eval->add_option("--output", eval_output);

    // bench -------------------------------------------------------------
    auto* bench = app.add_subcommand("bench", "Run the four-model benchmark over station files");
    aircast::bench::RunConfig run;
    std::string bench_data = default_data_dir(), bench_out, bench_stations, bench_models, bench_epochs,
                bench_activations, bench_grid, bench_regression = "ct";
    bench->add_option("--data-dir", bench_data, "Directory with station CSVs (default: $AIRCAST_DATA_DIR)");
    bench->add_option("--out", bench_out, "Report directory")->required();
    bench->add_option("--stations", bench_stations, "Comma-separated station names (default: all twelve)");
    bench->add_option("--models", bench_models, "Comma-separated subset of additive,arima,lstm,cnn");
    bench->add_option("--seed", run.seed)->capture_default_str();
    bench->add_option("--workers", run.workers)->capture_default_str();
    bench->add_option("--epochs", bench_epochs, "Comma-separated epoch budgets (default: 200,...,1000)");
    bench->add_option("--activations", bench_activations, "Comma-separated LSTM activations");
    bench->add_option("--grid", bench_grid, "JSON file replacing the additive grid");
    bench->add_option("--adf-regression", bench_regression, "c or ct")->capture_default_str();
    bench->add_option("--train-fraction", run.train_fraction)->capture_default_str();
    bench->add_option("--validation-fraction", run.validation_fraction)->capture_default_str();
    bench->add_option("--lookback", run.lstm_template.lookback, "Lookback window for both networks")
        ->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    auto logger = spdlog::stderr_color_mt("aircast");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::from_str(log_level));

    namespace ds = aircast::dataset;
    try {
        if (*prepare) {
            const auto table = ds::encode_wind_direction(ds::forward_fill(ds::read_station_csv(prep_input)));
            const auto daily = ds::aggregate_daily(table);
            std::ofstream out(prep_output, std::ios::binary);
            if (!out) {
                throw aircast::IoError("cannot write '" + prep_output + "'");
            }
            ds::write_daily_csv(daily, out);
            const auto block = ds::chronological_split(daily, prep_train, prep_validation).training_block();
            Json sidecar{{"station", daily.station},
                         {"days", daily.size()},
                         {"first_date", aircast::to_iso(daily.dates.front())},
                         {"last_date", aircast::to_iso(daily.dates.back())},
                         {"wind_direction_codes", *table.wind_encoding},
                         {"scaler_fit_rows", block.size()},
                         {"feature_scaler", ds::fit_minmax(block.features, block.feature_names)},
                         {"target_scaler", ds::fit_minmax(block.target, std::string(ds::kTargetColumn))}};
            emit(sidecar, prep_sidecar.empty() ? prep_output + ".json" : prep_sidecar);
            spdlog::info("wrote {} daily rows to {}", daily.size(), prep_output);
        } else if (*synth) {
            synth_options.first_day = aircast::parse_iso(synth_first);
            synth_options.last_day = aircast::parse_iso(synth_last);
            std::ofstream out(synth_output, std::ios::binary);
            if (!out) {
                throw aircast::IoError("cannot write '" + synth_output + "'");
            }
            ds::write_synthetic_station(out, synth_options);
        } else if (*adf) {
            auto in = open_input(adf_input);
            const auto series = ds::read_series_csv(in);
            aircast::stationarity::AdfOptions options;
            options.max_lag = adf_max_lag;
            options.kind = aircast::stationarity::regression_kind_from_string(adf_regression);
            emit(Json(aircast::stationarity::adf_test(series, options)), adf_output);
        } else if (*arima) {
            ds::DailyDataset data;
            bool has_dates = true;
            try {
                data = ds::load_any(arima_input);
            } catch (const aircast::SchemaError&) {
                auto in = open_input(arima_input);
                data.target = ds::read_series_csv(in);
                data.features.resize(static_cast<Eigen::Index>(data.target.size()), 0);
                has_dates = false;
            }
            const std::size_t n = data.target.size();
            const std::size_t h = horizon ? *horizon : n - static_cast<std::size_t>(std::floor(n * arima_train));
            if (h >= n) {
                throw aircast::ConfigError("horizon must be shorter than the series");
            }
            const std::size_t n_fit = n - h;
            Eigen::MatrixXd exog = no_exog ? Eigen::MatrixXd(n, 0) : data.features;
            const std::span<const double> target(data.target);
            aircast::arima::AutoArimaOptions options;
            options.workers = arima_workers;
            options.include_intercept = !no_intercept;
            const auto result = aircast::arima::auto_arima(target.first(n_fit), exog.topRows(n_fit), p_max, q_max,
                                                           arima_d, options);
            const auto forecast = aircast::arima::forecast_arima(result.best, h, exog.bottomRows(h));
            Json grid = Json::array();
            for (const auto& c : result.cells) {
                grid.push_back(Json{{"p", c.p}, {"q", c.q}, {"aic", c.aic ? Json(*c.aic) : Json(nullptr)}});
            }
            Json j{{"fit", result.best}, {"grid", std::move(grid)}, {"horizon", h}, {"forecast", forecast}};
            if (has_dates) {
                j["dates"] = dates_json(std::span(data.dates).subspan(n_fit));
            }
            if (h > 0) {
                j["holdout_metrics"] = aircast::metrics::evaluate(
                    aircast::metrics::EvalInputs(target.subspan(n_fit), forecast));
            }
            emit(j, arima_output);
        } else if (*add) {
            const auto data = ds::load_any(add_input);
            std::vector<aircast::additive::AdditiveConfig> grid;
            if (!add_grid.empty()) {
                auto in = open_input(add_grid);
                const Json g = Json::parse(in);
                if (!g.is_array()) {
                    throw aircast::ConfigError("grid file must hold a JSON list of configs");
                }
                for (const auto& item : g) {
                    grid.push_back(item.get<aircast::additive::AdditiveConfig>());
                }
            } else if (add_default_grid) {
                grid = aircast::additive::hyperparameter_grid();
            } else {
                grid.emplace_back();
            }
            if (!add_config.empty()) {
                const Json overrides = Json::parse(add_config);
                for (auto& c : grid) {
                    Json merged = c;
                    merged.update(overrides);
                    c = merged.get<aircast::additive::AdditiveConfig>();
                }
            }
            const auto split = ds::chronological_split(data, add_train, 0.0);
            Json results = Json::array();
            for (const auto& config : grid) {
                const auto fit = aircast::additive::fit_additive(split.train, config);
                const auto forecast =
                    aircast::additive::predict_additive(fit, split.test.dates, split.test.features);
                results.push_back(Json{{"fit", fit},
                                       {"test_metrics", aircast::metrics::evaluate(aircast::metrics::EvalInputs(
                                                            split.test.target, forecast.point))},
                                       {"forecast", forecast}});
            }
            emit(Json{{"station", data.station}, {"n_train", split.train.size()}, {"n_test", split.test.size()},
                      {"results", std::move(results)}},
                 add_output);
        } else if (*nn) {
            namespace nnm = aircast::neural;
            const auto data = ds::load_any(nn_input);
            const auto split = ds::chronological_split(data, nn_train, nn_validation);
            const auto block = split.training_block();
            nnm::NetworkFit fit;
            if (!nn_load.empty()) {
                auto in = open_input(nn_load);
                fit = nnm::load_network(in);
            } else {
                nn_spec.kind = nnm::network_kind_from_string(nn_kind);
                nn_spec.lstm_activation = nnm::activation_from_string(nn_activation);
                const auto fs_state = ds::fit_minmax(block.features, block.feature_names);
                const auto ts_state = ds::fit_minmax(block.target, std::string(ds::kTargetColumn));
                const auto scaled_train = nnm::scale_training_set(split.train, fs_state, ts_state);
                std::optional<nnm::TrainingSet> scaled_validation;
                if (!split.validation.empty()) {
                    scaled_validation = nnm::scale_training_set(split.validation, fs_state, ts_state);
                }
                fit = nnm::build_and_train(nn_spec, scaled_train, scaled_validation);
                if (!nn_save.empty()) {
                    std::ofstream out(nn_save, std::ios::binary);
                    nnm::save_network(fit, out);
                }
            }
            // Windows for the test period reach back into the training block for context.
            const std::size_t lookback = fit.spec.lookback;
            const std::size_t context = std::min(lookback - 1, block.size());
            const auto window = data.slice(block.size() - context, data.size());
            nnm::ScaledFeatures features{ds::apply_minmax(fit.feature_scaler, window.features, window.feature_names),
                                         fit.feature_scaler};
            const auto forecast = nnm::predict_network(fit, features);
            const std::span<const double> actual = std::span(window.target).subspan(lookback - 1);
            emit(Json{{"spec", fit.spec},
                      {"train_loss_history", fit.train_loss_history},
                      {"validation_loss_history", fit.validation_loss_history},
                      {"clip_events", fit.clip_events},
                      {"test_metrics", aircast::metrics::evaluate(aircast::metrics::EvalInputs(actual, forecast))},
                      {"dates", dates_json(std::span(window.dates).subspan(lookback - 1))},
                      {"forecast", forecast}},
                 nn_output);
        } else if (*eval) {
            auto in = open_input(eval_input);
            const auto [actual, predicted] = read_pairs(in);
            aircast::metrics::MapeOptions options;
            options.epsilon_guard = eval_epsilon;
            std::size_t excluded = 0;
            if (eval_policy == "exclude") {
                options.policy = aircast::metrics::ZeroActualPolicy::Exclude;
                options.excluded = &excluded;
            } else if (eval_policy != "error") {
                throw aircast::ConfigError("--mape-zero must be 'error' or 'exclude'");
            }
            Json j = aircast::metrics::evaluate(aircast::metrics::EvalInputs(actual, predicted), options);
            j["n"] = actual.size();
            if (options.policy == aircast::metrics::ZeroActualPolicy::Exclude) {
                j["mape_excluded"] = excluded;
            }
            emit(j, eval_output);
        } else if (*bench) {
            if (bench_data.empty()) {
                throw aircast::ConfigError("no data directory: pass --data-dir or set AIRCAST_DATA_DIR");
            }
            run.data_dir = bench_data;
            run.output_dir = bench_out;
            if (!bench_stations.empty()) {
                run.stations = split_list(bench_stations);
            }
            if (!bench_models.empty()) {
                run.models.clear();
                for (const auto& m : split_list(bench_models)) {
                    run.models.push_back(aircast::bench::family_from_string(m));
                }
            }
            if (!bench_epochs.empty()) {
                run.epochs_sweep.clear();
                for (const auto& e : split_list(bench_epochs)) {
                    run.epochs_sweep.push_back(std::stoul(e));
                }
            }
            if (!bench_activations.empty()) {
                run.activations.clear();
                for (const auto& a : split_list(bench_activations)) {
                    run.activations.push_back(aircast::neural::activation_from_string(a));
                }
            }
            if (!bench_grid.empty()) {
                auto in = open_input(bench_grid);
                run.additive_grid = Json::parse(in).get<std::vector<aircast::additive::AdditiveConfig>>();
            }
            run.adf_kind = aircast::stationarity::regression_kind_from_string(bench_regression);
            run.cnn_template.lookback = run.lstm_template.lookback;
            const auto report = aircast::bench::run_bench(run);
            std::ifstream table(fs::path(bench_out) / "averages.txt");
            std::cout << table.rdbuf();
        }
    } catch (const aircast::Error& e) {
        spdlog::error("{}", e.what());
        return 1;
    } catch (const Json::exception& e) {
        spdlog::error("invalid JSON: {}", e.what());
        return 1;
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return 2;
    }
    return 0;
}
