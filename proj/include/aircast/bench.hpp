#pragma once

#include "aircast/additive.hpp"
#include "aircast/arima.hpp"
#include "aircast/dataset.hpp"
#include "aircast/forecast.hpp"
#include "aircast/json_io.hpp"
#include "aircast/metrics.hpp"
#include "aircast/neural.hpp"
#include "aircast/stationarity.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace aircast::bench {

enum class ModelFamily { Additive, Arima, Lstm, Cnn };

inline constexpr std::array<ModelFamily, 4> kAllFamilies = {ModelFamily::Additive, ModelFamily::Arima,
                                                            ModelFamily::Lstm, ModelFamily::Cnn};

/// "additive", "arima", "lstm", "cnn".
std::string_view to_string(ModelFamily family);
ModelFamily family_from_string(std::string_view text);

/// Column label used in the report tables.
std::string_view display_name(ModelFamily family);

/// The twelve monitoring sites of the multi-site dataset.
std::vector<std::string> default_stations();

struct RunConfig {
    std::filesystem::path data_dir;
    std::vector<std::string> stations = default_stations();
    std::vector<ModelFamily> models{kAllFamilies.begin(), kAllFamilies.end()};
    double train_fraction = 0.75;
    double validation_fraction = 0.20;
    std::vector<std::size_t> epochs_sweep{200, 400, 600, 800, 1000};
    std::vector<neural::Activation> activations{neural::Activation::Tanh, neural::Activation::Relu};
    std::uint64_t seed = 42;
    std::filesystem::path output_dir;
    std::size_t workers = 1;

    /// Station files are found as <prefix><Station>_*.csv.
    std::string file_prefix = "PRSA_Data_";
    stationarity::RegressionKind adf_kind = stationarity::RegressionKind::ConstantTrend;
    std::size_t arima_p_max = 5;
    std::size_t arima_q_max = 5;
    std::vector<additive::AdditiveConfig> additive_grid = additive::hyperparameter_grid();
    /// Architecture templates; kind, activation, epochs and seed are set per sweep cell.
    neural::NetworkSpec lstm_template;
    neural::NetworkSpec cnn_template;

    RunConfig();
    void validate() const;
};

/// One sweep cell evaluated on the test period.
struct ReportRow {
    std::string station;
    ModelFamily family = ModelFamily::Additive;
    std::size_t grid_index = 0;
    std::string hyperparameters;
    std::optional<neural::Activation> activation;  // LSTM cells only
    /// Selection criterion, lower is better (validation MAE, AIC or validation RMSE).
    std::optional<double> selection_score;
    std::optional<metrics::MetricRow> test_metrics;
    bool selected = false;
    std::string error;  // non-empty when the cell failed

    bool ok() const { return error.empty() && selection_score.has_value() && test_metrics.has_value(); }
};

/// Index of the row with the lowest selection score among successful rows;
/// ties go to the earlier row. Throws SelectionError when none succeeded.
std::size_t select_best(std::span<const ReportRow> rows);

/// Policy identifiers written to the manifest.
std::string_view selection_policy(ModelFamily family);

struct StationReport {
    std::string station;
    std::size_t n_days = 0;
    std::size_t n_train = 0;
    std::size_t n_validation = 0;
    std::size_t n_test = 0;
    std::optional<stationarity::AdfResult> adf;
    std::string adf_error;
    std::vector<ReportRow> rows;  // families in config order, cells in grid order
    std::vector<Date> test_dates;
    std::vector<double> test_actual;
    std::map<ModelFamily, ForecastResult> forecasts;  // selected cell per family
    std::vector<arima::GridCell> arima_cells;
    /// Digest of every array handed to a fitting or scaling routine.
    std::map<std::string, std::string> fit_digests;
    std::map<std::string, std::size_t> sweep_cells;
    std::map<std::string, double> seconds;
};

/// Full pipeline for one station's daily data.
StationReport run_dataset(const dataset::DailyDataset& data, const RunConfig& config);

/// Locates the station file under config.data_dir, loads it and runs it.
StationReport run_station(const std::string& station, const RunConfig& config);

std::filesystem::path find_station_file(const std::filesystem::path& data_dir, const std::string& station,
                                        const std::string& prefix = "PRSA_Data_");

struct AveragedRow {
    std::string label;
    metrics::MetricRow mean;
    std::size_t stations = 0;
    std::optional<metrics::MetricRow> reference;
};

struct EvalReport {
    std::vector<StationReport> stations;
    std::vector<AveragedRow> averages;     // one per family, config order
    std::vector<AveragedRow> activations;  // LSTM tanh vs relu
    Json manifest;
};

EvalReport assemble_report(std::vector<StationReport> stations, const RunConfig& config);

/// Writes tables, manifest and plots below output_dir.
void emit_report(const EvalReport& report, const std::filesystem::path& output_dir);

/// Runs every configured station, assembles and emits the report.
EvalReport run_bench(const RunConfig& config);

// ---------------------------------------------------------------------------
// Published reference values

struct ReferenceRow {
    std::string_view station;
    ModelFamily family;
    std::string_view label;  // e.g. "ARIMA(1,0,3)"
    metrics::MetricRow metrics;
};

std::span<const ReferenceRow> reference_station_rows();
std::optional<metrics::MetricRow> reference_average(ModelFamily family);
std::optional<metrics::MetricRow> reference_activation(neural::Activation activation);
const ReferenceRow* find_reference(std::string_view station, ModelFamily family);

/// FNV-1a over the raw bytes, as 16 hex digits.
std::string digest(std::span<const double> values);
std::string digest(const Eigen::MatrixXd& values);

} // namespace aircast::bench
