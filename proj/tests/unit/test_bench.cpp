#include "aircast/bench.hpp"
#include "aircast/error.hpp"
#include "aircast/synthetic.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

using namespace aircast;
using namespace aircast::bench;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("aircast_test_bench_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

const dataset::DailyDataset& synthetic_daily() {
    static const dataset::DailyDataset data = [] {
        const fs::path dir = scratch("data");
        const fs::path file = dir / "PRSA_Data_Synthetic_20130301-20170228.csv";
        {
            std::ofstream out(file);
            dataset::write_synthetic_station(out, {});
        }
        return dataset::load_station_daily(file);
    }();
    return data;
}

RunConfig quick_config() {
    RunConfig config;
    config.stations = {"Synthetic"};
    config.arima_p_max = 1;
    config.arima_q_max = 1;
    const auto grid = additive::hyperparameter_grid();
    config.additive_grid.assign(grid.begin(), grid.begin() + 3);
    config.epochs_sweep = {2, 3};
    config.lstm_template.lstm_units = 4;
    config.cnn_template.conv_filters = 4;
    config.cnn_template.dense_hidden = 4;
    return config;
}

ReportRow row(std::optional<double> score, std::string error = {}) {
    ReportRow r;
    r.selection_score = score;
    r.test_metrics = metrics::MetricRow{1, 1, 1, 1};
    r.error = std::move(error);
    return r;
}

} // namespace

TEST_CASE("select_best picks the lowest score, earliest on ties") {
    std::vector<ReportRow> rows{row(3.0), row(1.0), row(1.0), row(2.0)};
    CHECK(select_best(rows) == 1);
    rows[1].error = "failed";
    CHECK(select_best(rows) == 2);
    rows[0].selection_score = 0.5;
    rows[0].test_metrics.reset();
    CHECK(select_best(rows) == 2);
    const std::vector<ReportRow> failed{row(std::nullopt), row(1.0, "boom")};
    CHECK_THROWS_AS(select_best(failed), SelectionError);
    CHECK_THROWS_AS(select_best(std::vector<ReportRow>{}), SelectionError);
}

TEST_CASE("family names") {
    for (ModelFamily f : kAllFamilies) {
        CHECK(family_from_string(to_string(f)) == f);
        CHECK_FALSE(selection_policy(f).empty());
    }
    CHECK(display_name(ModelFamily::Arima) == "ARIMA");
    CHECK_THROWS_AS(family_from_string("gru"), ConfigError);
    CHECK(default_stations().size() == 12);
}

TEST_CASE("reference tables") {
    CHECK(reference_station_rows().size() == 48);
    std::set<std::string_view> stations;
    for (const auto& r : reference_station_rows()) {
        stations.insert(r.station);
        CHECK(r.metrics.rmse > 0.0);
        CHECK(r.metrics.mae <= r.metrics.rmse);
    }
    CHECK(stations.size() == 12);
    for (const auto& s : default_stations()) {
        for (ModelFamily f : kAllFamilies) {
            CHECK(find_reference(s, f) != nullptr);
        }
    }
    for (ModelFamily f : kAllFamilies) {
        CHECK(reference_average(f).has_value());
    }
    CHECK(reference_activation(neural::Activation::Tanh).has_value());
    CHECK(reference_activation(neural::Activation::Relu).has_value());
    CHECK(find_reference("Nowhere", ModelFamily::Lstm) == nullptr);
}

TEST_CASE("digest") {
    const std::vector<double> a{1.0, 2.0, 3.0};
    std::vector<double> b = a;
    CHECK(digest(a) == digest(b));
    CHECK(digest(a).size() == 16);
    b[2] = std::nextafter(3.0, 4.0);
    CHECK(digest(a) != digest(b));
}

TEST_CASE("config validation") {
    RunConfig config = quick_config();
    CHECK_NOTHROW(config.validate());
    config.train_fraction = 0.9;
    config.validation_fraction = 0.2;
    CHECK_THROWS_AS(config.validate(), ConfigError);
    config = quick_config();
    config.epochs_sweep.clear();
    CHECK_THROWS_AS(config.validate(), ConfigError);
    config = quick_config();
    config.models.clear();
    CHECK_THROWS_AS(config.validate(), ConfigError);
}

TEST_CASE("station run: shape, determinism and no test leakage") {
    const dataset::DailyDataset& data = synthetic_daily();
    REQUIRE(data.size() == 1461);
    const RunConfig config = quick_config();

    const StationReport a = run_dataset(data, config);
    CHECK(a.n_train == 876);
    CHECK(a.n_validation == 219);
    CHECK(a.n_test == 366);
    CHECK(a.test_dates.size() == 366);
    CHECK(a.test_dates.front() == make_date(2016, 2, 29));
    CHECK(a.adf.has_value());

    std::map<ModelFamily, std::size_t> counts, selected;
    for (const ReportRow& r : a.rows) {
        CHECK(r.ok());
        counts[r.family] += 1;
        selected[r.family] += r.selected ? 1 : 0;
    }
    CHECK(counts[ModelFamily::Additive] == 3);
    CHECK(counts[ModelFamily::Arima] == 1);
    CHECK(counts[ModelFamily::Lstm] == 4);
    CHECK(counts[ModelFamily::Cnn] == 2);
    for (ModelFamily f : kAllFamilies) {
        CHECK(selected[f] == 1);
        REQUIRE(a.forecasts.count(f) == 1);
        CHECK(a.forecasts.at(f).point.size() == 366);
    }
    CHECK(a.forecasts.at(ModelFamily::Additive).has_interval());
    CHECK(a.arima_cells.size() == 4);

    const StationReport b = run_dataset(data, config);
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(a.rows[i].selection_score == b.rows[i].selection_score);
        CHECK(a.rows[i].test_metrics->rmse == b.rows[i].test_metrics->rmse);
    }
    CHECK(a.fit_digests == b.fit_digests);

    dataset::DailyDataset perturbed = data;
    for (std::size_t i = data.size() - 366; i < data.size(); ++i) {
        perturbed.target[i] *= 3.0;
        perturbed.features.row(static_cast<Eigen::Index>(i)) *= 0.5;
    }
    const StationReport c = run_dataset(perturbed, config);
    CHECK(c.fit_digests == a.fit_digests);
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(a.rows[i].selection_score == c.rows[i].selection_score);
        CHECK(a.rows[i].selected == c.rows[i].selected);
        CHECK(a.rows[i].test_metrics->rmse != c.rows[i].test_metrics->rmse);
    }
}

TEST_CASE("report files") {
    REQUIRE_FALSE(synthetic_daily().empty());
    const fs::path data_dir = fs::temp_directory_path() / "aircast_test_bench_data";
    RunConfig config = quick_config();
    config.models = {ModelFamily::Additive, ModelFamily::Lstm};
    config.data_dir = data_dir;
    config.output_dir = scratch("out");
    const EvalReport report = run_bench(config);
    REQUIRE(report.stations.size() == 1);
    REQUIRE(report.averages.size() == 2);
    CHECK(report.averages[0].label == "Additive");
    CHECK(report.averages[0].reference.has_value());
    CHECK(report.activations.size() == 2);

    for (const char* name : {"sweep.csv", "station_metrics.csv", "station_metrics.txt", "averages.csv",
                             "averages.txt", "activations.csv", "activations.txt", "manifest.json",
                             "plots/Synthetic.csv", "plots/Synthetic_additive.svg", "plots/Synthetic_lstm.svg"}) {
        CAPTURE(name);
        CHECK(fs::exists(config.output_dir / name));
    }
    std::ifstream plot(config.output_dir / "plots/Synthetic.csv");
    std::size_t lines = 0;
    for (std::string line; std::getline(plot, line);) {
        ++lines;
    }
    CHECK(lines == 367);

    std::ifstream manifest_file(config.output_dir / "manifest.json");
    const Json manifest = Json::parse(manifest_file);
    CHECK(manifest.at("config").at("seed") == 42);
    CHECK(manifest == report.manifest);

    config.stations = {"Atlantis"};
    CHECK_THROWS(run_bench(config));
}
