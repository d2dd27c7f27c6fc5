#include "aircast/bench.hpp"

#include "aircast/error.hpp"
#include "aircast/parallel.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace aircast::bench {

namespace {

namespace fs = std::filesystem;
using dataset::format_number;
using metrics::MetricRow;

constexpr ReferenceRow kReferenceRows[] = {
    {"Aotizhongxin", ModelFamily::Additive, "FBProphet", {20.1, 13.2, 29.8, 0.27}},
    {"Aotizhongxin", ModelFamily::Arima, "ARIMA(1,0,3)", {21.0, 14.2, 33.4, 0.29}},
    {"Aotizhongxin", ModelFamily::Lstm, "LSTM", {19.2, 12.4, 21.2, 0.26}},
    {"Aotizhongxin", ModelFamily::Cnn, "CNN", {25.0, 15.9, 25.5, 0.34}},
    {"Changping", ModelFamily::Additive, "FBProphet", {18.9, 13.2, 37.0, 0.30}},
    {"Changping", ModelFamily::Arima, "ARIMA(2,0,0)", {19.2, 13.3, 34.8, 0.30}},
    {"Changping", ModelFamily::Lstm, "LSTM", {18.8, 12.7, 28.0, 0.30}},
    {"Changping", ModelFamily::Cnn, "CNN", {20.2, 14.0, 37.1, 0.32}},
    {"Dingling", ModelFamily::Additive, "FBProphet", {35.6, 16.5, 45.3, 0.53}},
    {"Dingling", ModelFamily::Arima, "ARIMA(2,0,0)", {35.1, 16.2, 34.8, 0.52}},
    {"Dingling", ModelFamily::Lstm, "LSTM", {35.6, 15.2, 22.8, 0.53}},
    {"Dingling", ModelFamily::Cnn, "CNN", {36.7, 16.4, 29.5, 0.54}},
    {"Dongsi", ModelFamily::Additive, "FBProphet", {20.5, 15.1, 33.2, 0.26}},
    {"Dongsi", ModelFamily::Arima, "ARIMA(1,0,0)", {19.8, 14.1, 27.5, 0.25}},
    {"Dongsi", ModelFamily::Lstm, "LSTM", {21.3, 13.2, 17.9, 0.27}},
    {"Dongsi", ModelFamily::Cnn, "CNN", {22.0, 16.1, 26.9, 0.28}},
    {"Guanyuan", ModelFamily::Additive, "FBProphet", {20.2, 15.0, 34.5, 0.27}},
    {"Guanyuan", ModelFamily::Arima, "ARIMA(2,0,0)", {20.2, 14.7, 31.5, 0.27}},
    {"Guanyuan", ModelFamily::Lstm, "LSTM", {18.8, 12.5, 20.3, 0.25}},
    {"Guanyuan", ModelFamily::Cnn, "CNN", {21.3, 14.2, 25.6, 0.28}},
    {"Gucheng", ModelFamily::Additive, "FBProphet", {20.7, 15.0, 36.2, 0.27}},
    {"Gucheng", ModelFamily::Arima, "ARIMA(1,0,0)", {20.6, 14.6, 31.2, 0.27}},
    {"Gucheng", ModelFamily::Lstm, "LSTM", {22.2, 15.2, 23.9, 0.29}},
    {"Gucheng", ModelFamily::Cnn, "CNN", {23.2, 14.3, 22.5, 0.30}},
    {"Huairou", ModelFamily::Additive, "FBProphet", {18.5, 12.2, 35.3, 0.30}},
    {"Huairou", ModelFamily::Arima, "ARIMA(1,0,1)", {19.9, 12.3, 27.6, 0.33}},
    {"Huairou", ModelFamily::Lstm, "LSTM", {17.2, 11.9, 32.5, 0.29}},
    {"Huairou", ModelFamily::Cnn, "CNN", {18.9, 14.0, 38.7, 0.31}},
    {"Nongzhanguan", ModelFamily::Additive, "FBProphet", {20.7, 15.3, 35.4, 0.27}},
    {"Nongzhanguan", ModelFamily::Arima, "ARIMA(1,0,1)", {20.3, 14.4, 29.4, 0.27}},
    {"Nongzhanguan", ModelFamily::Lstm, "LSTM", {18.9, 13.2, 20.3, 0.25}},
    {"Nongzhanguan", ModelFamily::Cnn, "CNN", {19.8, 14.0, 21.7, 0.26}},
    {"Shunyi", ModelFamily::Additive, "FBProphet", {19.8, 13.9, 32.6, 0.28}},
    {"Shunyi", ModelFamily::Arima, "ARIMA(4,0,0)", {19.9, 13.9, 29.0, 0.28}},
    {"Shunyi", ModelFamily::Lstm, "LSTM", {19.8, 12.6, 23.9, 0.28}},
    {"Shunyi", ModelFamily::Cnn, "CNN", {22.2, 14.0, 25.6, 0.31}},
    {"Tiantan", ModelFamily::Additive, "FBProphet", {20.6, 14.7, 32.6, 0.28}},
    {"Tiantan", ModelFamily::Arima, "ARIMA(1,0,0)", {19.6, 13.4, 26.4, 0.27}},
    {"Tiantan", ModelFamily::Lstm, "LSTM", {16.6, 11.5, 19.6, 0.23}},
    {"Tiantan", ModelFamily::Cnn, "CNN", {18.4, 12.5, 19.4, 0.25}},
    {"Wanliu", ModelFamily::Additive, "FBProphet", {19.6, 14.7, 38.3, 0.27}},
    {"Wanliu", ModelFamily::Arima, "ARIMA(1,0,0)", {19.3, 14.2, 34.0, 0.27}},
    {"Wanliu", ModelFamily::Lstm, "LSTM", {23.9, 15.9, 23.3, 0.33}},
    {"Wanliu", ModelFamily::Cnn, "CNN", {23.4, 13.9, 22.6, 0.33}},
    {"Wanshouxigong", ModelFamily::Additive, "FBProphet", {19.3, 13.9, 26.4, 0.24}},
    {"Wanshouxigong", ModelFamily::Arima, "ARIMA(1,0,0)", {19.5, 14.0, 26.4, 0.25}},
    {"Wanshouxigong", ModelFamily::Lstm, "LSTM", {17.8, 12.5, 18.7, 0.23}},
    {"Wanshouxigong", ModelFamily::Cnn, "CNN", {18.3, 12.8, 21.1, 0.23}},
};

std::string csv_field(std::string_view text) {
    if (text.find_first_of(",\"\n") == std::string_view::npos) {
        return std::string(text);
    }
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') {
            out += '"';
        }
        out += c == '\n' ? ' ' : c;
    }
    return out + "\"";
}

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string metric_cells(const std::optional<MetricRow>& m) {
    if (!m) {
        return ",,,";
    }
    return format_number(m->rmse) + "," + format_number(m->mae) + "," + format_number(m->mape) + "," +
           format_number(m->rrse);
}

MetricRow mean_of(std::span<const MetricRow> rows) {
    std::vector<double> rmse, mae, mape, rrse;
    for (const auto& r : rows) {
        rmse.push_back(r.rmse);
        mae.push_back(r.mae);
        mape.push_back(r.mape);
        rrse.push_back(r.rrse);
    }
    const auto n = static_cast<double>(rows.size());
    return {metrics::stable_sum(rmse) / n, metrics::stable_sum(mae) / n, metrics::stable_sum(mape) / n,
            metrics::stable_sum(rrse) / n};
}

std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write '" + path.string() + "'");
    }
    return out;
}

/// Left-aligned first column, right-aligned numbers.
std::string aligned(const std::vector<std::vector<std::string>>& table) {
    std::vector<std::size_t> width;
    for (const auto& row : table) {
        width.resize(std::max(width.size(), row.size()), 0);
        for (std::size_t c = 0; c < row.size(); ++c) {
            width[c] = std::max(width[c], row[c].size());
        }
    }
    std::string out;
    for (const auto& row : table) {
        std::string line;
        for (std::size_t c = 0; c < row.size(); ++c) {
            const std::string pad(width[c] - row[c].size(), ' ');
            line += c < 2 ? row[c] + pad : pad + row[c];
            if (c + 1 < row.size()) {
                line += "  ";
            }
        }
        while (!line.empty() && line.back() == ' ') {
            line.pop_back();
        }
        out += line + "\n";
    }
    return out;
}

std::vector<std::string> metric_text(const std::optional<MetricRow>& m) {
    if (!m) {
        return {"-", "-", "-", "-"};
    }
    return {fixed(m->rmse, 1), fixed(m->mae, 1), fixed(m->mape, 1), fixed(m->rrse, 3)};
}

// ---------------------------------------------------------------------------
// SVG line chart

std::string svg_chart(const std::string& title, const std::vector<Date>& dates, const std::vector<double>& actual,
                      const ForecastResult& forecast) {
    constexpr double kWidth = 960, kHeight = 360, kLeft = 60, kRight = 20, kTop = 36, kBottom = 40;
    double lo = std::min(*std::min_element(actual.begin(), actual.end()),
                         *std::min_element(forecast.point.begin(), forecast.point.end()));
    double hi = std::max(*std::max_element(actual.begin(), actual.end()),
                         *std::max_element(forecast.point.begin(), forecast.point.end()));
    if (forecast.has_interval()) {
        lo = std::min(lo, *std::min_element(forecast.lower.begin(), forecast.lower.end()));
        hi = std::max(hi, *std::max_element(forecast.upper.begin(), forecast.upper.end()));
    }
    if (hi <= lo) {
        hi = lo + 1.0;
    }
    const std::size_t n = actual.size();
    auto x = [&](std::size_t i) {
        return kLeft + (n > 1 ? static_cast<double>(i) / static_cast<double>(n - 1) : 0.5) * (kWidth - kLeft - kRight);
    };
    auto y = [&](double v) { return kTop + (hi - v) / (hi - lo) * (kHeight - kTop - kBottom); };
    auto points = [&](const std::vector<double>& values) {
        std::string out;
        for (std::size_t i = 0; i < values.size(); ++i) {
            out += fixed(x(i), 2) + "," + fixed(y(values[i]), 2) + " ";
        }
        return out;
    };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << kLeft << "\" y=\"20\" font-size=\"14\">" << title << "</text>\n";
    if (forecast.has_interval()) {
        std::string band = points(forecast.upper);
        for (std::size_t i = n; i-- > 0;) {
            band += fixed(x(i), 2) + "," + fixed(y(forecast.lower[i]), 2) + " ";
        }
        svg << "<polygon points=\"" << band << "\" fill=\"#9ecae1\" fill-opacity=\"0.5\" stroke=\"none\"/>\n";
    }
    svg << "<polyline points=\"" << points(actual) << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";
    svg << "<polyline points=\"" << points(forecast.point)
        << "\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\"/>\n";
    const double bottom = kHeight - kBottom;
    svg << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\"" << bottom
        << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << kLeft << "\" y1=\"" << bottom << "\" x2=\"" << kWidth - kRight << "\" y2=\"" << bottom
        << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << kLeft - 6 << "\" y=\"" << kTop + 4 << "\" text-anchor=\"end\">" << fixed(hi, 0)
        << "</text>\n";
    svg << "<text x=\"" << kLeft - 6 << "\" y=\"" << bottom << "\" text-anchor=\"end\">" << fixed(lo, 0)
        << "</text>\n";
    if (!dates.empty()) {
        svg << "<text x=\"" << kLeft << "\" y=\"" << bottom + 18 << "\">" << to_iso(dates.front()) << "</text>\n";
        svg << "<text x=\"" << kWidth - kRight << "\" y=\"" << bottom + 18 << "\" text-anchor=\"end\">"
            << to_iso(dates.back()) << "</text>\n";
    }
    svg << "<text x=\"" << kWidth - kRight << "\" y=\"20\" text-anchor=\"end\">black: actual, blue: forecast"
        << (forecast.has_interval() ? ", band: interval" : "") << "</text>\n";
    svg << "</svg>\n";
    return svg.str();
}

Json config_json(const RunConfig& config) {
    Json stations = config.stations;
    Json models = Json::array();
    for (auto f : config.models) {
        models.push_back(to_string(f));
    }
    Json activations = Json::array();
    for (auto a : config.activations) {
        activations.push_back(neural::to_string(a));
    }
    return Json{{"data_dir", config.data_dir.string()},
                {"stations", std::move(stations)},
                {"models", std::move(models)},
                {"train_fraction", config.train_fraction},
                {"validation_fraction", config.validation_fraction},
                {"epochs_sweep", config.epochs_sweep},
                {"activations", std::move(activations)},
                {"seed", config.seed},
                {"workers", config.workers},
                {"file_pattern", config.file_prefix + "<Station>_*.csv"},
                {"adf_regression", stationarity::to_string(config.adf_kind)},
                {"arima", {{"p_max", config.arima_p_max}, {"q_max", config.arima_q_max}, {"d", 0},
                           {"estimation", "css"}, {"criterion", "aic"}}},
                {"additive_grid", config.additive_grid},
                {"lstm_template", config.lstm_template},
                {"cnn_template", config.cnn_template}};
}

Json station_json(const StationReport& s) {
    Json j{{"station", s.station},
           {"n_days", s.n_days},
           {"n_train", s.n_train},
           {"n_validation", s.n_validation},
           {"n_test", s.n_test}};
    if (s.adf) {
        j["adf"] = *s.adf;
    } else {
        j["adf"] = Json{{"error", s.adf_error}};
    }
    j["sweep_cells"] = s.sweep_cells;
    Json grid = Json::array();
    for (const auto& c : s.arima_cells) {
        Json cell{{"p", c.p}, {"q", c.q}};
        cell["aic"] = c.aic ? Json(*c.aic) : Json(nullptr);
        if (!c.error.empty()) {
            cell["error"] = c.error;
        }
        grid.push_back(std::move(cell));
    }
    j["arima_grid"] = std::move(grid);
    Json selected = Json::object();
    Json failed = Json::array();
    for (const auto& r : s.rows) {
        if (r.selected) {
            selected[std::string(to_string(r.family))] =
                Json{{"grid_index", r.grid_index}, {"hyperparameters", r.hyperparameters},
                     {"selection_score", *r.selection_score}};
        }
        if (!r.error.empty()) {
            failed.push_back(Json{{"model", to_string(r.family)}, {"grid_index", r.grid_index}, {"error", r.error}});
        }
    }
    j["selected"] = std::move(selected);
    j["failed_cells"] = std::move(failed);
    j["fit_digests"] = s.fit_digests;
    j["seconds"] = s.seconds;
    return j;
}

} // namespace

std::span<const ReferenceRow> reference_station_rows() {
    return kReferenceRows;
}

const ReferenceRow* find_reference(std::string_view station, ModelFamily family) {
    for (const auto& r : kReferenceRows) {
        if (r.station == station && r.family == family) {
            return &r;
        }
    }
    return nullptr;
}

std::optional<MetricRow> reference_average(ModelFamily family) {
    switch (family) {
    case ModelFamily::Additive: return MetricRow{21.2, 14.4, 34.7, 0.295};
    case ModelFamily::Arima: return MetricRow{21.2, 14.1, 30.5, 0.308};
    case ModelFamily::Lstm: return MetricRow{20.8, 13.2, 22.7, 0.292};
    case ModelFamily::Cnn: return MetricRow{22.4, 14.3, 26.3, 0.312};
    }
    return std::nullopt;
}

std::optional<MetricRow> reference_activation(neural::Activation activation) {
    if (activation == neural::Activation::Tanh) {
        return MetricRow{22.9, 14.4, 25.9, 0.320};
    }
    return MetricRow{21.2, 13.3, 22.9, 0.297};
}

EvalReport assemble_report(std::vector<StationReport> stations, const RunConfig& config) {
    if (stations.empty()) {
        throw SelectionError("no station completed");
    }
    EvalReport report;
    report.stations = std::move(stations);

    for (ModelFamily family : config.models) {
        std::vector<MetricRow> selected;
        for (const auto& s : report.stations) {
            std::size_t count = 0;
            for (const auto& r : s.rows) {
                if (r.family == family && r.selected) {
                    selected.push_back(*r.test_metrics);
                    ++count;
                }
            }
            if (count != 1) {
                throw SelectionError(s.station + ": expected one selected " + std::string(to_string(family)) +
                                     " row, found " + std::to_string(count));
            }
        }
        report.averages.push_back(
            {std::string(display_name(family)), mean_of(selected), selected.size(), reference_average(family)});
    }

    if (std::find(config.models.begin(), config.models.end(), ModelFamily::Lstm) != config.models.end()) {
        for (neural::Activation a : config.activations) {
            std::vector<MetricRow> best;
            for (const auto& s : report.stations) {
                std::vector<ReportRow> candidates;
                for (const auto& r : s.rows) {
                    if (r.family == ModelFamily::Lstm && r.activation == a) {
                        candidates.push_back(r);
                    }
                }
                try {
                    best.push_back(*candidates[select_best(candidates)].test_metrics);
                } catch (const SelectionError&) {
                    spdlog::warn("{}: no successful {} LSTM cell", s.station, neural::to_string(a));
                }
            }
            if (!best.empty()) {
                report.activations.push_back(
                    {std::string(neural::to_string(a)), mean_of(best), best.size(), reference_activation(a)});
            }
        }
    }

    Json policies = Json::object();
    for (ModelFamily f : config.models) {
        policies[std::string(to_string(f))] = selection_policy(f);
    }
    Json stations_json = Json::array();
    for (const auto& s : report.stations) {
        stations_json.push_back(station_json(s));
    }
    Json averages = Json::array();
    for (const auto& a : report.averages) {
        averages.push_back(Json{{"model", a.label}, {"stations", a.stations}, {"metrics", a.mean}});
    }
    report.manifest = Json{{"tool", "aircast"},
                           {"format_version", 1},
                           {"config", config_json(config)},
                           {"selection_policies", std::move(policies)},
                           {"tie_break", "earliest grid index"},
                           {"stations", std::move(stations_json)},
                           {"averages", std::move(averages)}};
    return report;
}

void emit_report(const EvalReport& report, const fs::path& output_dir) {
    std::error_code ec;
    fs::create_directories(output_dir / "plots", ec);
    if (ec) {
        throw IoError("cannot create output directory '" + output_dir.string() + "': " + ec.message());
    }

    {
        auto out = open_output(output_dir / "sweep.csv");
        out << "station,model,grid_index,hyperparameters,selection_score,rmse,mae,mape,rrse,selected,status\n";
        for (const auto& s : report.stations) {
            for (const auto& r : s.rows) {
                out << csv_field(r.station) << ',' << to_string(r.family) << ',' << r.grid_index << ','
                    << csv_field(r.hyperparameters) << ','
                    << (r.selection_score ? format_number(*r.selection_score) : "") << ','
                    << metric_cells(r.test_metrics) << ',' << (r.selected ? 1 : 0) << ','
                    << (r.error.empty() ? "ok" : csv_field("error: " + r.error)) << '\n';
            }
        }
    }

    {
        auto csv = open_output(output_dir / "station_metrics.csv");
        csv << "station,model,hyperparameters,rmse,mae,mape,rrse,reference_model,reference_rmse,reference_mae,"
               "reference_mape,reference_rrse\n";
        std::vector<std::vector<std::string>> table{
            {"Station", "Model", "RMSE", "MAE", "MAPE", "RRSE", "Ref RMSE", "Ref MAE", "Ref MAPE", "Ref RRSE"}};
        for (const auto& s : report.stations) {
            bool first = true;
            for (const auto& r : s.rows) {
                if (!r.selected) {
                    continue;
                }
                const ReferenceRow* ref = find_reference(s.station, r.family);
                const std::optional<MetricRow> ref_metrics =
                    ref ? std::optional<MetricRow>(ref->metrics) : std::nullopt;
                csv << csv_field(s.station) << ',' << to_string(r.family) << ',' << csv_field(r.hyperparameters)
                    << ',' << metric_cells(r.test_metrics) << ',' << (ref ? ref->label : "") << ','
                    << metric_cells(ref_metrics) << '\n';
                std::string model(display_name(r.family));
                if (r.family == ModelFamily::Arima) {
                    model = r.hyperparameters;
                }
                std::vector<std::string> line{first ? s.station : "", model};
                for (auto& cell : metric_text(r.test_metrics)) {
                    line.push_back(std::move(cell));
                }
                for (auto& cell : metric_text(ref_metrics)) {
                    line.push_back(std::move(cell));
                }
                table.push_back(std::move(line));
                first = false;
            }
        }
        auto txt = open_output(output_dir / "station_metrics.txt");
        txt << aligned(table);
    }

    auto write_averages = [&](const std::vector<AveragedRow>& rows, const std::string& stem, const char* head) {
        auto csv = open_output(output_dir / (stem + ".csv"));
        csv << head << ",stations,rmse,mae,mape,rrse,reference_rmse,reference_mae,reference_mape,reference_rrse\n";
        std::vector<std::vector<std::string>> table{
            {head, "Stations", "RMSE", "MAE", "MAPE", "RRSE", "Ref RMSE", "Ref MAE", "Ref MAPE", "Ref RRSE"}};
        for (const auto& a : rows) {
            csv << csv_field(a.label) << ',' << a.stations << ',' << metric_cells(a.mean) << ','
                << metric_cells(a.reference) << '\n';
            std::vector<std::string> line{a.label, std::to_string(a.stations)};
            for (auto& cell : metric_text(a.mean)) {
                line.push_back(std::move(cell));
            }
            for (auto& cell : metric_text(a.reference)) {
                line.push_back(std::move(cell));
            }
            table.push_back(std::move(line));
        }
        auto txt = open_output(output_dir / (stem + ".txt"));
        txt << aligned(table);
    };
    write_averages(report.averages, "averages", "model");
    if (!report.activations.empty()) {
        write_averages(report.activations, "activations", "activation");
    }

    for (const auto& s : report.stations) {
        auto csv = open_output(output_dir / "plots" / (s.station + ".csv"));
        csv << "date,actual";
        for (const auto& [family, forecast] : s.forecasts) {
            const std::string tag(to_string(family));
            csv << ',' << tag << ',' << tag << "_lower," << tag << "_upper";
        }
        csv << '\n';
        for (std::size_t i = 0; i < s.test_dates.size(); ++i) {
            csv << to_iso(s.test_dates[i]) << ',' << format_number(s.test_actual[i]);
            for (const auto& [family, forecast] : s.forecasts) {
                csv << ',' << format_number(forecast.point[i]) << ',';
                if (forecast.has_interval()) {
                    csv << format_number(forecast.lower[i]) << ',' << format_number(forecast.upper[i]);
                } else {
                    csv << ',';
                }
            }
            csv << '\n';
        }
        for (const auto& [family, forecast] : s.forecasts) {
            auto svg = open_output(output_dir / "plots" / (s.station + "_" + std::string(to_string(family)) + ".svg"));
            svg << svg_chart(s.station + ": " + std::string(display_name(family)) + " test-period forecast",
                             s.test_dates, s.test_actual, forecast);
        }
    }

    auto manifest = open_output(output_dir / "manifest.json");
    manifest << report.manifest.dump(2) << '\n';
}

EvalReport run_bench(const RunConfig& config) {
    config.validate();
    if (config.output_dir.empty()) {
        throw ConfigError("an output directory is required");
    }
    const auto start = std::chrono::steady_clock::now();
    std::vector<std::optional<StationReport>> results(config.stations.size());
    const std::size_t station_workers = std::min(config.workers, config.stations.size());
    RunConfig inner = config;
    inner.workers = std::max<std::size_t>(1, config.workers / std::max<std::size_t>(station_workers, 1));
    parallel_for(config.stations.size(), station_workers,
                 [&](std::size_t i) { results[i] = run_station(config.stations[i], inner); });

    std::vector<StationReport> stations;
    for (auto& r : results) {
        stations.push_back(std::move(*r));
    }
    EvalReport report = assemble_report(std::move(stations), config);
    report.manifest["wall_clock_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    emit_report(report, config.output_dir);
    return report;
}

} // namespace aircast::bench
