#include "aircast/dataset.hpp"

#include "aircast/error.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace aircast::dataset {

namespace {

template <typename T>
void fill_column(std::vector<std::optional<T>>& column, std::string_view name) {
    const auto first = std::find_if(column.begin(), column.end(), [](const auto& v) { return v.has_value(); });
    if (first == column.end()) {
        throw UnfillableColumnError("column '" + std::string(name) + "' has no observed values");
    }
    const T head = **first;
    for (auto it = column.begin(); it != first; ++it) {
        *it = head;
    }
    std::optional<T> last;
    for (auto& cell : column) {
        if (cell) {
            last = cell;
        } else {
            cell = last;
        }
    }
}

} // namespace

RawTable forward_fill(RawTable table) {
    for (std::size_t m = 0; m < table.measurements.size(); ++m) {
        fill_column(table.measurements[m], kMeasurementColumns[m]);
    }
    fill_column(table.wind_direction, "wd");
    return table;
}

RawTable encode_wind_direction(RawTable table) {
    std::set<std::string> distinct;
    for (const auto& cell : table.wind_direction) {
        if (!cell) {
            throw ValidationError("wind direction has missing cells; forward_fill first");
        }
        distinct.insert(*cell);
    }
    WindEncoding encoding{{distinct.begin(), distinct.end()}};
    table.wind_codes.clear();
    table.wind_codes.reserve(table.rows());
    for (const auto& cell : table.wind_direction) {
        table.wind_codes.push_back(static_cast<double>(encoding.code(*cell)));
    }
    table.wind_encoding = std::move(encoding);
    return table;
}

DailyDataset aggregate_daily(const RawTable& table) {
    if (table.rows() == 0) {
        throw EmptyInputError("cannot aggregate an empty table");
    }
    if (!table.wind_encoding || table.wind_codes.size() != table.rows()) {
        throw ValidationError("wind direction not encoded; run encode_wind_direction first");
    }

    // Column sources in kFeatureColumns order; index -1 is the wind code.
    std::vector<int> feature_source;
    for (const auto name : kFeatureColumns) {
        if (name == "wd") {
            feature_source.push_back(-1);
            continue;
        }
        const auto it = std::find(kMeasurementColumns.begin(), kMeasurementColumns.end(), name);
        feature_source.push_back(static_cast<int>(it - kMeasurementColumns.begin()));
    }
    const std::size_t target_index = 0;  // PM2.5

    auto cell = [&](int source, std::size_t row) -> double {
        if (source < 0) {
            return table.wind_codes[row];
        }
        const auto& value = table.measurements[static_cast<std::size_t>(source)][row];
        if (!value) {
            throw ValidationError("missing value in column '" +
                                  std::string(kMeasurementColumns[static_cast<std::size_t>(source)]) +
                                  "'; run forward_fill first");
        }
        return *value;
    };

    DailyDataset out;
    out.station = table.station;
    for (const auto name : kFeatureColumns) {
        out.feature_names.emplace_back(name);
    }

    std::vector<std::vector<double>> feature_rows;
    std::size_t row = 0;
    while (row < table.rows()) {
        const Date date = table.stamps[row].date();
        if (!out.dates.empty() && date != out.dates.back() + std::chrono::days{1}) {
            throw GapError("no hourly rows for " + to_iso(out.dates.back() + std::chrono::days{1}));
        }
        double target_sum = 0.0;
        std::vector<double> sums(feature_source.size(), 0.0);
        std::size_t count = 0;
        for (; row < table.rows() && table.stamps[row].date() == date; ++row, ++count) {
            target_sum += cell(static_cast<int>(target_index), row);
            for (std::size_t j = 0; j < feature_source.size(); ++j) {
                sums[j] += cell(feature_source[j], row);
            }
        }
        out.dates.push_back(date);
        out.target.push_back(target_sum / static_cast<double>(count));
        for (auto& s : sums) {
            s /= static_cast<double>(count);
        }
        feature_rows.push_back(std::move(sums));
    }

    out.features.resize(static_cast<Eigen::Index>(feature_rows.size()),
                        static_cast<Eigen::Index>(feature_source.size()));
    for (std::size_t i = 0; i < feature_rows.size(); ++i) {
        for (std::size_t j = 0; j < feature_source.size(); ++j) {
            out.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = feature_rows[i][j];
        }
    }
    return out;
}

DailyDataset load_station_daily(const std::filesystem::path& path) {
    return aggregate_daily(encode_wind_direction(forward_fill(read_station_csv(path))));
}

DailyDataset DailyDataset::slice(std::size_t begin, std::size_t end) const {
    end = std::min(end, size());
    begin = std::min(begin, end);
    DailyDataset out;
    out.station = station;
    out.feature_names = feature_names;
    out.dates.assign(dates.begin() + static_cast<std::ptrdiff_t>(begin), dates.begin() + static_cast<std::ptrdiff_t>(end));
    out.target.assign(target.begin() + static_cast<std::ptrdiff_t>(begin), target.begin() + static_cast<std::ptrdiff_t>(end));
    out.features = features.middleRows(static_cast<Eigen::Index>(begin), static_cast<Eigen::Index>(end - begin));
    return out;
}

void DailyDataset::validate() const {
    if (target.size() != dates.size() || static_cast<std::size_t>(features.rows()) != dates.size()) {
        throw ValidationError("daily dataset: dates, target and features differ in length");
    }
    if (static_cast<std::size_t>(features.cols()) != feature_names.size()) {
        throw ValidationError("daily dataset: feature name count does not match feature columns");
    }
    for (std::size_t i = 1; i < dates.size(); ++i) {
        if (dates[i] != dates[i - 1] + std::chrono::days{1}) {
            throw ValidationError("daily dataset: dates not contiguous at " + to_iso(dates[i]));
        }
    }
    for (const double v : target) {
        if (!std::isfinite(v)) {
            throw ValidationError("daily dataset: non-finite target value");
        }
    }
    if (!features.allFinite()) {
        throw ValidationError("daily dataset: non-finite feature value");
    }
}

DailyDataset concatenate(const DailyDataset& a, const DailyDataset& b) {
    if (a.empty()) {
        return b;
    }
    if (b.empty()) {
        return a;
    }
    if (a.feature_names != b.feature_names) {
        throw ValidationError("cannot concatenate datasets with different features");
    }
    DailyDataset out = a;
    out.dates.insert(out.dates.end(), b.dates.begin(), b.dates.end());
    out.target.insert(out.target.end(), b.target.begin(), b.target.end());
    out.features.resize(a.features.rows() + b.features.rows(), a.features.cols());
    out.features << a.features, b.features;
    return out;
}

SplitBundle chronological_split(const DailyDataset& data, double train_fraction, double validation_fraction_of_train) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw SplitError("train_fraction must lie in (0,1)");
    }
    if (!(validation_fraction_of_train >= 0.0 && validation_fraction_of_train < 1.0)) {
        throw SplitError("validation_fraction_of_train must lie in [0,1)");
    }
    if (data.empty()) {
        throw SplitError("cannot split an empty dataset");
    }
    const auto n = data.size();
    const auto block = static_cast<std::size_t>(std::floor(static_cast<double>(n) * train_fraction));
    const auto validation =
        static_cast<std::size_t>(std::floor(static_cast<double>(block) * validation_fraction_of_train));
    const auto train = block - validation;
    if (train == 0) {
        throw SplitError("training partition is empty");
    }
    if (block == n) {
        throw SplitError("test partition is empty");
    }
    if (validation_fraction_of_train > 0.0 && validation == 0) {
        throw SplitError("validation partition is empty");
    }
    return SplitBundle{data.slice(0, train), data.slice(train, block), data.slice(block, n)};
}

} // namespace aircast::dataset
